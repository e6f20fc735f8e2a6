mod args;

use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use graspmc_core::experiment::{prepare_with_rims, Prepared, Setup};
use graspmc_core::geometry::detect_rim_indices;
use graspmc_core::model::{OracleTolerances, SyntheticObject};
use graspmc_core::report::{reports, run_report, scatter_csv, write_csv, DedupRadius, RunReport};
use graspmc_core::sampler::io::{load_history, save_history};
use graspmc_core::sampler::{
    run_chains, AnnealingMode, Bandwidth, ChainHistory, EtaRule, KameleonConfig, RwConfig, SamplerConfig, TransferMode,
};
use graspmc_core::transfer::{tag_transfer, transfer_init, TransferOptions};
use graspmc_core::{ChainStart, InitSpec, ObjectSpec, PointCloud, RimDetectionParams, RimSet};

use args::{BandwidthArg, Cli, Command, DedupArgs, EtaRuleArg, Format, InitArg, ReportArgs, RimsArgs, SampleArgs, SamplerArg, SynthArgs};

enum Failure {
    /// Bad flags or unreadable inputs; nothing ran.
    Usage(String),
    Runtime(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

fn usage(e: impl fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: impl fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => synth(&a),
        Command::Rims(a) => rims(&a),
        Command::Sample(a) => sample(&a),
        Command::Report(a) => report(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("graspmc: {f}");
            match f {
                Failure::Usage(_) => ExitCode::from(2),
                Failure::Runtime(_) => ExitCode::from(1),
            }
        }
    }
}

fn synth(a: &SynthArgs) -> CmdResult {
    let spec = ObjectSpec::load(&a.spec).map_err(usage)?;
    let obj = SyntheticObject::generate(&spec).map_err(usage)?;
    obj.cloud.save(&a.out).map_err(runtime)?;
    let rims_out = a.rims_out.clone().unwrap_or_else(|| with_suffix(&a.out, ".rims"));
    RimSet::new(obj.rim_curve(a.rim_points), spec.display_name())
        .save(&rims_out)
        .map_err(runtime)
}

fn rims(a: &RimsArgs) -> CmdResult {
    let cloud = PointCloud::load(&a.cloud).map_err(usage)?;
    let params = RimDetectionParams {
        radius: a.radius,
        zeta: a.zeta,
    };
    let idx = detect_rim_indices(&cloud, &params).map_err(usage)?;
    let rims = RimSet::new(idx.iter().map(|&i| cloud.points[i]).collect(), a.cloud.display().to_string());
    rims.save(&a.out).map_err(runtime)?;
    if rims.is_empty() {
        return Err(runtime("no rims detected"));
    }
    eprintln!("{} rim points of {}", rims.len(), cloud.len());
    Ok(())
}

fn dedup(d: &DedupArgs) -> DedupRadius {
    DedupRadius {
        position: d.dedup_position,
        orientation: d.dedup_orientation,
    }
}

fn sampler_config(a: &SampleArgs, burn_in: usize) -> SamplerConfig {
    let n_iters = a.iters.unwrap_or(5000);
    let annealing = if a.annealing_literal {
        AnnealingMode::Literal
    } else {
        AnnealingMode::Cooling
    };
    match a.sampler {
        SamplerArg::Rw => {
            let s = a.sigma_pos;
            SamplerConfig::Rw(RwConfig {
                n_iters,
                sigma_pos: [[s, 0.0, 0.0], [0.0, s, 0.0], [0.0, 0.0, s]],
                kappa: a.kappa,
                t0: a.t0,
                tn: a.tn,
                annealing,
            })
        }
        SamplerArg::Kameleon => SamplerConfig::Kameleon(KameleonConfig {
            n_iters,
            burn_in,
            subsample_size: a.subsample_size,
            gamma: a.gamma,
            nu: a.nu,
            eta: a.eta,
            bandwidth: match a.bandwidth {
                BandwidthArg::Median => Bandwidth::Median,
                BandwidthArg::Fixed(s) => Bandwidth::Fixed(s),
            },
            eta_rule: match a.eta_rule {
                EtaRuleArg::Fixed => EtaRule::Fixed,
                EtaRuleArg::Normalized => EtaRule::Normalized,
            },
            t0: a.t0,
            tn: a.tn,
            annealing,
            ..KameleonConfig::default()
        }),
    }
}

fn setup(a: &SampleArgs) -> Setup {
    Setup {
        rim: RimDetectionParams {
            radius: a.rim_radius,
            zeta: a.zeta,
        },
        tolerances: OracleTolerances {
            eps_d: a.eps_d,
            eps_theta: a.eps_theta,
        },
        min_gws: a.min_gws,
        margin: a.margin,
        align: !a.no_align,
    }
}

/// `dir/run.jsonl` -> `dir/run-3.jsonl`.
fn indexed(path: &Path, i: usize) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-{i}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{i}"),
    };
    path.with_file_name(name)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Validated run plan: everything that can be a usage error is checked here.
struct Plan {
    cfg: SamplerConfig,
    init: InitSpec,
    donor: Option<(ChainHistory, TransferMode)>,
}

fn plan(a: &SampleArgs) -> Result<Plan, Failure> {
    let subsample = matches!(a.init, InitArg::Subsample(_));
    let burn_in = match (a.burnin, subsample) {
        (Some(b), true) if b > 0 => {
            return Err(usage(format!("subsample init reuses a frozen subsample and needs --burnin 0, got {b}")))
        }
        (Some(b), _) => b,
        (None, true) => 0,
        (None, false) => 1000,
    };
    if a.sampler == SamplerArg::Rw && a.burnin.is_some_and(|b| b > 0) {
        return Err(usage("--burnin applies to the kameleon sampler only"));
    }
    if a.chains == 0 {
        return Err(usage("--chains must be at least 1"));
    }
    let cfg = sampler_config(a, burn_in);
    cfg.validate().map_err(usage)?;
    let opts = TransferOptions {
        scale: a.transfer_scale,
        subsample_iters: a.iters,
    };
    match (&a.init, &cfg) {
        (InitArg::None, _) => Ok(Plan {
            cfg,
            init: InitSpec::Random,
            donor: None,
        }),
        (InitArg::Subsample(_), SamplerConfig::Rw(_)) => Err(usage("subsample init requires --sampler kameleon")),
        (InitArg::Chain(p), SamplerConfig::Rw(_)) => {
            let history = load_history(p).map_err(usage)?;
            Ok(Plan {
                cfg,
                init: InitSpec::Chain {
                    history,
                    start: ChainStart::Random,
                },
                donor: None,
            })
        }
        (InitArg::Chain(p) | InitArg::Subsample(p), SamplerConfig::Kameleon(k)) => {
            let mode = if subsample { TransferMode::Subsample } else { TransferMode::Chain };
            let donor = load_history(p).map_err(usage)?;
            let (init, k) = transfer_init(&donor, mode, k, &opts).map_err(usage)?;
            Ok(Plan {
                cfg: SamplerConfig::Kameleon(k),
                init,
                donor: Some((donor, mode)),
            })
        }
    }
}

fn prepare_object(a: &SampleArgs) -> Result<Prepared, Failure> {
    let spec = ObjectSpec::load(&a.object).map_err(usage)?;
    let object = SyntheticObject::generate(&spec).map_err(usage)?;
    let rims = match &a.rims {
        Some(p) => Some(RimSet::load(p).map_err(usage)?),
        None => None,
    };
    prepare_with_rims(object, rims, &setup(a)).map_err(runtime)
}

fn print_json(v: &impl serde::Serialize) -> CmdResult {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(runtime)?;
    writeln!(out).map_err(runtime)
}

fn sample(a: &SampleArgs) -> CmdResult {
    let plan = plan(a)?;
    if a.dry_run {
        return print_json(&serde_json::json!({
            "sampler": plan.cfg.kind(),
            "params": plan.cfg.to_params(),
        }));
    }
    let obj = prepare_object(a)?;
    let name = obj.name();
    let jobs: Vec<_> = (0..a.chains as u64)
        .map(|i| (plan.init.clone(), plan.cfg.clone(), name.clone(), a.seed + i))
        .collect();
    let workers = a
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let t = Instant::now();
    let outcomes = run_chains(&obj.target, &jobs, workers);
    let wall = t.elapsed().as_secs_f64();
    let radius = dedup(&a.dedup);
    let mut rows: Vec<RunReport> = Vec::new();
    let mut failures = Vec::new();
    for (i, out) in outcomes.into_iter().enumerate() {
        let (mut h, err) = match out {
            Ok(h) => (h, None),
            Err(f) => (*f.partial, Some(f.error)),
        };
        if let Some((donor, mode)) = &plan.donor {
            // A chain from the same object is a prior, not a transfer.
            if *mode == TransferMode::Chain && donor.meta.object == h.meta.object {
                h.meta.donor = Some(format!("{}:seed={}", donor.meta.object, donor.meta.seed));
            } else {
                tag_transfer(&mut h, donor, *mode);
            }
        }
        let path = if a.chains == 1 { a.out.clone() } else { indexed(&a.out, i) };
        save_history(&h, &path).map_err(runtime)?;
        if let Some(p) = &a.scatter {
            let sp = if a.chains == 1 { p.clone() } else { indexed(p, i) };
            std::fs::write(&sp, scatter_csv(&h)).map_err(|e| runtime(format!("{}: {e}", sp.display())))?;
        }
        if let Some(e) = err {
            failures.push(format!("chain {i} (seed {}): {e}", h.meta.seed));
        }
        let mut r = run_report(&h, &radius);
        r.wall_time_s = Some(wall);
        rows.push(r);
    }
    if rows.len() == 1 {
        print_json(&rows[0])?;
    } else {
        print_json(&rows)?;
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(runtime(failures.join("; ")))
    }
}

fn report(a: &ReportArgs) -> CmdResult {
    let histories = a
        .histories
        .iter()
        .map(load_history)
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    let rows = reports(&histories, &dedup(&a.dedup)).map_err(runtime)?;
    match a.format {
        Format::Csv => write_csv(&rows, io::stdout().lock()).map_err(runtime),
        Format::Json => print_json(&rows),
    }
}
