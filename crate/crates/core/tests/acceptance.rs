//! One line per acceptance criterion. Exits non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::*;
use graspmc_core::experiment::{run_random, run_transfer};
use graspmc_core::geometry::{rim_scores, Grasp, PointCloud, State};
use graspmc_core::kernel::{centering_matrix, gauss_kernel, kernel_gradient, proposal_covariance, KernelConfig, Matrix7, Subsample};
use graspmc_core::model::{heuristic_measure, HeuristicParams, ObjectKind, SyntheticObject};
use graspmc_core::report::{run_report, DedupRadius};
use graspmc_core::sampler::io::{history_to_string, load_history, save_history};
use graspmc_core::sampler::{
    chain_rng, mh_accept, run_chain, sample_vmf, AnnealingMode, KameleonChain, KameleonConfig, RwConfig, SamplerConfig,
    TransferMode,
};
use graspmc_core::transfer::{init_from_chain, init_from_subsample, TransferOptions};
use graspmc_core::{InitSpec, ObjectSpec};
use nalgebra::{DVector, Quaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn formulas() -> Outcome {
    let mut fails = Vec::new();
    let sched = KameleonConfig::default().schedule();
    let (t0, tn) = (sched.temperature(0), sched.temperature(sched.n_iters));
    if !close(t0, 1.0, 1e-12) || !close(tn, 0.05, 1e-12) {
        fails.push(format!("T(0)={t0} T(N)={tn}"));
    }
    let p = HeuristicParams::default();
    let cases = [
        (PI, 0.3, 0.01),
        (PI, 7.0, 0.01),
        (0.4, 0.0, 0.01),
        (0.0, 1.0, 0.01 / (1.0 + PI)),
    ];
    for (theta, d, want) in cases {
        let got = heuristic_measure(theta, d, &p).measure;
        if !close(got, want, 1e-12) {
            fails.push(format!("heuristic({theta},{d})={got}"));
        }
    }
    for n in [1, 2, 7, 50, 200] {
        let h = centering_matrix(n).unwrap();
        let idem = (&h * &h - &h).amax();
        let ones = (&h * DVector::from_element(n, 1.0)).amax();
        if idem > 1e-12 || ones > 1e-12 {
            fails.push(format!("centering n={n}: |H^2-H|={idem:e} |H1|={ones:e}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let x = random_state(&mut rng, 1.0);
        let y = random_state(&mut rng, 1.0);
        let cfg = KernelConfig::new(rng.random_range(0.1..2.0), 1.0).unwrap();
        let want = (-(x - y).norm_squared() / (2.0 * cfg.sigma * cfg.sigma)).exp();
        if !close(gauss_kernel(&x, &y, &cfg), want, 1e-12) {
            fails.push("gaussian kernel".into());
            break;
        }
    }
    outcome(fails.is_empty(), if fails.is_empty() { "all closed forms within 1e-12".into() } else { fails.join("; ") })
}

fn kernel_gradient_fd() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let sigma = rng.random_range(0.2..2.0);
        let cfg = KernelConfig::new(sigma, 1.0).unwrap();
        let x = random_state(&mut rng, 1.0);
        let z = x + random_state(&mut rng, sigma);
        let g = kernel_gradient(&x, &z, &cfg);
        let fd = fd_gradient(&x, &z, &cfg, 1e-5 * sigma);
        worst = worst.max((g - fd).norm() / g.norm());
    }
    outcome(worst <= 1e-6, format!("max relative error {worst:.2e} over 50 configurations"))
}

fn covariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_naive: f64 = 0.0;
    let mut worst_asym: f64 = 0.0;
    let mut min_ratio = f64::INFINITY;
    for _ in 0..20 {
        let n = rng.random_range(1..60);
        let sigma = rng.random_range(0.3..2.0);
        let cfg = KernelConfig::new(sigma, rng.random_range(0.1..2.0)).unwrap();
        let y = random_state(&mut rng, 0.5);
        let z = Subsample((0..n).map(|_| y + random_state(&mut rng, sigma)).collect());
        let gamma = rng.random_range(1e-4..0.1);
        let nu = rng.random_range(0.1..2.0);
        let c = *proposal_covariance(&z, &y, gamma, nu, &cfg).unwrap().matrix();
        let naive = naive_covariance(&z, &y, gamma, nu, &cfg);
        worst_naive = worst_naive.max((c - naive).amax());
        worst_asym = worst_asym.max((c - c.transpose()).amax());
        let min_eig = c.symmetric_eigenvalues().min();
        min_ratio = min_ratio.min(min_eig / (gamma * gamma));
    }
    let cfg = KernelConfig::new(1.0, 1.0).unwrap();
    let empty = *proposal_covariance(&Subsample::default(), &State::zeros(), 0.01, 1.0, &cfg)
        .unwrap()
        .matrix();
    let empty_ok = empty == Matrix7::identity() * (0.01 * 0.01);
    outcome(
        worst_naive <= 1e-10 && worst_asym == 0.0 && min_ratio >= 1.0 - 1e-9 && empty_ok,
        format!(
            "max |C - naive| {worst_naive:.1e}, asymmetry {worst_asym:e}, min eig / gamma^2 {min_ratio:.6}, empty subsample exact: {empty_ok}"
        ),
    )
}

/// Every `thin`-th state of a frozen, untempered chain on the 2D Gaussian.
fn gaussian_draws(samples: usize, thin: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = chain_rng(seed);
    let z = gaussian_subsample(50, &mut rng);
    let cfg = gaussian_config(samples * thin);
    let start = Grasp::identity_at(Vector3::zeros());
    let (mut chain, _) = KameleonChain::start(&Gaussian2, cfg, start, vec![], vec![], Some(z)).unwrap();
    let mut out = Vec::with_capacity(samples);
    for i in 1..=samples * thin {
        chain.step(&mut rng).unwrap();
        if i % thin == 0 {
            let p = chain.current().position;
            out.push((p.x, p.y));
        }
    }
    out
}

fn sampler_correctness() -> Outcome {
    let m = gaussian_draws(20_000, 10, 4);
    let n = m.len() as f64;
    let mean = m.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in &m {
        sxx += (x - mean.0).powi(2) / n;
        syy += (y - mean.1).powi(2) / n;
        sxy += (x - mean.0) * (y - mean.1) / n;
    }
    let moments_ok = mean.0.abs() <= 0.1
        && mean.1.abs() <= 0.1
        && (sxx - 1.0).abs() <= 0.15
        && (syy - 1.0).abs() <= 0.15
        && sxy.abs() <= 0.15;

    let draws = gaussian_draws(50_000, 10, 5);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let edges: Vec<f64> = (1..5).map(|k| normal.inverse_cdf(k as f64 / 5.0)).collect();
    let bin = |v: f64| edges.iter().filter(|&&e| v > e).count();
    let mut counts = [[0usize; 5]; 5];
    for (x, y) in &draws {
        counts[bin(*x)][bin(*y)] += 1;
    }
    let expected = draws.len() as f64 / 25.0;
    let chi2: f64 = counts.iter().flatten().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new(24.0).unwrap().inverse_cdf(1.0 - 0.001);
    outcome(
        moments_ok && chi2 <= critical,
        format!(
            "mean ({:.3}, {:.3}) cov [{sxx:.3} {sxy:.3}; {syy:.3}], chi2 {chi2:.1} vs {critical:.1}",
            mean.0, mean.1
        ),
    )
}

fn acceptance_rate(mode: AnnealingMode, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 100_000;
    let hits = (0..n)
        .filter(|_| mh_accept(0.9, 1.0, 1.0, 1.0, 0.05, mode, &mut rng).unwrap())
        .count();
    hits as f64 / n as f64
}

fn annealing() -> Outcome {
    let n = 100_000.0;
    let mut ok = true;
    let mut detail = Vec::new();
    for (mode, want, seed) in [(AnnealingMode::Cooling, 0.9f64.powi(20), 6), (AnnealingMode::Literal, 0.9f64.powf(0.05), 7)] {
        let got = acceptance_rate(mode, seed);
        let se = (want * (1.0 - want) / n).sqrt();
        ok &= (got - want).abs() <= 3.0 * se;
        detail.push(format!("{mode:?} {got:.5} vs {want:.5} (3 se {:.5})", 3.0 * se));
    }
    outcome(ok, detail.join(", "))
}

fn vmf() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mode = Quaternion::new(0.5, 0.5, -0.5, 0.5);
    let n = 50_000;
    let mut sum = nalgebra::Vector4::zeros();
    for _ in 0..n {
        sum += sample_vmf(&mode, 5.0, &mut rng).unwrap().coords;
    }
    let rbar = sum.norm() / n as f64;
    let want = vmf_mean_resultant(5.0);
    let mut uniform = nalgebra::Vector4::zeros();
    for _ in 0..n {
        uniform += sample_vmf(&mode, 0.0, &mut rng).unwrap().coords;
    }
    let umax = (uniform / n as f64).amax();
    outcome(
        (rbar - want).abs() <= 0.01 && umax <= 0.02,
        format!("kappa=5 resultant {rbar:.4} vs A4(5) {want:.4}; kappa=0 max |mean| {umax:.4}"),
    )
}

fn rims() -> Outcome {
    let obj = SyntheticObject::generate(&ObjectSpec::new(ObjectKind::Plate, PLATE_RADIUS, PLATE_POINTS, 0)).unwrap();
    let scores = rim_scores(&obj.cloud, DISC_RIM_RADIUS);
    let (mut tp, mut fp, mut truth) = (0, 0, 0);
    for (p, s) in obj.cloud.points.iter().zip(&scores) {
        let edge = PLATE_RADIUS - p.xy().norm() < DISC_RIM_RADIUS / 2.0;
        let hit = *s > DISC_RIM_ZETA;
        truth += edge as usize;
        tp += (edge && hit) as usize;
        fp += (!edge && hit) as usize;
    }
    let recall = tp as f64 / truth as f64;
    let precision = tp as f64 / (tp + fp) as f64;

    // Grid spacing 2^-7 keeps every displacement exact.
    let h = 1.0 / 128.0;
    let n = 21;
    let grid: Vec<_> = (0..n * n).map(|k| Vector3::new((k / n) as f64 * h, (k % n) as f64 * h, 0.0)).collect();
    let cloud = PointCloud::new(grid).unwrap();
    let grid_scores = rim_scores(&cloud, 2.5 * h);
    let interior = (0..n * n).filter(|k| (3..n - 3).contains(&(k / n)) && (3..n - 3).contains(&(k % n)));
    let zeros = interior.clone().all(|k| grid_scores[k] == 0.0);
    outcome(
        recall >= 0.9 && precision >= 0.8 && zeros,
        format!(
            "recall {recall:.3} precision {precision:.3} ({truth} edge points); {} interior grid scores exactly zero: {zeros}",
            interior.count()
        ),
    )
}

fn wins(pairs: &[(usize, usize)]) -> usize {
    pairs.iter().filter(|(a, b)| a >= b).count()
}

fn trends() -> Outcome {
    let obj = plate(PLATE_RADIUS, 7);
    let mut prior = Vec::new();
    let mut burn = Vec::new();
    let mut rows = Vec::new();
    let r = DedupRadius::default();
    for seed in 0..10u64 {
        let rw = run_random(&obj, &SamplerConfig::Rw(RwConfig::default()), 1000 + seed).unwrap();
        let count = |burn_in: usize| run_report(&run_random(&obj, &SamplerConfig::Kameleon(preset(burn_in)), seed).unwrap(), &r).feasible_count;
        let init = init_from_chain(&rw, &mut chain_rng(seed)).unwrap();
        let with_prior = run_chain(&obj.target, &init, &SamplerConfig::Kameleon(preset(1000)), &obj.name(), seed).unwrap();
        let (np1, np2, p1) = (count(1000), count(2000), run_report(&with_prior, &r).feasible_count);
        prior.push((p1, np1));
        burn.push((np2, np1));
        rows.push(format!("{np1}/{p1}/{np2}"));
    }
    let (wp, wb) = (wins(&prior), wins(&burn));
    outcome(
        wp >= 8 && wb >= 7,
        format!(
            "prior >= random {wp}/10 (need 8), burn-in 2000 >= 1000 {wb}/10 (need 7); [1000,np]/[1000,p]/[2000,np] per seed: {}",
            rows.join(" ")
        ),
    )
}

fn transfer() -> Outcome {
    let (donor_obj, same, other) = (plate(PLATE_RADIUS, 7), plate(0.13, 8), pitcher());
    let cfg = preset(1000);
    let r = DedupRadius::default();
    let opts = TransferOptions::default();
    let mut pairs = Vec::new();
    for seed in 0..10u64 {
        let donor = run_random(&donor_obj, &SamplerConfig::Kameleon(cfg.clone()), seed).unwrap();
        let chain = run_transfer(&same, &donor, TransferMode::Chain, &cfg, &opts, seed).unwrap();
        // A receiving run that cannot start found no grasps.
        let sub = match run_transfer(&other, &donor, TransferMode::Subsample, &cfg, &opts, seed) {
            Ok(h) => Some(run_report(&h, &r).feasible_count),
            Err(_) => None,
        };
        pairs.push((run_report(&chain, &r).feasible_count, sub));
    }
    let nonzero = pairs.iter().filter(|(c, _)| *c > 0).count();
    let le = pairs.iter().filter(|(c, s)| s.unwrap_or(0) <= *c).count();
    let rows: Vec<String> = pairs
        .iter()
        .map(|(c, s)| match s {
            Some(s) => format!("{c}/{s}"),
            None => format!("{c}/aborted"),
        })
        .collect();
    outcome(
        nonzero >= 8 && le >= 8,
        format!(
            "chain nonzero {nonzero}/10, subsample <= chain {le}/10; chain/subsample per seed: {}",
            rows.join(" ")
        ),
    )
}

fn persistence() -> Outcome {
    let obj = plate(PLATE_RADIUS, 7);
    let cfg = SamplerConfig::Kameleon(KameleonConfig {
        n_iters: 1500,
        burn_in: 500,
        ..preset(0)
    });
    let a = run_random(&obj, &cfg, 11).unwrap();
    let b = run_random(&obj, &cfg, 11).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (pa, pb) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    save_history(&a, &pa).unwrap();
    save_history(&b, &pb).unwrap();
    let identical = std::fs::read(&pa).unwrap() == std::fs::read(&pb).unwrap();
    let loaded = load_history(&pa).unwrap();
    let round_trip = loaded == a && history_to_string(&loaded) == history_to_string(&a);

    let InitSpec::Subsample { z, start } = init_from_subsample(&a).unwrap() else {
        unreachable!()
    };
    let k = KameleonConfig {
        burn_in: 0,
        ..preset(0)
    };
    let donor_kernel = k.kernel_for(&z);
    let donor_cov = *proposal_covariance(&z, &start.to_state(), k.gamma, k.nu, &donor_kernel)
        .unwrap()
        .matrix();
    let (chain, _) = KameleonChain::start(&obj.target, k.clone(), start, vec![], vec![], Some(loaded.meta.frozen().unwrap())).unwrap();
    let recv = *proposal_covariance(chain.subsample().unwrap(), &chain.current().to_state(), k.gamma, k.nu, chain.kernel().unwrap())
        .unwrap()
        .matrix();
    let diff = (recv - donor_cov).amax();
    outcome(
        identical && round_trip && diff <= 1e-12,
        format!("byte-identical: {identical}, round trip: {round_trip}, covariance difference {diff:e}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        ("formula exactness", formulas, Duration::from_secs(1)),
        ("kernel gradient vs finite differences", kernel_gradient_fd, Duration::from_secs(1)),
        ("proposal covariance", covariance, Duration::from_secs(5)),
        ("sampler statistical correctness", sampler_correctness, Duration::from_secs(60)),
        ("annealing direction", annealing, Duration::from_secs(10)),
        ("vMF sampler", vmf, Duration::from_secs(30)),
        ("rim detection", rims, Duration::from_secs(10)),
        ("trend reproduction", trends, Duration::from_secs(600)),
        ("transfer trend", transfer, Duration::from_secs(600)),
        ("determinism and persistence", persistence, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        let elapsed = t.elapsed();
        let pass = o.pass && elapsed < *budget;
        failed += (!pass) as usize;
        println!(
            "criterion {:>2} {}: {name}: {} [{:.2}s of {}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
