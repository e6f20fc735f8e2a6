use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::accept::accept_log;
use super::config::{KameleonConfig, RwConfig, SamplerConfig};
use super::history::{ChainHistory, ChainRecord, Evaluation, HistoryMeta, InitMode, RunStatus, Target};
use super::kameleon::{draw_subsample, propose_with_subsample};
use super::rw::rw_step;
use super::schedule::AnnealingSchedule;
use crate::error::{Error, Result};
use crate::geometry::{Grasp, State};
use crate::kernel::{KernelConfig, Subsample};
use crate::transfer::{ChainStart, InitSpec};

/// The RNG every chain runs on, seeded from the run's `seed`.
pub type ChainRng = ChaCha8Rng;

pub fn chain_rng(seed: u64) -> ChainRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn evaluate_start<T: Target + ?Sized>(target: &T, g: &Grasp) -> Result<Evaluation> {
    let e = target.evaluate(g)?;
    if e.measure.is_nan() || e.measure <= 0.0 {
        return Err(Error::ZeroCurrentDensity);
    }
    Ok(e)
}

fn initial_record(g: Grasp, e: Evaluation, t0: f64) -> ChainRecord {
    ChainRecord {
        iter: 0,
        proposal: g,
        measure: e.measure,
        feasible: e.feasible,
        accepted: true,
        temperature: t0,
    }
}

/// Kernel-adaptive chain. The subsample is redrawn every iteration up to
/// `burn_in` and frozen afterwards.
pub struct KameleonChain<'t, T: Target + ?Sized> {
    target: &'t T,
    cfg: KameleonConfig,
    schedule: AnnealingSchedule,
    accepted_pool: Vec<State>,
    proposal_pool: Vec<State>,
    current: Grasp,
    current_eval: Evaluation,
    z: Option<(Subsample, KernelConfig)>,
    adaptive: bool,
    frozen: Option<Subsample>,
    iter: usize,
}

impl<'t, T: Target + ?Sized> KameleonChain<'t, T> {
    /// Starts a chain at `start` with pre-existing history states. A fixed
    /// subsample disables adaptation entirely.
    pub fn start(
        target: &'t T,
        cfg: KameleonConfig,
        start: Grasp,
        prior_accepted: Vec<State>,
        prior_proposals: Vec<State>,
        fixed: Option<Subsample>,
    ) -> Result<(Self, ChainRecord)> {
        cfg.validate()?;
        if fixed.is_some() && cfg.burn_in > 0 {
            return Err(Error::SubsampleModeForbidsBurnin(cfg.burn_in));
        }
        let eval = evaluate_start(target, &start)?;
        let schedule = cfg.schedule();
        let record = initial_record(start, eval, schedule.temperature(0));
        let mut accepted_pool = prior_accepted;
        let mut proposal_pool = prior_proposals;
        accepted_pool.push(start.to_state());
        proposal_pool.push(start.to_state());
        let adaptive = fixed.is_none();
        let z = fixed.map(|z| {
            let k = cfg.kernel_for(&z);
            (z, k)
        });
        let frozen = if adaptive {
            None
        } else {
            z.as_ref().map(|(z, _)| z.clone())
        };
        Ok((
            Self {
                target,
                cfg,
                schedule,
                accepted_pool,
                proposal_pool,
                current: start,
                current_eval: eval,
                z,
                adaptive,
                frozen,
                iter: 0,
            },
            record,
        ))
    }

    pub fn current(&self) -> &Grasp {
        &self.current
    }

    pub fn iteration(&self) -> usize {
        self.iter
    }

    /// Subsample the next proposal will use once adaptation has stopped.
    pub fn subsample(&self) -> Option<&Subsample> {
        self.z.as_ref().map(|(z, _)| z)
    }

    pub fn kernel(&self) -> Option<&KernelConfig> {
        self.z.as_ref().map(|(_, k)| k)
    }

    /// Subsample frozen at the end of burn-in (or the fixed one).
    pub fn frozen(&self) -> Option<&Subsample> {
        self.frozen.as_ref()
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<ChainRecord> {
        self.iter += 1;
        let j = self.iter;
        let temperature = self.schedule.temperature(j);
        if self.adaptive && (j <= self.cfg.burn_in || self.z.is_none()) {
            let z = draw_subsample(
                &self.accepted_pool,
                &self.proposal_pool,
                self.cfg.subsample_size,
                rng,
            );
            let kernel = self.cfg.kernel_for(&z);
            if j == self.cfg.burn_in {
                self.frozen = Some(z.clone());
            }
            self.z = Some((z, kernel));
        }
        let (z, kernel) = self.z.as_ref().expect("subsample drawn above");
        let prop = propose_with_subsample(&self.current, z, kernel, &self.cfg, rng)?;
        let eval = self.target.evaluate(&prop.proposal)?;
        let u: f64 = rng.random();
        let accepted = accept_log(
            eval.measure.ln(),
            self.current_eval.measure.ln(),
            prop.ln_q_fwd,
            prop.ln_q_rev,
            temperature,
            self.cfg.annealing,
            u,
        )?;
        let state = prop.proposal.to_state();
        if accepted {
            self.current = prop.proposal;
            self.current_eval = eval;
            self.accepted_pool.push(state);
        }
        self.proposal_pool.push(state);
        Ok(ChainRecord {
            iter: j,
            proposal: prop.proposal,
            measure: eval.measure,
            feasible: eval.feasible,
            accepted,
            temperature,
        })
    }
}

/// Random-walk baseline chain.
pub struct RwChain<'t, T: Target + ?Sized> {
    target: &'t T,
    cfg: RwConfig,
    schedule: AnnealingSchedule,
    current: Grasp,
    current_eval: Evaluation,
    iter: usize,
}

impl<'t, T: Target + ?Sized> RwChain<'t, T> {
    pub fn start(target: &'t T, cfg: RwConfig, start: Grasp) -> Result<(Self, ChainRecord)> {
        cfg.validate()?;
        let eval = evaluate_start(target, &start)?;
        let schedule = cfg.schedule();
        let record = initial_record(start, eval, schedule.temperature(0));
        Ok((
            Self {
                target,
                cfg,
                schedule,
                current: start,
                current_eval: eval,
                iter: 0,
            },
            record,
        ))
    }

    pub fn current(&self) -> &Grasp {
        &self.current
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<ChainRecord> {
        self.iter += 1;
        let j = self.iter;
        let temperature = self.schedule.temperature(j);
        let proposal = rw_step(&self.current, &self.cfg, rng)?;
        let eval = self.target.evaluate(&proposal)?;
        let u: f64 = rng.random();
        // Both proposal kernels are symmetric, so the q terms cancel.
        let accepted = accept_log(
            eval.measure.ln(),
            self.current_eval.measure.ln(),
            0.0,
            0.0,
            temperature,
            self.cfg.annealing,
            u,
        )?;
        if accepted {
            self.current = proposal;
            self.current_eval = eval;
        }
        Ok(ChainRecord {
            iter: j,
            proposal,
            measure: eval.measure,
            feasible: eval.feasible,
            accepted,
            temperature,
        })
    }
}

/// A run that stopped early; `partial` holds every record produced so far
/// and is marked aborted.
#[derive(Debug)]
pub struct ChainFailure {
    pub partial: Box<ChainHistory>,
    pub error: Error,
}

impl fmt::Display for ChainFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "chain aborted after {} records: {}",
            self.partial.records.len(),
            self.error
        )
    }
}

impl std::error::Error for ChainFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl From<ChainFailure> for Error {
    fn from(f: ChainFailure) -> Self {
        f.error
    }
}

/// Runs `n_iters` iterations of the configured sampler from `init`.
///
/// The chain RNG is seeded from `seed`; identical inputs give identical
/// histories.
pub fn run_chain<T: Target + ?Sized>(
    target: &T,
    init: &InitSpec,
    cfg: &SamplerConfig,
    object: &str,
    seed: u64,
) -> std::result::Result<ChainHistory, ChainFailure> {
    let mut meta = HistoryMeta::new(object, seed, cfg);
    meta.init = init.mode();
    let fail = |meta: &HistoryMeta, records: Vec<ChainRecord>, error: Error| {
        let mut partial = ChainHistory {
            meta: meta.clone(),
            records,
        };
        partial.meta.status = RunStatus::Aborted;
        ChainFailure {
            partial: Box::new(partial),
            error,
        }
    };
    if let Err(e) = cfg.validate() {
        return Err(fail(&meta, Vec::new(), e));
    }
    let mut rng = chain_rng(seed);
    let mut records = Vec::with_capacity(cfg.n_iters() + 1);

    match cfg {
        SamplerConfig::Rw(rw) => {
            let start = match init {
                InitSpec::Random => target.random_grasp(&mut rng),
                InitSpec::Explicit { start } => *start,
                InitSpec::Chain { history, start } => match resolve_start(history, start, &mut rng) {
                    Ok(g) => g,
                    Err(e) => return Err(fail(&meta, records, e)),
                },
                InitSpec::Subsample { .. } => {
                    let e = Error::BadConfig("subsample initialization requires the kameleon sampler".into());
                    return Err(fail(&meta, records, e));
                }
            };
            let (mut chain, first) = match RwChain::start(target, rw.clone(), start) {
                Ok(v) => v,
                Err(e) => return Err(fail(&meta, records, e)),
            };
            records.push(first);
            for _ in 0..rw.n_iters {
                match chain.step(&mut rng) {
                    Ok(r) => records.push(r),
                    Err(e) => return Err(fail(&meta, records, e)),
                }
            }
        }
        SamplerConfig::Kameleon(k) => {
            let resolved = match resolve_kameleon_init(target, init, k, &mut rng) {
                Ok(v) => v,
                Err(e) => return Err(fail(&meta, records, e)),
            };
            let (mut chain, first) = match KameleonChain::start(
                target,
                k.clone(),
                resolved.start,
                resolved.accepted,
                resolved.proposals,
                resolved.fixed,
            ) {
                Ok(v) => v,
                Err(e) => return Err(fail(&meta, records, e)),
            };
            records.push(first);
            for _ in 0..k.n_iters {
                match chain.step(&mut rng) {
                    Ok(r) => records.push(r),
                    Err(e) => {
                        meta.frozen_subsample = chain.frozen().map(subsample_to_rows);
                        return Err(fail(&meta, records, e));
                    }
                }
            }
            meta.frozen_subsample = chain.frozen().map(subsample_to_rows);
        }
    }
    Ok(ChainHistory { meta, records })
}

pub(crate) fn subsample_to_rows(z: &Subsample) -> Vec<[f64; 7]> {
    z.states()
        .iter()
        .map(|s| {
            let mut row = [0.0; 7];
            row.copy_from_slice(s.as_slice());
            row
        })
        .collect()
}

struct ResolvedInit {
    start: Grasp,
    accepted: Vec<State>,
    proposals: Vec<State>,
    fixed: Option<Subsample>,
}

fn resolve_start<R: Rng + ?Sized>(
    history: &ChainHistory,
    start: &ChainStart,
    rng: &mut R,
) -> Result<Grasp> {
    match *start {
        ChainStart::Index(i) => history
            .records
            .get(i)
            .map(|r| r.proposal)
            .ok_or_else(|| Error::BadConfig(format!("start index {i} out of range"))),
        ChainStart::Random => {
            let accepted: Vec<&ChainRecord> = history.accepted().collect();
            if accepted.is_empty() {
                return Err(Error::NoAcceptedStates);
            }
            Ok(accepted[rng.random_range(0..accepted.len())].proposal)
        }
    }
}

fn resolve_kameleon_init<T: Target + ?Sized, R: Rng>(
    target: &T,
    init: &InitSpec,
    cfg: &KameleonConfig,
    rng: &mut R,
) -> Result<ResolvedInit> {
    Ok(match init {
        InitSpec::Random => {
            // A randomly generated chain of subsample_size states; the run
            // starts from its last element.
            let prior: Vec<State> = (0..cfg.subsample_size)
                .map(|_| target.random_grasp(rng).to_state())
                .collect();
            let last = *prior.last().expect("subsample_size >= 1");
            ResolvedInit {
                start: Grasp::from_state(&last)?,
                accepted: prior[..prior.len() - 1].to_vec(),
                proposals: prior[..prior.len() - 1].to_vec(),
                fixed: None,
            }
        }
        InitSpec::Explicit { start } => ResolvedInit {
            start: *start,
            accepted: Vec::new(),
            proposals: Vec::new(),
            fixed: None,
        },
        InitSpec::Chain { history, start } => {
            if history.records.is_empty() {
                return Err(Error::NoInit);
            }
            ResolvedInit {
                start: resolve_start(history, start, rng)?,
                accepted: history.accepted_states(),
                proposals: history.proposal_states(),
                fixed: None,
            }
        }
        InitSpec::Subsample { z, start } => {
            if cfg.burn_in > 0 {
                return Err(Error::SubsampleModeForbidsBurnin(cfg.burn_in));
            }
            ResolvedInit {
                start: *start,
                accepted: Vec::new(),
                proposals: Vec::new(),
                fixed: Some(z.clone()),
            }
        }
    })
}

/// Runs one chain per job on a pool of `workers` threads. Each worker owns
/// its chain; only `target` is shared. Results come back in job order.
pub fn run_chains<T: Target + ?Sized>(
    target: &T,
    jobs: &[(InitSpec, SamplerConfig, String, u64)],
    workers: usize,
) -> Vec<std::result::Result<ChainHistory, ChainFailure>> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<_>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers.max(1).min(jobs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((init, cfg, object, seed)) = jobs.get(i) else {
                    break;
                };
                let out = run_chain(target, init, cfg, object, *seed);
                *slots[i].lock().expect("slot lock") = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot lock").expect("every job ran"))
        .collect()
}

impl InitSpec {
    pub fn mode(&self) -> InitMode {
        match self {
            InitSpec::Random => InitMode::Random,
            InitSpec::Explicit { .. } => InitMode::Explicit,
            InitSpec::Chain { .. } => InitMode::Chain,
            InitSpec::Subsample { .. } => InitMode::Subsample,
        }
    }
}
