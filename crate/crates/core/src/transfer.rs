//! Initializing chains from earlier runs: full history reuse (chain mode)
//! or reuse of the subsample frozen at the end of burn-in (subsample mode).

use std::path::Path;

use nalgebra::Vector3;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Grasp;
use crate::kernel::Subsample;
use crate::sampler::{
    run_chain, ChainFailure, ChainHistory, KameleonConfig, SamplerConfig, Target, TransferMode,
};

/// Where a chain-mode run starts within the donor history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainStart {
    /// Record index into the donor history.
    Index(usize),
    /// Uniform over accepted records, drawn from the receiving chain's RNG.
    Random,
}

/// How a chain is initialized.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    /// Kameleon: a random chain of `subsample_size` states. RW: one random grasp.
    Random,
    Explicit { start: Grasp },
    /// The donor history becomes the receiving run's pre-existing history.
    Chain { history: ChainHistory, start: ChainStart },
    /// Fixed subsample, never refreshed. Requires `burn_in == 0`.
    Subsample { z: Subsample, start: Grasp },
}

pub fn save_history(history: &ChainHistory, path: impl AsRef<Path>) -> Result<()> {
    crate::sampler::io::save_history(history, path)
}

pub fn load_history(path: impl AsRef<Path>) -> Result<ChainHistory> {
    crate::sampler::io::load_history(path)
}

/// Chain-mode init starting at an accepted record drawn uniformly.
pub fn init_from_chain<R: Rng + ?Sized>(history: &ChainHistory, rng: &mut R) -> Result<InitSpec> {
    let accepted: Vec<usize> = history
        .records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.accepted)
        .map(|(i, _)| i)
        .collect();
    if accepted.is_empty() {
        return Err(Error::NoAcceptedStates);
    }
    let i = accepted[rng.random_range(0..accepted.len())];
    Ok(InitSpec::Chain {
        history: history.clone(),
        start: ChainStart::Index(i),
    })
}

/// Subsample-mode init from the donor's frozen subsample, starting at its
/// last element.
pub fn init_from_subsample(history: &ChainHistory) -> Result<InitSpec> {
    let z = history.meta.frozen().ok_or(Error::NoFrozenSubsample)?;
    let last = z.states().last().ok_or(Error::NoFrozenSubsample)?;
    let row: [f64; 7] = last.as_slice().try_into().expect("7D state");
    let start = Grasp::from_array(row)?;
    Ok(InitSpec::Subsample { z, start })
}

/// Receiving config for subsample mode: no burn-in, and unless overridden
/// the donor's post-burn-in iteration count.
pub fn subsample_config(donor: &ChainHistory, base: &KameleonConfig, n_iters: Option<usize>) -> KameleonConfig {
    let donor_n = donor.records.len().saturating_sub(1);
    let default_n = donor_n.saturating_sub(donor.meta.burn_in()).max(1);
    KameleonConfig {
        burn_in: 0,
        n_iters: n_iters.unwrap_or(default_n),
        ..base.clone()
    }
}

/// Options for [`transfer_experiment`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransferOptions {
    /// Uniform scale applied to donor positions before reuse. Off by default:
    /// size mismatch between objects is left uncorrected.
    pub scale: Option<f64>,
    /// Iteration budget in subsample mode; defaults to donor N minus donor burn-in.
    pub subsample_iters: Option<usize>,
}

fn scale_history(h: &ChainHistory, k: f64) -> ChainHistory {
    let mut out = h.clone();
    for r in &mut out.records {
        r.proposal.position *= k;
    }
    if let Some(z) = &mut out.meta.frozen_subsample {
        for row in z.iter_mut() {
            for v in row.iter_mut().take(3) {
                *v *= k;
            }
        }
    }
    out
}

fn maybe_scaled(donor: &ChainHistory, opts: &TransferOptions) -> ChainHistory {
    match opts.scale {
        Some(k) => scale_history(donor, k),
        None => donor.clone(),
    }
}

/// Initialization and receiving config for a transfer from `donor`.
pub fn transfer_init(
    donor: &ChainHistory,
    mode: TransferMode,
    cfg: &KameleonConfig,
    opts: &TransferOptions,
) -> Result<(InitSpec, KameleonConfig)> {
    let donor = maybe_scaled(donor, opts);
    match mode {
        TransferMode::Chain => {
            if donor.accepted().next().is_none() {
                return Err(Error::NoAcceptedStates);
            }
            Ok((
                InitSpec::Chain {
                    history: donor,
                    start: ChainStart::Random,
                },
                cfg.clone(),
            ))
        }
        TransferMode::Subsample => {
            let cfg = subsample_config(&donor, cfg, opts.subsample_iters);
            Ok((init_from_subsample(&donor)?, cfg))
        }
    }
}

/// Records the donor and transfer mode in `h`'s metadata.
pub fn tag_transfer(h: &mut ChainHistory, donor: &ChainHistory, mode: TransferMode) {
    h.meta.donor = Some(format!("{}:seed={}", donor.meta.object, donor.meta.seed));
    h.meta.transfer_mode = Some(mode);
}

/// Runs Kameleon on `target` initialized from `donor`. The donor history is
/// only read. Provenance is recorded in the returned metadata.
pub fn transfer_experiment<T: Target + ?Sized>(
    donor: &ChainHistory,
    target: &T,
    object: &str,
    mode: TransferMode,
    cfg: &KameleonConfig,
    opts: &TransferOptions,
    seed: u64,
) -> std::result::Result<ChainHistory, ChainFailure> {
    let (init, cfg) = match transfer_init(donor, mode, cfg, opts) {
        Ok(v) => v,
        Err(error) => {
            let partial = aborted(object, seed, &SamplerConfig::Kameleon(cfg.clone()));
            return Err(ChainFailure {
                partial: Box::new(partial),
                error,
            });
        }
    };
    match run_chain(target, &init, &SamplerConfig::Kameleon(cfg), object, seed) {
        Ok(mut h) => {
            tag_transfer(&mut h, donor, mode);
            Ok(h)
        }
        Err(mut f) => {
            tag_transfer(&mut f.partial, donor, mode);
            Err(f)
        }
    }
}

fn aborted(object: &str, seed: u64, cfg: &SamplerConfig) -> ChainHistory {
    let mut meta = crate::sampler::HistoryMeta::new(object, seed, cfg);
    meta.status = crate::sampler::RunStatus::Aborted;
    ChainHistory {
        meta,
        records: Vec::new(),
    }
}

/// Root-mean-square distance of `points` from their centroid.
pub fn rms_radius(points: &[Vector3<f64>]) -> Option<f64> {
    if points.is_empty() {
        return None;
    }
    let c = points.iter().sum::<Vector3<f64>>() / points.len() as f64;
    let ms = points.iter().map(|p| (p - c).norm_squared()).sum::<f64>() / points.len() as f64;
    Some(ms.sqrt())
}
