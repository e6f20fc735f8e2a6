use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use super::config::KameleonConfig;
use super::history::ChainHistory;
use crate::error::{Error, Result};
use crate::geometry::{Grasp, State};
use crate::kernel::{proposal_covariance, robust_cholesky, KernelConfig, Matrix7, Subsample};

const LN_2PI: f64 = 1.8378770664093453;

/// Gaussian centered at a state, restricted to the active coordinates.
#[derive(Debug, Clone)]
pub struct LocalGaussian {
    center: State,
    active: Vec<usize>,
    chol: DMatrix<f64>,
    ln_norm: f64,
}

impl LocalGaussian {
    pub fn new(center: State, cov: &Matrix7, active: &[usize], floor: f64) -> Self {
        let k = active.len();
        let sub = DMatrix::from_fn(k, k, |i, j| cov[(active[i], active[j])]);
        let chol = robust_cholesky(&sub, floor);
        let ln_det_half: f64 = chol.diagonal().iter().map(|d| d.ln()).sum();
        Self {
            center,
            active: active.to_vec(),
            chol,
            ln_norm: -0.5 * k as f64 * LN_2PI - ln_det_half,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> State {
        let eps = DVector::from_fn(self.active.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
        let step = &self.chol * eps;
        let mut x = self.center;
        for (i, &c) in self.active.iter().enumerate() {
            x[c] += step[i];
        }
        x
    }

    /// Log density over the active coordinates; pinned coordinates are ignored.
    pub fn ln_density(&self, x: &State) -> f64 {
        let diff = DVector::from_iterator(
            self.active.len(),
            self.active.iter().map(|&c| x[c] - self.center[c]),
        );
        let w = self
            .chol
            .solve_lower_triangular(&diff)
            .expect("cholesky factor has a positive diagonal");
        self.ln_norm - 0.5 * w.norm_squared()
    }
}

/// Result of one kernel-adaptive proposal.
#[derive(Debug, Clone)]
pub struct KameleonProposal {
    /// 7D Gaussian draw before quaternion renormalization.
    pub raw: State,
    pub proposal: Grasp,
    /// `ln q(raw | current)` under the covariance at the current state.
    pub ln_q_fwd: f64,
    /// `ln q(current | raw)` under the covariance at the raw draw.
    pub ln_q_rev: f64,
}

impl KameleonProposal {
    pub fn q_fwd(&self) -> f64 {
        self.ln_q_fwd.exp()
    }

    pub fn q_rev(&self) -> f64 {
        self.ln_q_rev.exp()
    }
}

/// Local proposal Gaussian at `center` for a fixed subsample and kernel.
pub fn local_gaussian(
    center: &State,
    z: &Subsample,
    kernel: &KernelConfig,
    cfg: &KameleonConfig,
    active: &[usize],
) -> Result<LocalGaussian> {
    let cov = proposal_covariance(z, center, cfg.gamma, cfg.nu, kernel)?;
    Ok(LocalGaussian::new(
        *center,
        cov.matrix(),
        active,
        cfg.gamma * cfg.gamma,
    ))
}

/// Draws from `N(current, gamma^2 I + nu^2 M H M^T)` and evaluates both
/// proposal densities.
pub fn propose_with_subsample<R: Rng + ?Sized>(
    current: &Grasp,
    z: &Subsample,
    kernel: &KernelConfig,
    cfg: &KameleonConfig,
    rng: &mut R,
) -> Result<KameleonProposal> {
    let active = cfg.active_indices();
    let here = current.to_state();
    let fwd = local_gaussian(&here, z, kernel, cfg, &active)?;
    let raw = fwd.sample(rng);
    let proposal = Grasp::from_state(&raw)?;
    let rev = local_gaussian(&raw, z, kernel, cfg, &active)?;
    Ok(KameleonProposal {
        raw,
        proposal,
        ln_q_fwd: fwd.ln_density(&raw),
        ln_q_rev: rev.ln_density(&here),
    })
}

/// Uniform draw without replacement of `min(size, |pool|)` states from the
/// accepted states, falling back to all proposals when fewer than two
/// states were accepted.
pub fn draw_subsample<R: Rng + ?Sized>(
    accepted: &[State],
    proposals: &[State],
    size: usize,
    rng: &mut R,
) -> Subsample {
    let pool = if accepted.len() >= 2 { accepted } else { proposals };
    let k = size.min(pool.len());
    Subsample(
        index::sample(rng, pool.len(), k)
            .into_iter()
            .map(|i| pool[i])
            .collect(),
    )
}

/// One proposal drawn against a fresh subsample of `history`.
pub fn kameleon_step<R: Rng + ?Sized>(
    current: &Grasp,
    history: &ChainHistory,
    cfg: &KameleonConfig,
    rng: &mut R,
) -> Result<(KameleonProposal, Subsample)> {
    if history.records.is_empty() {
        return Err(Error::NoInit);
    }
    let z = draw_subsample(
        &history.accepted_states(),
        &history.proposal_states(),
        cfg.subsample_size,
        rng,
    );
    let kernel = cfg.kernel_for(&z);
    let p = propose_with_subsample(current, &z, &kernel, cfg, rng)?;
    Ok((p, z))
}
