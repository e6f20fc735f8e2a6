use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::accept::AnnealingMode;
use super::schedule::AnnealingSchedule;
use crate::error::{Error, Result};
use crate::geometry::State;
use crate::kernel::{KernelConfig, Subsample};

/// Kernel bandwidth rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Bandwidth {
    /// Median pairwise distance of the current subsample.
    #[default]
    Median,
    Fixed(f64),
}

/// Gradient step size rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EtaRule {
    /// Use `eta` as given.
    #[default]
    Fixed,
    /// `eta = sigma^2 / (2 sqrt(n))` for the current bandwidth and subsample
    /// size; the covariance term becomes `nu^2` times the kernel-weighted
    /// scatter of the subsample about the current state, divided by `n`.
    Normalized,
}

/// Random-walk baseline: Gaussian position step, von Mises-Fisher orientation step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RwConfig {
    pub n_iters: usize,
    /// Position proposal covariance, m^2, row-major.
    pub sigma_pos: [[f64; 3]; 3],
    pub kappa: f64,
    pub t0: f64,
    pub tn: f64,
    #[serde(default)]
    pub annealing: AnnealingMode,
}

impl Default for RwConfig {
    fn default() -> Self {
        Self {
            n_iters: 5000,
            sigma_pos: [[0.01, 0.0, 0.0], [0.0, 0.01, 0.0], [0.0, 0.0, 0.01]],
            kappa: 5.0,
            t0: 1.0,
            tn: 0.05,
            annealing: AnnealingMode::Cooling,
        }
    }
}

impl RwConfig {
    pub fn sigma_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.sigma_pos[i][j])
    }

    pub fn schedule(&self) -> AnnealingSchedule {
        AnnealingSchedule {
            t0: self.t0,
            tn: self.tn,
            n_iters: self.n_iters.max(1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        AnnealingSchedule::new(self.t0, self.tn, self.n_iters.max(1))?;
        let s = self.sigma_matrix();
        if (s - s.transpose()).amax() > 1e-12 || s.cholesky().is_none() {
            return Err(Error::BadConfig(
                "sigma_pos must be symmetric positive definite".into(),
            ));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::BadConfig(format!("kappa {} must be >= 0", self.kappa)));
        }
        Ok(())
    }
}

/// Kernel-adaptive sampler parameters. Defaults are the published settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KameleonConfig {
    pub n_iters: usize,
    pub burn_in: usize,
    pub subsample_size: usize,
    pub gamma: f64,
    pub nu: f64,
    pub eta: f64,
    #[serde(default)]
    pub bandwidth: Bandwidth,
    #[serde(default)]
    pub eta_rule: EtaRule,
    /// Per-coordinate kernel scaling (`x y z qw qx qy qz`).
    #[serde(default = "unit_weights")]
    pub weights: [f64; 7],
    /// Coordinates the proposal may move; the rest stay pinned.
    #[serde(default = "all_active")]
    pub active: [bool; 7],
    pub t0: f64,
    pub tn: f64,
    #[serde(default)]
    pub annealing: AnnealingMode,
}

fn unit_weights() -> [f64; 7] {
    [1.0; 7]
}

fn all_active() -> [bool; 7] {
    [true; 7]
}

impl Default for KameleonConfig {
    fn default() -> Self {
        Self {
            n_iters: 5000,
            burn_in: 1000,
            subsample_size: 200,
            gamma: 1e-4,
            nu: 2.38 / 6f64.sqrt(),
            eta: 1.0,
            bandwidth: Bandwidth::Median,
            eta_rule: EtaRule::Fixed,
            weights: unit_weights(),
            active: all_active(),
            t0: 1.0,
            tn: 0.05,
            annealing: AnnealingMode::Cooling,
        }
    }
}

impl KameleonConfig {
    pub fn schedule(&self) -> AnnealingSchedule {
        AnnealingSchedule {
            t0: self.t0,
            tn: self.tn,
            n_iters: self.n_iters.max(1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        AnnealingSchedule::new(self.t0, self.tn, self.n_iters.max(1))?;
        if self.burn_in > self.n_iters {
            return Err(Error::BadConfig(format!(
                "burn_in {} exceeds n_iters {}",
                self.burn_in, self.n_iters
            )));
        }
        if self.subsample_size == 0 {
            return Err(Error::BadConfig("subsample_size must be >= 1".into()));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::BadGamma(self.gamma));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::BadConfig(format!("nu {} must be > 0", self.nu)));
        }
        if let Bandwidth::Fixed(s) = self.bandwidth {
            KernelConfig::new(s, self.eta)?;
        } else {
            KernelConfig::new(1.0, self.eta)?;
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::BadConfig("kernel weights must be positive".into()));
        }
        if !self.active.iter().any(|&a| a) {
            return Err(Error::BadConfig("at least one coordinate must be active".into()));
        }
        Ok(())
    }

    /// Published settings with [`EtaRule::Normalized`] and the given bandwidth.
    pub fn normalized(bandwidth: Bandwidth) -> Self {
        Self {
            bandwidth,
            eta_rule: EtaRule::Normalized,
            ..Self::default()
        }
    }

    /// Kernel for a given subsample under the bandwidth rule.
    pub fn kernel_for(&self, z: &Subsample) -> KernelConfig {
        let weights = State::from_column_slice(&self.weights);
        let sigma = match self.bandwidth {
            Bandwidth::Fixed(s) => s,
            Bandwidth::Median => z.median_distance(&weights).unwrap_or(1.0),
        };
        let eta = match self.eta_rule {
            EtaRule::Fixed => self.eta,
            EtaRule::Normalized => sigma * sigma / (2.0 * (z.len().max(1) as f64).sqrt()),
        };
        KernelConfig {
            sigma,
            eta,
            weights,
        }
    }

    pub(crate) fn active_indices(&self) -> Vec<usize> {
        (0..7).filter(|&i| self.active[i]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Rw,
    Kameleon,
}

impl SamplerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplerKind::Rw => "rw",
            SamplerKind::Kameleon => "kameleon",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SamplerConfig {
    Rw(RwConfig),
    Kameleon(KameleonConfig),
}

impl SamplerConfig {
    pub fn kind(&self) -> SamplerKind {
        match self {
            SamplerConfig::Rw(_) => SamplerKind::Rw,
            SamplerConfig::Kameleon(_) => SamplerKind::Kameleon,
        }
    }

    pub fn n_iters(&self) -> usize {
        match self {
            SamplerConfig::Rw(c) => c.n_iters,
            SamplerConfig::Kameleon(c) => c.n_iters,
        }
    }

    pub fn burn_in(&self) -> usize {
        match self {
            SamplerConfig::Rw(_) => 0,
            SamplerConfig::Kameleon(c) => c.burn_in,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SamplerConfig::Rw(c) => c.validate(),
            SamplerConfig::Kameleon(c) => c.validate(),
        }
    }

    pub fn to_params(&self) -> serde_json::Value {
        match self {
            SamplerConfig::Rw(c) => serde_json::to_value(c),
            SamplerConfig::Kameleon(c) => serde_json::to_value(c),
        }
        .expect("sampler configs serialize")
    }

    pub fn from_params(kind: SamplerKind, params: &serde_json::Value) -> Result<Self> {
        let bad = |e: serde_json::Error| Error::BadConfig(format!("params: {e}"));
        Ok(match kind {
            SamplerKind::Rw => SamplerConfig::Rw(serde_json::from_value(params.clone()).map_err(bad)?),
            SamplerKind::Kameleon => {
                SamplerConfig::Kameleon(serde_json::from_value(params.clone()).map_err(bad)?)
            }
        })
    }
}
