use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometric cooling from `t0` at iteration 0 to `tn` at iteration `n_iters`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealingSchedule {
    pub t0: f64,
    pub tn: f64,
    pub n_iters: usize,
}

impl AnnealingSchedule {
    pub fn new(t0: f64, tn: f64, n_iters: usize) -> Result<Self> {
        if !(tn > 0.0 && tn <= t0 && t0.is_finite()) {
            return Err(Error::BadConfig(format!(
                "annealing needs 0 < tn <= t0, got t0={t0} tn={tn}"
            )));
        }
        if n_iters == 0 {
            return Err(Error::BadConfig("annealing needs n_iters >= 1".into()));
        }
        Ok(Self { t0, tn, n_iters })
    }

    /// `T = 1` throughout.
    pub fn constant(n_iters: usize) -> Self {
        Self {
            t0: 1.0,
            tn: 1.0,
            n_iters: n_iters.max(1),
        }
    }

    /// `max(tn, t0 * (tn / t0)^(j / n))`; iterations past `n` clamp to `tn`.
    pub fn temperature(&self, j: usize) -> f64 {
        if j == 0 {
            return self.t0;
        }
        if j >= self.n_iters {
            return self.tn;
        }
        let frac = j as f64 / self.n_iters as f64;
        (self.t0 * (self.tn / self.t0).powf(frac)).max(self.tn)
    }
}

pub fn temperature(j: usize, sched: &AnnealingSchedule) -> f64 {
    sched.temperature(j)
}
