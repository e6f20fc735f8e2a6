use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the temperature enters the acceptance probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnealingMode {
    /// `alpha = min(1, r)^(1/T)`: poor proposals are accepted less as `T` falls.
    #[default]
    Cooling,
    /// `alpha = min(1, r)^T`, the exponent taken literally.
    Literal,
}

impl AnnealingMode {
    pub fn exponent(self, temperature: f64) -> f64 {
        match self {
            AnnealingMode::Cooling => 1.0 / temperature,
            AnnealingMode::Literal => temperature,
        }
    }
}

/// `ln alpha` for the log MH ratio `ln(pi_new q_rev) - ln(pi_cur q_fwd)`.
pub fn log_acceptance(log_ratio: f64, temperature: f64, mode: AnnealingMode) -> f64 {
    if log_ratio >= 0.0 {
        0.0
    } else {
        log_ratio * mode.exponent(temperature)
    }
}

/// Annealed MH decision from log densities and a uniform draw `u`.
pub fn accept_log(
    ln_pi_new: f64,
    ln_pi_cur: f64,
    ln_q_fwd: f64,
    ln_q_rev: f64,
    temperature: f64,
    mode: AnnealingMode,
    u: f64,
) -> Result<bool> {
    if ln_pi_cur == f64::NEG_INFINITY {
        return Err(Error::ZeroCurrentDensity);
    }
    let log_ratio = (ln_pi_new + ln_q_rev) - (ln_pi_cur + ln_q_fwd);
    if log_ratio.is_nan() {
        return Ok(false);
    }
    Ok(u.ln() < log_acceptance(log_ratio, temperature, mode))
}

/// Annealed Metropolis-Hastings acceptance from plain densities.
pub fn mh_accept<R: Rng + ?Sized>(
    pi_new: f64,
    pi_cur: f64,
    q_fwd: f64,
    q_rev: f64,
    temperature: f64,
    mode: AnnealingMode,
    rng: &mut R,
) -> Result<bool> {
    if pi_cur <= 0.0 {
        return Err(Error::ZeroCurrentDensity);
    }
    let u: f64 = rng.random();
    accept_log(
        pi_new.ln(),
        pi_cur.ln(),
        q_fwd.ln(),
        q_rev.ln(),
        temperature,
        mode,
        u,
    )
}
