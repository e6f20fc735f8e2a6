use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Lowest tolerable grasp quality; also the ceiling of the heuristic measure.
pub const DEFAULT_MIN_GWS: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicParams {
    pub min_gws: f64,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        Self {
            min_gws: DEFAULT_MIN_GWS,
        }
    }
}

impl HeuristicParams {
    pub fn new(min_gws: f64) -> Result<Self> {
        if !(min_gws > 0.0 && min_gws.is_finite()) {
            return Err(Error::BadParams(format!("min_gws {min_gws} must be > 0")));
        }
        Ok(Self { min_gws })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicMeasure {
    pub measure: f64,
    /// Set when `theta` or `d` was outside its domain and got clamped.
    pub clamped: bool,
}

/// Pseudo-measure for an infeasible grasp at distance `d` from its closest
/// rim point with approach angle `theta`: `min_gws / (1 + d (pi - theta))`.
pub fn heuristic_measure(theta: f64, d: f64, params: &HeuristicParams) -> HeuristicMeasure {
    let t = theta.clamp(0.0, PI);
    let dd = d.max(0.0);
    HeuristicMeasure {
        measure: params.min_gws / (1.0 + dd * (PI - t)),
        clamped: t != theta || dd != d,
    }
}

/// Divides every measure by their sum.
pub fn normalize_measures(measures: &[f64]) -> Result<Vec<f64>> {
    if measures.is_empty() {
        return Err(Error::NothingToNormalize);
    }
    if let Some(m) = measures.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
        return Err(Error::BadParams(format!("measure {m} must be positive")));
    }
    let z: f64 = measures.iter().sum();
    Ok(measures.iter().map(|m| m / z).collect())
}
