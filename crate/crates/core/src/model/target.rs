use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use super::heuristic::{heuristic_measure, HeuristicParams};
use crate::error::{Error, Result};
use crate::geometry::{approach_angle, nearest_rim, Grasp, RimSet};
use crate::sampler::{Evaluation, Target};

/// Outcome of a grasp-quality evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quality {
    Feasible(f64),
    Infeasible,
}

/// Grasp quality evaluator (a simulator or an analytic stand-in).
///
/// Implementations must be deterministic per grasp and either stateless or
/// internally synchronized: chains evaluate them from several threads.
pub trait QualityOracle: Send + Sync {
    fn evaluate(&self, g: &Grasp) -> Result<Quality>;
}

impl<O: QualityOracle + ?Sized> QualityOracle for Box<O> {
    fn evaluate(&self, g: &Grasp) -> Result<Quality> {
        (**self).evaluate(g)
    }
}

/// Axis-aligned box random grasps are drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl Region {
    /// Bounding box of `points` grown by `margin` on every side.
    pub fn around(points: &[Vector3<f64>], margin: f64) -> Option<Self> {
        let first = points.first()?;
        let (lo, hi) = points
            .iter()
            .fold((*first, *first), |(lo, hi), p| (lo.inf(p), hi.sup(p)));
        Some(Self {
            min: lo - Vector3::repeat(margin),
            max: hi + Vector3::repeat(margin),
        })
    }

    pub fn volume(&self) -> f64 {
        (self.max - self.min).product()
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector3<f64> {
        Vector3::from_fn(|i, _| rng.random_range(self.min[i]..=self.max[i]))
    }
}

/// Uniformly distributed rotation.
pub fn random_orientation<R: Rng + ?Sized>(rng: &mut R) -> UnitQuaternion<f64> {
    loop {
        let q = Quaternion::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if q.norm() > 1e-9 {
            return UnitQuaternion::new_normalize(q);
        }
    }
}

/// Target density over grasps: oracle quality when feasible, the rim
/// heuristic otherwise.
///
/// `region` is the workspace. Grasps positioned outside it lie outside the
/// state space and get density zero, so proposals there are always
/// rejected; everywhere inside the density is strictly positive.
pub struct TargetDensity<O> {
    pub oracle: O,
    pub rims: RimSet,
    pub heuristic: HeuristicParams,
    pub region: Region,
}

impl<O: QualityOracle> TargetDensity<O> {
    pub fn new(oracle: O, rims: RimSet, heuristic: HeuristicParams, region: Region) -> Result<Self> {
        if rims.is_empty() {
            return Err(Error::NoRims);
        }
        Ok(Self {
            oracle,
            rims,
            heuristic,
            region,
        })
    }

    /// `(measure, feasible)`; the measure is strictly positive inside the
    /// workspace.
    pub fn evaluate_target(&self, g: &Grasp) -> Result<(f64, bool)> {
        if !self.region.contains(&g.position) {
            return Ok((0.0, false));
        }
        match self.oracle.evaluate(g)? {
            Quality::Feasible(q) => Ok((q.max(self.heuristic.min_gws), true)),
            Quality::Infeasible => {
                let hit = nearest_rim(&g.position, &self.rims)?;
                let theta = approach_angle(g, &hit.point).theta;
                Ok((heuristic_measure(theta, hit.distance, &self.heuristic).measure, false))
            }
        }
    }
}

impl<O: QualityOracle> Target for TargetDensity<O> {
    fn evaluate(&self, g: &Grasp) -> Result<Evaluation> {
        let (measure, feasible) = self.evaluate_target(g)?;
        Ok(Evaluation { measure, feasible })
    }

    fn random_grasp(&self, rng: &mut dyn RngCore) -> Grasp {
        let position = self.region.sample(rng);
        Grasp::new(position, random_orientation(rng))
    }
}
