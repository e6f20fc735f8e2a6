//! Target density over grasps: oracle quality for feasible grasps and the
//! rim heuristic for infeasible ones.

mod heuristic;
mod synthetic;
mod target;

pub use heuristic::{
    heuristic_measure, normalize_measures, HeuristicMeasure, HeuristicParams, DEFAULT_MIN_GWS,
};
pub use synthetic::{
    synthetic_oracle, Dimensions, ObjectKind, ObjectSpec, OracleTolerances, Sampling, Shape,
    SyntheticObject, SyntheticOracle,
};
pub use target::{random_orientation, Quality, QualityOracle, Region, TargetDensity};
