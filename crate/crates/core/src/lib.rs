//! Learning gripper poses with kernel-adaptive Metropolis-Hastings and
//! simulated annealing.
//!
//! Grasps are 7D states (position and unit quaternion). The target density
//! is a grasp-quality oracle on feasible grasps and a rim-distance heuristic
//! elsewhere; chains can be seeded from earlier runs on similar objects.

pub mod error;
pub mod experiment;
pub mod geometry;
pub mod kernel;
pub mod model;
pub mod report;
pub mod sampler;
pub mod transfer;

pub use error::{Error, Result};
pub use geometry::{Grasp, PointCloud, RimDetectionParams, RimSet, State};
pub use kernel::{proposal_covariance, KernelConfig, Subsample};
pub use model::{ObjectKind, ObjectSpec, SyntheticObject, TargetDensity};
pub use sampler::{
    run_chain, ChainHistory, ChainRecord, KameleonConfig, RwConfig, SamplerConfig, Target,
};
pub use transfer::{ChainStart, InitSpec};
