//! Poses, point clouds, rim detection and the rim-relative quantities used by
//! the heuristic grasp measure.

mod align;
mod cloud;
mod grasp;
mod kdtree;
mod rims;

pub use align::{align_to_canonical, Alignment};
pub use cloud::PointCloud;
pub use grasp::{approach_angle, quat_geodesic, ApproachAngle, Grasp, State, APPROACH_AXIS};
pub(crate) use grasp::angle_between;
pub use kdtree::KdTree;
pub use rims::{
    detect_rim_indices, detect_rims, detect_rims_from, nearest_rim, rim_scores, NearestRim,
    RimDetectionParams, RimSet,
};
