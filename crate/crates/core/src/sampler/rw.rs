use nalgebra::{UnitQuaternion, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use super::config::RwConfig;
use super::vmf::sample_vmf;
use crate::error::{Error, Result};
use crate::geometry::Grasp;

/// One random-walk proposal: Gaussian position step with covariance
/// `sigma_pos`, vMF orientation draw centered on the current orientation.
pub fn rw_step<R: Rng + ?Sized>(current: &Grasp, cfg: &RwConfig, rng: &mut R) -> Result<Grasp> {
    let chol = cfg
        .sigma_matrix()
        .cholesky()
        .ok_or_else(|| Error::BadConfig("sigma_pos is not positive definite".into()))?;
    let eps = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    let position = current.position + chol.l() * eps;
    let q = sample_vmf(current.orientation.quaternion(), cfg.kappa, rng)?;
    Ok(Grasp::new(position, UnitQuaternion::new_normalize(q)))
}
