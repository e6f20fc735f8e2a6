use nalgebra::{Quaternion, Vector4};
use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use crate::error::{Error, Result};

const DIM: f64 = 4.0;

/// Draws a unit quaternion from the von Mises-Fisher distribution on S^3
/// with mode `mean` and concentration `kappa`.
///
/// Uses Wood's (1994) rejection sampler for the component along the mode,
/// followed by a uniform tangent direction and a Householder reflection that
/// maps the north pole onto `mean`.
pub fn sample_vmf<R: Rng + ?Sized>(
    mean: &Quaternion<f64>,
    kappa: f64,
    rng: &mut R,
) -> Result<Quaternion<f64>> {
    let norm = mean.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NonUnitQuaternion(norm));
    }
    if kappa.is_nan() || kappa < 0.0 {
        return Err(Error::BadParams(format!("vMF kappa {kappa} must be >= 0")));
    }
    let mu = mean.coords / norm;
    let w = sample_mode_component(kappa, rng);

    // Uniform direction orthogonal to the north pole e0.
    let tangent = loop {
        let v: Vector4<f64> = Vector4::new(
            0.0,
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = v.norm();
        if n > 1e-12 {
            break v / n;
        }
    };
    let mut x = tangent * (1.0 - w * w).max(0.0).sqrt();
    x[0] = w;

    // Householder reflection swapping e0 and mu. nalgebra stores quaternion
    // coordinates as (i, j, k, w), so the scalar part is the last entry; we
    // sampled with the pole at index 0, so remap before reflecting.
    let pole = Vector4::new(1.0, 0.0, 0.0, 0.0);
    let mu_wxyz = Vector4::new(mu[3], mu[0], mu[1], mu[2]);
    let diff = pole - mu_wxyz;
    let dn = diff.norm();
    let y = if dn < 1e-15 {
        x
    } else {
        let u = diff / dn;
        x - u * (2.0 * u.dot(&x))
    };
    let q = Quaternion::new(y[0], y[1], y[2], y[3]);
    Ok(q / q.norm())
}

/// Component `w = mu . x` of a vMF draw on S^3.
fn sample_mode_component<R: Rng + ?Sized>(kappa: f64, rng: &mut R) -> f64 {
    let p1 = DIM - 1.0;
    // b = (-2k + sqrt(4k^2 + (p-1)^2)) / (p-1), written without cancellation.
    let b = p1 / (2.0 * kappa + (4.0 * kappa * kappa + p1 * p1).sqrt());
    let x0 = (1.0 - b) / (1.0 + b);
    let c = kappa * x0 + p1 * (1.0 - x0 * x0).ln();
    let beta = Beta::new(p1 / 2.0, p1 / 2.0).expect("valid beta parameters");
    loop {
        let z: f64 = beta.sample(rng);
        let w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        let u: f64 = rng.random();
        if kappa * w + p1 * (1.0 - x0 * w).ln() - c >= u.ln() {
            return w.clamp(-1.0, 1.0);
        }
    }
}
