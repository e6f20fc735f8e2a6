use nalgebra::{Isometry3, Matrix3, Rotation3, Translation3, UnitQuaternion, Vector3};

use super::cloud::PointCloud;
use crate::error::{Error, Result};

/// Relative eigenvalue gap below which the principal frame is ill-defined.
const DEGENERATE_GAP: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Alignment {
    pub cloud: PointCloud,
    /// Maps input coordinates to canonical coordinates.
    pub transform: Isometry3<f64>,
    /// Set for (near-)coplanar clouds or repeated principal spreads.
    pub degenerate: bool,
}

/// Translates the centroid to the origin and rotates the principal axes
/// (descending spread) onto +z, +x, +y.
///
/// The two dominant axes are signed so the third moment of the projected
/// coordinates is non-negative; the least-spread axis completes a
/// right-handed frame.
pub fn align_to_canonical(cloud: &PointCloud) -> Result<Alignment> {
    if cloud.len() < 2 {
        return Err(Error::DegenerateCloud(format!(
            "need at least 2 points, got {}",
            cloud.len()
        )));
    }
    let centroid = cloud.centroid().expect("non-empty");
    let centered: Vec<Vector3<f64>> = cloud.points.iter().map(|p| p - centroid).collect();
    let n = centered.len() as f64;
    let cov = centered
        .iter()
        .fold(Matrix3::zeros(), |acc, d| acc + d * d.transpose())
        / n;

    let eig = cov.symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.map(|i| eig.eigenvalues[i]);
    let scale = vals[0].abs().max(f64::MIN_POSITIVE);
    let degenerate = cloud.len() < 4
        || vals[2] / scale < DEGENERATE_GAP
        || (vals[0] - vals[1]) / scale < DEGENERATE_GAP
        || (vals[1] - vals[2]) / scale < DEGENERATE_GAP;

    let mut axes = order.map(|i| eig.eigenvectors.column(i).into_owned());
    for axis in axes.iter_mut().take(2) {
        let m3: f64 = centered.iter().map(|d| d.dot(axis).powi(3)).sum::<f64>() / n;
        let tie = m3.abs() <= 1e-12 * scale.powf(1.5);
        if (tie && !points_positive(axis)) || (!tie && m3 < 0.0) {
            *axis = -*axis;
        }
    }
    // Canonical z <- axes[0], x <- axes[1], y <- z cross x.
    let z = axes[0];
    let x = axes[1];
    let y = z.cross(&x);
    let rot = Rotation3::from_matrix_unchecked(Matrix3::from_rows(&[
        x.transpose(),
        y.transpose(),
        z.transpose(),
    ]));
    let rotation = UnitQuaternion::from_rotation_matrix(&rot);
    let transform = Isometry3::from_parts(Translation3::from(-(rot * centroid)), rotation);
    Ok(Alignment {
        cloud: cloud.transformed(&transform),
        transform,
        degenerate,
    })
}

/// Tie-break for a symmetric axis: its largest-magnitude component is positive.
fn points_positive(axis: &Vector3<f64>) -> bool {
    axis[axis.iamax()] > 0.0
}
