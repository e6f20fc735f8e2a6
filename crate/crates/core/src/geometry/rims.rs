use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::cloud::{write_points, PointCloud};
use super::kdtree::KdTree;
use crate::error::{Error, Result};

/// Neighborhood radius (m) and squared-length threshold (m^2) for rim detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RimDetectionParams {
    pub radius: f64,
    pub zeta: f64,
}

impl RimDetectionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::BadParams(format!("radius {} must be > 0", self.radius)));
        }
        if !(self.zeta > 0.0 && self.zeta.is_finite()) {
            return Err(Error::BadParams(format!("zeta {} must be > 0", self.zeta)));
        }
        Ok(())
    }
}

/// Rim points of an object with a nearest-point index over them.
#[derive(Debug, Clone)]
pub struct RimSet {
    points: Vec<Vector3<f64>>,
    source: String,
    index: KdTree,
}

impl RimSet {
    pub fn new(points: Vec<Vector3<f64>>, source: impl Into<String>) -> Self {
        let index = KdTree::build(&points);
        Self {
            points,
            source: source.into(),
            index,
        }
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let cloud = PointCloud::load(path)?;
        Ok(Self::new(cloud.points, path.display().to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_points(path.as_ref(), &self.points)
    }

    pub fn transformed(&self, iso: &nalgebra::Isometry3<f64>) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| iso.transform_point(&(*p).into()).coords)
            .collect();
        Self::new(points, self.source.clone())
    }
}

/// `||sum_i (p_i - o)||^2` over the radius neighborhood of every point.
pub fn rim_scores(cloud: &PointCloud, radius: f64) -> Vec<f64> {
    let tree = KdTree::build(&cloud.points);
    cloud
        .points
        .iter()
        .enumerate()
        .map(|(idx, o)| {
            let sum = tree
                .within(o, radius)
                .into_iter()
                .filter(|&j| j != idx)
                .fold(Vector3::zeros(), |acc, j| acc + (cloud.points[j] - o));
            sum.norm_squared()
        })
        .collect()
}

/// Indices of the points whose neighborhood displacement sum exceeds `zeta`.
pub fn detect_rim_indices(cloud: &PointCloud, params: &RimDetectionParams) -> Result<Vec<usize>> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    params.validate()?;
    Ok(rim_scores(cloud, params.radius)
        .into_iter()
        .enumerate()
        .filter(|&(_, s)| s > params.zeta)
        .map(|(i, _)| i)
        .collect())
}

pub fn detect_rims(cloud: &PointCloud, params: &RimDetectionParams) -> Result<RimSet> {
    detect_rims_from(cloud, params, "cloud")
}

pub fn detect_rims_from(
    cloud: &PointCloud,
    params: &RimDetectionParams,
    source: &str,
) -> Result<RimSet> {
    let idx = detect_rim_indices(cloud, params)?;
    if idx.is_empty() {
        return Err(Error::NoRimsDetected);
    }
    Ok(RimSet::new(
        idx.into_iter().map(|i| cloud.points[i]).collect(),
        source,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearestRim {
    pub point: Vector3<f64>,
    pub index: usize,
    pub distance: f64,
}

pub fn nearest_rim(position: &Vector3<f64>, rims: &RimSet) -> Result<NearestRim> {
    let (index, d2) = rims.index.nearest(position).ok_or(Error::NoRims)?;
    Ok(NearestRim {
        point: rims.points[index],
        index,
        distance: d2.sqrt(),
    })
}
