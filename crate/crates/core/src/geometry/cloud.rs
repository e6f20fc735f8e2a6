use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{Isometry3, Vector3};

use crate::error::{Error, Result};

/// Object geometry as a list of points in meters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    pub points: Vec<Vector3<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vector3<f64>>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.iter().any(|v| !v.is_finite())) {
            return Err(Error::NonFinite(format!("point {:?}", p.as_slice())));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn centroid(&self) -> Option<Vector3<f64>> {
        if self.points.is_empty() {
            return None;
        }
        let sum: Vector3<f64> = self.points.iter().sum();
        Some(sum / self.points.len() as f64)
    }

    pub fn transformed(&self, iso: &Isometry3<f64>) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| iso.transform_point(&(*p).into()).coords)
                .collect(),
        }
    }

    /// Parses the `x y z` text format.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        parse_points(text, origin).map(|points| Self { points })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_text(&self) -> String {
        format_points(&self.points)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_points(path.as_ref(), &self.points)
    }
}

pub(crate) fn parse_points(text: &str, origin: &Path) -> Result<Vec<Vector3<f64>>> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line: lineno + 1,
            msg,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        }
        let mut xyz = [0.0; 3];
        for (slot, field) in xyz.iter_mut().zip(&fields) {
            *slot = field
                .parse::<f64>()
                .map_err(|e| err(format!("{field:?}: {e}")))?;
            if !slot.is_finite() {
                return Err(err(format!("non-finite coordinate {field:?}")));
            }
        }
        points.push(Vector3::from(xyz));
    }
    Ok(points)
}

pub(crate) fn format_points(points: &[Vector3<f64>]) -> String {
    let mut out = String::with_capacity(points.len() * 48);
    for p in points {
        // `Display` for f64 prints the shortest string that parses back exactly.
        let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
    }
    out
}

pub(crate) fn write_points(path: &Path, points: &[Vector3<f64>]) -> Result<()> {
    fs::write(path, format_points(points)).map_err(|e| Error::io(path, e))
}
