//! Parametric stand-in objects and an analytic grasp-quality oracle.
//!
//! Objects are built in a local frame with the symmetry axis along +z and
//! the base at z = 0; `pose` maps that frame into world coordinates.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use nalgebra::{Isometry3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::heuristic::DEFAULT_MIN_GWS;
use super::target::{Quality, QualityOracle};
use crate::error::{Error, Result};
use crate::geometry::{angle_between, Grasp, PointCloud};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectKind {
    Plate,
    Pan,
    #[serde(alias = "pitcher")]
    PitcherAnalog,
}

impl ObjectKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectKind::Plate => "plate",
            ObjectKind::Pan => "pan",
            ObjectKind::PitcherAnalog => "pitcher-analog",
        }
    }
}

/// Object dimensions in meters. Unset fields take per-kind defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dimensions {
    pub radius: f64,
    /// Wall height (pan, pitcher).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    /// Material thickness of plate, base and walls.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness: Option<f64>,
    /// Major radius of the pitcher handle arc.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub handle_radius: Option<f64>,
    /// Tube radius of the pitcher handle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub handle_tube: Option<f64>,
}

/// How surface points are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// Quasi-uniform: sunflower spiral on discs, staggered grids elsewhere,
    /// resembling a depth sensor's regular footprint.
    #[default]
    Even,
    /// Independent uniform draws by area.
    Uniform,
}

/// Synthetic object description as read from a spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub kind: ObjectKind,
    pub dimensions: Dimensions,
    pub points: usize,
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl ObjectSpec {
    pub fn new(kind: ObjectKind, radius: f64, points: usize, seed: u64) -> Self {
        Self {
            kind,
            dimensions: Dimensions {
                radius,
                height: None,
                thickness: None,
                handle_radius: None,
                handle_tube: None,
            },
            points,
            noise_sigma: 0.0,
            seed,
            sampling: Sampling::Even,
            name: None,
        }
    }

    pub fn with_height(mut self, h: f64) -> Self {
        self.dimensions.height = Some(h);
        self
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            msg: e.to_string(),
        })
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            format!("{}-r{}", self.kind.as_str(), self.dimensions.radius)
        })
    }
}

/// Resolved geometry in the object frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shape {
    pub kind: ObjectKind,
    pub radius: f64,
    pub height: f64,
    pub thickness: f64,
    pub handle_radius: f64,
    pub handle_tube: f64,
}

impl Shape {
    pub fn from_dimensions(kind: ObjectKind, d: &Dimensions) -> Result<Self> {
        let height = d.height.unwrap_or(match kind {
            ObjectKind::Plate => 0.0,
            ObjectKind::Pan => 0.06,
            ObjectKind::PitcherAnalog => 0.2,
        });
        let thickness = d.thickness.unwrap_or(0.005);
        let handle_radius = d.handle_radius.unwrap_or(height / 4.0);
        let handle_tube = d.handle_tube.unwrap_or(0.01);
        let s = Self {
            kind,
            radius: d.radius,
            height,
            thickness,
            handle_radius,
            handle_tube,
        };
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(s.radius) || !positive(s.thickness) || s.thickness >= s.radius {
            return Err(Error::BadObject(format!(
                "radius {} and thickness {} must satisfy 0 < thickness < radius",
                s.radius, s.thickness
            )));
        }
        if kind != ObjectKind::Plate && !(positive(s.height) && s.height > s.thickness) {
            return Err(Error::BadObject(format!("height {} must exceed thickness", s.height)));
        }
        if kind == ObjectKind::PitcherAnalog
            && !(positive(s.handle_radius) && positive(s.handle_tube) && s.handle_tube < s.handle_radius)
        {
            return Err(Error::BadObject("handle needs 0 < tube < radius".into()));
        }
        Ok(s)
    }

    /// Height of the rim circle.
    pub fn rim_height(&self) -> f64 {
        match self.kind {
            ObjectKind::Plate => 0.0,
            _ => self.height,
        }
    }

    /// Closest point on the rim circle to `p`.
    pub fn nearest_rim_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let radial = Vector3::new(p.x, p.y, 0.0);
        let n = radial.norm();
        let dir = if n < 1e-15 { Vector3::x() } else { radial / n };
        dir * self.radius + Vector3::new(0.0, 0.0, self.rim_height())
    }

    /// Points evenly spaced along the rim circle.
    pub fn rim_curve(&self, n: usize) -> Vec<Vector3<f64>> {
        (0..n)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / n as f64;
                Vector3::new(self.radius * a.cos(), self.radius * a.sin(), self.rim_height())
            })
            .collect()
    }

    fn handle_center(&self) -> Vector3<f64> {
        Vector3::new(self.radius, 0.0, self.height / 2.0)
    }

    fn handle_distance(&self, p: &Vector3<f64>) -> f64 {
        let v = p - self.handle_center();
        let phi = if v.x == 0.0 && v.z == 0.0 {
            0.0
        } else {
            v.z.atan2(v.x).clamp(-FRAC_PI_2, FRAC_PI_2)
        };
        let on_arc = self.handle_center()
            + Vector3::new(phi.cos(), 0.0, phi.sin()) * self.handle_radius;
        (p - on_arc).norm()
    }

    /// Whether `p` (object frame) lies inside the material.
    pub fn inside_solid(&self, p: &Vector3<f64>) -> bool {
        let r = (p.x * p.x + p.y * p.y).sqrt();
        let t = self.thickness;
        match self.kind {
            ObjectKind::Plate => r <= self.radius && p.z.abs() <= t / 2.0,
            ObjectKind::Pan | ObjectKind::PitcherAnalog => {
                let base = r <= self.radius && (0.0..=t).contains(&p.z);
                let wall = (self.radius - t..=self.radius).contains(&r)
                    && (0.0..=self.height).contains(&p.z);
                let handle = self.kind == ObjectKind::PitcherAnalog
                    && self.handle_distance(p) <= self.handle_tube;
                base || wall || handle
            }
        }
    }

    /// Surface areas of the base disc, the wall and the handle.
    fn areas(&self) -> [f64; 3] {
        let disc = PI * self.radius * self.radius;
        let wall = match self.kind {
            ObjectKind::Plate => 0.0,
            _ => 2.0 * PI * self.radius * self.height,
        };
        let handle = match self.kind {
            ObjectKind::PitcherAnalog => 2.0 * PI * self.handle_tube * PI * self.handle_radius,
            _ => 0.0,
        };
        [disc, wall, handle]
    }

    fn handle_point(&self, phi: f64, psi: f64) -> Vector3<f64> {
        let ring = self.handle_radius + self.handle_tube * psi.cos();
        self.handle_center()
            + Vector3::new(ring * phi.cos(), self.handle_tube * psi.sin(), ring * phi.sin())
    }

    fn even_surface(&self, n: usize) -> Vec<Vector3<f64>> {
        let [disc, wall, handle] = self.areas();
        let total = disc + wall + handle;
        let n_wall = (n as f64 * wall / total).round() as usize;
        let n_handle = (n as f64 * handle / total).round() as usize;
        let n_disc = n.saturating_sub(n_wall + n_handle);
        let mut out = Vec::with_capacity(n);

        let golden = PI * (3.0 - 5f64.sqrt());
        for i in 0..n_disc {
            let r = self.radius * ((i as f64 + 0.5) / n_disc as f64).sqrt();
            let a = golden * i as f64;
            out.push(Vector3::new(r * a.cos(), r * a.sin(), 0.0));
        }
        // Staggered rows: `rows` along the first parameter, the rest spread
        // around the circumference.
        let grid = |count: usize, length: f64, circumference: f64| -> Vec<(f64, f64)> {
            if count == 0 {
                return Vec::new();
            }
            let rows = ((count as f64 * length / circumference).sqrt().round() as usize).clamp(1, count);
            let mut cells = Vec::with_capacity(count);
            for row in 0..rows {
                let cols = count / rows + usize::from(row < count % rows);
                for c in 0..cols {
                    let u = (row as f64 + 0.5) / rows as f64;
                    let v = (c as f64 + 0.5 * (row % 2) as f64) / cols as f64;
                    cells.push((u, v));
                }
            }
            cells
        };
        for (u, v) in grid(n_wall, self.height, 2.0 * PI * self.radius) {
            let a = 2.0 * PI * v;
            out.push(Vector3::new(self.radius * a.cos(), self.radius * a.sin(), self.height * u));
        }
        for (u, v) in grid(n_handle, PI * self.handle_radius, 2.0 * PI * self.handle_tube) {
            out.push(self.handle_point(-FRAC_PI_2 + PI * u, 2.0 * PI * v));
        }
        out
    }

    fn sample_surface<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector3<f64> {
        let [disc, wall, handle] = self.areas();
        let pick = rng.random_range(0.0..disc + wall + handle);
        if pick < disc {
            let r = self.radius * rng.random::<f64>().sqrt();
            let a = rng.random_range(0.0..2.0 * PI);
            Vector3::new(r * a.cos(), r * a.sin(), 0.0)
        } else if pick < disc + wall {
            let a = rng.random_range(0.0..2.0 * PI);
            let z = rng.random_range(0.0..=self.height);
            Vector3::new(self.radius * a.cos(), self.radius * a.sin(), z)
        } else {
            // Torus segment, rejection-sampled for uniform area.
            let (a, b) = (self.handle_radius, self.handle_tube);
            loop {
                let phi = rng.random_range(-FRAC_PI_2..=FRAC_PI_2);
                let psi = rng.random_range(0.0..2.0 * PI);
                if rng.random::<f64>() * (a + b) <= a + b * psi.cos() {
                    return self.handle_point(phi, psi);
                }
            }
        }
    }
}

/// A generated object: its shape, pose and sampled point cloud.
#[derive(Debug, Clone)]
pub struct SyntheticObject {
    pub spec: ObjectSpec,
    pub shape: Shape,
    /// Object frame to world frame.
    pub pose: Isometry3<f64>,
    pub cloud: PointCloud,
}

impl SyntheticObject {
    pub fn generate(spec: &ObjectSpec) -> Result<Self> {
        let shape = Shape::from_dimensions(spec.kind, &spec.dimensions)?;
        if spec.points == 0 {
            return Err(Error::BadObject("points must be >= 1".into()));
        }
        if !(spec.noise_sigma >= 0.0 && spec.noise_sigma.is_finite()) {
            return Err(Error::BadObject(format!("noise_sigma {} must be >= 0", spec.noise_sigma)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let noise = Normal::new(0.0, spec.noise_sigma).expect("validated sigma");
        let surface: Vec<Vector3<f64>> = match spec.sampling {
            Sampling::Even => shape.even_surface(spec.points),
            Sampling::Uniform => (0..spec.points).map(|_| shape.sample_surface(&mut rng)).collect(),
        };
        let points = surface
            .into_iter()
            .map(|p| {
                if spec.noise_sigma > 0.0 {
                    p + Vector3::from_fn(|_, _| noise.sample(&mut rng))
                } else {
                    p
                }
            })
            .collect();
        Ok(Self {
            spec: spec.clone(),
            shape,
            pose: Isometry3::identity(),
            cloud: PointCloud::new(points)?,
        })
    }

    pub fn name(&self) -> String {
        self.spec.display_name()
    }

    /// Rigidly moves the object (cloud and pose together).
    pub fn transformed(&self, iso: &Isometry3<f64>) -> Self {
        Self {
            spec: self.spec.clone(),
            shape: self.shape,
            pose: iso * self.pose,
            cloud: self.cloud.transformed(iso),
        }
    }

    /// Ground-truth rim curve in world coordinates.
    pub fn rim_curve(&self, n: usize) -> Vec<Vector3<f64>> {
        self.shape
            .rim_curve(n)
            .into_iter()
            .map(|p| self.pose.transform_point(&p.into()).coords)
            .collect()
    }
}

/// Tolerances of the analytic oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleTolerances {
    /// Maximum distance from the rim curve, meters.
    pub eps_d: f64,
    /// Maximum angle between the approach axis and the direction to the rim, radians.
    pub eps_theta: f64,
}

impl Default for OracleTolerances {
    fn default() -> Self {
        Self {
            eps_d: 0.05,
            eps_theta: 0.8,
        }
    }
}

/// Analytic replacement for a wrench-space simulator.
///
/// A grasp is feasible when the gripper sits outside the material, within
/// `eps_d` of the rim curve, and points at its closest rim point within
/// `eps_theta`. On the curve itself the reference direction is straight
/// down the object axis. Quality falls off bilinearly in both residuals and
/// is rescaled to `[min_gws, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct SyntheticOracle {
    pub shape: Shape,
    pub pose: Isometry3<f64>,
    pub tolerances: OracleTolerances,
    pub min_gws: f64,
}

pub fn synthetic_oracle(obj: &SyntheticObject, tolerances: OracleTolerances) -> Result<SyntheticOracle> {
    if !(tolerances.eps_d > 0.0 && tolerances.eps_theta > 0.0 && tolerances.eps_theta <= PI) {
        return Err(Error::BadObject(format!("bad tolerances {tolerances:?}")));
    }
    Shape::from_dimensions(obj.shape.kind, &obj.spec.dimensions)?;
    Ok(SyntheticOracle {
        shape: obj.shape,
        pose: obj.pose,
        tolerances,
        min_gws: DEFAULT_MIN_GWS,
    })
}

impl SyntheticOracle {
    /// Distance and angular residuals in the object frame, or `None` when
    /// the gripper is inside the material.
    pub fn residuals(&self, g: &Grasp) -> Option<(f64, f64)> {
        let inv = self.pose.inverse();
        let p = inv.transform_point(&g.position.into()).coords;
        if self.shape.inside_solid(&p) {
            return None;
        }
        let b = inv.rotation * g.approach_axis();
        let c = self.shape.nearest_rim_point(&p);
        let to_rim = c - p;
        let d = to_rim.norm();
        let theta_hat = if d <= 1e-12 {
            angle_between(&b, &Vector3::new(0.0, 0.0, -1.0))
        } else {
            angle_between(&b, &to_rim)
        };
        Some((d, theta_hat))
    }
}

impl QualityOracle for SyntheticOracle {
    fn evaluate(&self, g: &Grasp) -> Result<Quality> {
        let Some((d, theta_hat)) = self.residuals(g) else {
            return Ok(Quality::Infeasible);
        };
        let t = &self.tolerances;
        if d > t.eps_d || theta_hat > t.eps_theta {
            return Ok(Quality::Infeasible);
        }
        let q = (1.0 - d / t.eps_d) * (1.0 - theta_hat / t.eps_theta);
        Ok(Quality::Feasible(self.min_gws + (1.0 - self.min_gws) * q))
    }
}
