use nalgebra::{Quaternion, SVector, UnitQuaternion, Vector3};

use crate::error::{Error, Result};

/// Raw 7D sampler state, ordered `x y z qw qx qy qz`.
pub type State = SVector<f64, 7>;

/// Approach axis of the gripper at identity orientation.
pub const APPROACH_AXIS: Vector3<f64> = Vector3::new(0.0, 0.0, -1.0);

const UNIT_TOLERANCE: f64 = 1e-6;

/// A gripper pose relative to an object: position in meters plus a unit
/// quaternion orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grasp {
    pub position: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
}

impl Grasp {
    pub fn new(position: Vector3<f64>, orientation: UnitQuaternion<f64>) -> Self {
        Self {
            position,
            orientation,
        }
    }

    pub fn identity_at(position: Vector3<f64>) -> Self {
        Self::new(position, UnitQuaternion::identity())
    }

    /// Builds a grasp from a raw state, renormalizing the quaternion block.
    pub fn from_state(state: &State) -> Result<Self> {
        if state.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("state {:?}", state.as_slice())));
        }
        let q = Quaternion::new(state[3], state[4], state[5], state[6]);
        let norm = q.norm();
        if norm < 1e-12 {
            return Err(Error::DegenerateQuaternion(norm));
        }
        Ok(Self {
            position: Vector3::new(state[0], state[1], state[2]),
            orientation: UnitQuaternion::new_normalize(q),
        })
    }

    /// Builds a grasp from `[x, y, z, qw, qx, qy, qz]` with a strict unit
    /// check. Components are kept as given so stored poses reload bit for bit.
    pub fn from_array(g: [f64; 7]) -> Result<Self> {
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("grasp {g:?}")));
        }
        let norm = (g[3] * g[3] + g[4] * g[4] + g[5] * g[5] + g[6] * g[6]).sqrt();
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NonUnitQuaternion(norm));
        }
        Ok(Self {
            position: Vector3::new(g[0], g[1], g[2]),
            orientation: UnitQuaternion::new_unchecked(Quaternion::new(g[3], g[4], g[5], g[6])),
        })
    }

    pub fn to_state(&self) -> State {
        let q = self.orientation.quaternion();
        State::from_column_slice(&[
            self.position.x,
            self.position.y,
            self.position.z,
            q.w,
            q.i,
            q.j,
            q.k,
        ])
    }

    pub fn to_array(&self) -> [f64; 7] {
        let s = self.to_state();
        [s[0], s[1], s[2], s[3], s[4], s[5], s[6]]
    }

    /// Unit vector the gripper approaches along.
    pub fn approach_axis(&self) -> Vector3<f64> {
        self.orientation * APPROACH_AXIS
    }
}

/// Angle between two vectors in `[0, pi]`, stable near 0 and pi.
pub(crate) fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproachAngle {
    pub theta: f64,
    /// Set when the rim point coincides with the gripper position.
    pub degenerate: bool,
}

/// Angle between the reversed approach axis and the direction from the
/// gripper to `rim_point`. `theta = pi` when the gripper points straight at
/// the rim point, `0` when it points directly away.
pub fn approach_angle(g: &Grasp, rim_point: &Vector3<f64>) -> ApproachAngle {
    let to_rim = rim_point - g.position;
    if to_rim.norm() <= 1e-12 {
        return ApproachAngle {
            theta: 0.0,
            degenerate: true,
        };
    }
    ApproachAngle {
        theta: angle_between(&(-g.approach_axis()), &to_rim),
        degenerate: false,
    }
}

/// Rotation angle between two orientations, invariant to `q -> -q`.
pub fn quat_geodesic(a: &Quaternion<f64>, b: &Quaternion<f64>) -> Result<f64> {
    for q in [a, b] {
        let n = q.norm();
        if (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NonUnitQuaternion(n));
        }
    }
    let dot = a.coords.dot(&b.coords).abs().min(1.0);
    Ok(2.0 * dot.acos())
}
