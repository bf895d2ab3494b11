//! 4-DOF gantry arm: prismatic x, y, z plus a yaw joint about world z.
//!
//! The tool always faces straight down, so forward and inverse kinematics
//! are direct mappings between joint values and the tool pose.

use core::f64::consts::PI;

use super::pose::{normalize_angle, Pose};
use super::WorldError;

pub const X_LIMITS: (f64, f64) = (-0.8, 0.8);
pub const Y_LIMITS: (f64, f64) = (-0.8, 0.8);
pub const Z_LIMITS: (f64, f64) = (0.0, 0.6);
pub const YAW_LIMITS: (f64, f64) = (-PI, PI);

/// Weight on Δyaw² in the C-space metric, in m²/rad².
pub const YAW_WEIGHT: f64 = 0.01;

const LIMIT_SLACK: f64 = 1e-9;

/// Joint configuration `(x, y, z, yaw)`; yaw is kept in `(−π, π]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointConfig {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
}

fn within(v: f64, (lo, hi): (f64, f64)) -> bool {
    v >= lo - LIMIT_SLACK && v <= hi + LIMIT_SLACK
}

impl JointConfig {
    /// Checked constructor. Yaw is normalized before the limit check.
    pub fn new(x: f64, y: f64, z: f64, yaw: f64) -> Result<Self, WorldError> {
        let q = JointConfig { x, y, z, yaw: normalize_angle(yaw) };
        if q.within_limits() {
            Ok(q)
        } else {
            Err(WorldError::OutOfLimits { x, y, z, yaw })
        }
    }

    pub fn within_limits(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.z.is_finite()
            && self.yaw.is_finite()
            && within(self.x, X_LIMITS)
            && within(self.y, Y_LIMITS)
            && within(self.z, Z_LIMITS)
            && within(self.yaw, YAW_LIMITS)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x, self.y, self.z, self.yaw]
    }

    /// Weighted C-space distance: `sqrt(Δx² + Δy² + Δz² + w·Δyaw²)`.
    ///
    /// Yaw is a bounded joint, so the difference does not wrap.
    pub fn distance(&self, other: &JointConfig) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        let dyaw = self.yaw - other.yaw;
        libm::sqrt(dx * dx + dy * dy + dz * dz + YAW_WEIGHT * dyaw * dyaw)
    }

    /// Linear interpolation in joint space (no wrapping).
    pub fn lerp(&self, other: &JointConfig, s: f64) -> JointConfig {
        JointConfig {
            x: self.x + (other.x - self.x) * s,
            y: self.y + (other.y - self.y) * s,
            z: self.z + (other.z - self.z) * s,
            yaw: self.yaw + (other.yaw - self.yaw) * s,
        }
    }
}

pub fn forward_kinematics(q: &JointConfig) -> Result<Pose, WorldError> {
    if !q.within_limits() {
        return Err(WorldError::OutOfLimits { x: q.x, y: q.y, z: q.z, yaw: q.yaw });
    }
    Ok(tool_pose(q))
}

/// FK without the limit check; callers guarantee `q` is valid.
pub(crate) fn tool_pose(q: &JointConfig) -> Pose {
    Pose::tool(q.x, q.y, q.z, q.yaw)
}

pub fn inverse_kinematics(p: &Pose) -> Result<JointConfig, WorldError> {
    if !p.is_downward() {
        return Err(WorldError::Unreachable("tool orientation is not downward-facing"));
    }
    let t = p.position();
    JointConfig::new(t.x, t.y, t.z, p.yaw()).map_err(|_| WorldError::Unreachable("position outside the joint limits"))
}
