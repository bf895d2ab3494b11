//! JSON shapes shared by scene, teach-library, profile and report files.

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use tabletop_core::{Category, JointConfig, Pose};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

/// Full 6-DOF pose; quaternion as `[w, x, y, z]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseJson {
    pub xyz: [f64; 3],
    pub quat: [f64; 4],
}

impl From<&Pose> for PoseJson {
    fn from(p: &Pose) -> Self {
        let t = p.position();
        let q = p.rotation();
        PoseJson { xyz: [t.x, t.y, t.z], quat: [q.w, q.i, q.j, q.k] }
    }
}

impl PoseJson {
    pub fn to_pose(&self) -> Result<Pose, FormatError> {
        let [w, x, y, z] = self.quat;
        let q = Quaternion::new(w, x, y, z);
        let n = q.norm();
        if !((n - 1.0).abs() < 1e-6) {
            return Err(invalid(format!("quaternion {:?} is not unit length", self.quat)));
        }
        let [px, py, pz] = self.xyz;
        if !(px.is_finite() && py.is_finite() && pz.is_finite()) {
            return Err(invalid("pose position must be finite"));
        }
        Ok(Pose::new(Vector3::new(px, py, pz), UnitQuaternion::new_normalize(q)))
    }
}

/// Upright pose of an object sitting on a surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UprightPoseJson {
    pub xyz: [f64; 3],
    pub yaw: f64,
}

pub fn joint_from(q: [f64; 4]) -> Result<JointConfig, FormatError> {
    JointConfig::new(q[0], q[1], q[2], q[3]).map_err(|e| invalid(e.to_string()))
}

pub fn joint_to(q: &JointConfig) -> [f64; 4] {
    [q.x, q.y, q.z, q.yaw]
}

pub fn category_from(s: &str) -> Result<Category, FormatError> {
    Category::parse(s).ok_or_else(|| invalid(format!("unknown category `{s}` (expected node or link)")))
}
