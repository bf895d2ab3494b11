use core::f64::consts::PI;

use nalgebra::{Isometry3, Translation3, UnitQuaternion, Vector3};

/// Tolerance for "the tool points straight down", in radians.
pub const DOWNWARD_TOLERANCE: f64 = 1e-6;

/// Rigid transform: position in meters plus a unit quaternion.
///
/// Used both for world poses and for relative transforms (a taught grasp
/// expressed in an object frame, for instance).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose(pub Isometry3<f64>);

/// Wraps an angle into `(-π, π]`.
pub fn normalize_angle(a: f64) -> f64 {
    let mut r = libm::fmod(a, 2.0 * PI);
    if r <= -PI {
        r += 2.0 * PI;
    } else if r > PI {
        r -= 2.0 * PI;
    }
    r
}

impl Pose {
    pub fn identity() -> Self {
        Pose(Isometry3::identity())
    }

    pub fn new(position: Vector3<f64>, rotation: UnitQuaternion<f64>) -> Self {
        Pose(Isometry3::from_parts(Translation3::from(position), rotation))
    }

    /// Upright pose rotated by `yaw` about world z (how objects sit on the table).
    pub fn upright(x: f64, y: f64, z: f64, yaw: f64) -> Self {
        Self::new(Vector3::new(x, y, z), UnitQuaternion::from_axis_angle(&Vector3::z_axis(), yaw))
    }

    /// Downward-facing tool frame: `Rz(yaw) * Rx(π)`.
    pub fn tool(x: f64, y: f64, z: f64, yaw: f64) -> Self {
        let r = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), yaw)
            * UnitQuaternion::from_axis_angle(&Vector3::x_axis(), PI);
        Self::new(Vector3::new(x, y, z), r)
    }

    pub fn position(&self) -> Vector3<f64> {
        self.0.translation.vector
    }

    pub fn rotation(&self) -> UnitQuaternion<f64> {
        self.0.rotation
    }

    /// Heading of the local x axis projected onto the world xy plane.
    pub fn yaw(&self) -> f64 {
        let ax = self.0.rotation * Vector3::x();
        libm::atan2(ax.y, ax.x)
    }

    pub fn compose(&self, other: &Pose) -> Pose {
        Pose(self.0 * other.0)
    }

    pub fn inverse(&self) -> Pose {
        Pose(self.0.inverse())
    }

    pub fn translated(&self, delta: Vector3<f64>) -> Pose {
        Pose::new(self.position() + delta, self.rotation())
    }

    /// Local z axis in world coordinates (the approach axis of a tool frame).
    pub fn z_axis(&self) -> Vector3<f64> {
        self.0.rotation * Vector3::z()
    }

    /// True when the local z axis points along world −z within
    /// [`DOWNWARD_TOLERANCE`].
    pub fn is_downward(&self) -> bool {
        let z = self.z_axis();
        let tilt = libm::atan2(libm::sqrt(z.x * z.x + z.y * z.y), -z.z);
        tilt <= DOWNWARD_TOLERANCE
    }

    /// True when the local z axis points along world +z (an upright object).
    pub fn is_upright(&self) -> bool {
        let z = self.z_axis();
        let tilt = libm::atan2(libm::sqrt(z.x * z.x + z.y * z.y), z.z);
        tilt <= DOWNWARD_TOLERANCE
    }
}

impl Default for Pose {
    fn default() -> Self {
        Pose::identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_wraps_into_half_open_interval() {
        assert!((normalize_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert_eq!(normalize_angle(PI), PI);
        assert!((normalize_angle(-PI) - PI).abs() < 1e-12);
        assert!((normalize_angle(0.3) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn tool_frame_points_down_and_keeps_yaw() {
        let p = Pose::tool(0.1, -0.2, 0.3, PI / 2.0);
        assert!(p.is_downward());
        assert!((p.yaw() - PI / 2.0).abs() < 1e-12);
        let tilted =
            p.compose(&Pose::new(Vector3::zeros(), UnitQuaternion::from_axis_angle(&Vector3::x_axis(), PI / 6.0)));
        assert!(!tilted.is_downward());
    }

    #[test]
    fn quaternion_stays_unit() {
        let p = Pose::upright(0.0, 0.0, 0.0, 1.234).compose(&Pose::tool(0.1, 0.0, 0.2, -2.0));
        assert!((p.rotation().into_inner().norm() - 1.0).abs() < 1e-9);
    }
}
