//! Collision geometry.
//!
//! Every shape is a vertical prism (a box whose local z is world z, rotated
//! by some yaw) or a vertical cylinder. Object boxes that are tipped onto a
//! side are still vertical prisms, just with permuted extents.

use alloc::vec::Vec;

use nalgebra::{Vector2, Vector3};

use super::kinematics::tool_pose;
use super::{JointConfig, Pose, WorldObject, WorldState};

/// Penetration below this depth counts as touching, not contact.
pub const CONTACT_EPS: f64 = 1e-6;

pub const GRIPPER_HALF: Vector3<f64> = Vector3::new(0.03, 0.03, 0.05);
pub const COLUMN_RADIUS: f64 = 0.03;
/// Top of the gantry column, above the highest reachable tool position.
pub const COLUMN_TOP: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prism {
    pub center: Vector3<f64>,
    /// Half-sizes along the prism's local x, local y and world z.
    pub half: Vector3<f64>,
    pub yaw: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Column {
    pub center: Vector2<f64>,
    pub radius: f64,
    pub z_min: f64,
    pub z_max: f64,
}

impl Prism {
    /// Collision prism of a box with the given pose and half-extents.
    ///
    /// Falls back to a conservative world-aligned bound when no local axis
    /// is vertical.
    pub fn of_box(pose: &Pose, extents: &Vector3<f64>) -> Prism {
        let r = pose.rotation().to_rotation_matrix();
        let m = r.matrix();
        let cols = [m.column(0).into_owned(), m.column(1).into_owned(), m.column(2).into_owned()];
        let mut vertical = 0;
        for i in 1..3 {
            if cols[i].z.abs() > cols[vertical].z.abs() {
                vertical = i;
            }
        }
        let center = pose.position();
        if cols[vertical].z.abs() >= 1.0 - 1e-9 {
            let (h1, h2) = match vertical {
                0 => (1, 2),
                1 => (2, 0),
                _ => (0, 1),
            };
            let yaw = libm::atan2(cols[h1].y, cols[h1].x);
            Prism { center, half: Vector3::new(extents[h1], extents[h2], extents[vertical]), yaw }
        } else {
            let mut half = Vector3::zeros();
            for i in 0..3 {
                half[i] = (0..3).map(|j| m[(i, j)].abs() * extents[j]).sum();
            }
            Prism { center, half, yaw: 0.0 }
        }
    }

    pub fn of_object(obj: &WorldObject) -> Prism {
        Prism::of_box(&obj.pose, &obj.extents)
    }

    pub fn bottom(&self) -> f64 {
        self.center.z - self.half.z
    }

    pub fn top(&self) -> f64 {
        self.center.z + self.half.z
    }

    fn axes(&self) -> [Vector2<f64>; 2] {
        let (s, c) = (libm::sin(self.yaw), libm::cos(self.yaw));
        [Vector2::new(c, s), Vector2::new(-s, c)]
    }

    fn center2(&self) -> Vector2<f64> {
        Vector2::new(self.center.x, self.center.y)
    }

    fn radius_along(&self, axis: &Vector2<f64>) -> f64 {
        let [u, v] = self.axes();
        self.half.x * axis.dot(&u).abs() + self.half.y * axis.dot(&v).abs()
    }

    /// Footprint corners, counter-clockwise.
    pub fn corners(&self) -> [Vector2<f64>; 4] {
        let [u, v] = self.axes();
        let c = self.center2();
        let (a, b) = (u * self.half.x, v * self.half.y);
        [c + a + b, c - a + b, c - a - b, c + a - b]
    }

    pub fn footprint_area(&self) -> f64 {
        4.0 * self.half.x * self.half.y
    }

    /// Separating axis test in xy plus the z interval test.
    pub fn overlaps(&self, other: &Prism) -> bool {
        if !intervals_overlap(self.bottom(), self.top(), other.bottom(), other.top()) {
            return false;
        }
        let d = other.center2() - self.center2();
        for axis in self.axes().iter().chain(other.axes().iter()) {
            let dist = d.dot(axis).abs();
            if dist >= self.radius_along(axis) + other.radius_along(axis) - CONTACT_EPS {
                return false;
            }
        }
        true
    }

    pub fn overlaps_column(&self, col: &Column) -> bool {
        if !intervals_overlap(self.bottom(), self.top(), col.z_min, col.z_max) {
            return false;
        }
        let [u, v] = self.axes();
        let d = col.center - self.center2();
        let lx = d.dot(&u).clamp(-self.half.x, self.half.x);
        let ly = d.dot(&v).clamp(-self.half.y, self.half.y);
        let nearest = self.center2() + u * lx + v * ly;
        (col.center - nearest).norm() < col.radius - CONTACT_EPS
    }
}

fn intervals_overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> bool {
    a0 < b1 - CONTACT_EPS && b0 < a1 - CONTACT_EPS
}

/// Area of the intersection of two footprints (convex polygon clipping).
pub fn footprint_overlap_area(a: &Prism, b: &Prism) -> f64 {
    let mut poly: Vec<Vector2<f64>> = a.corners().to_vec();
    let clip = b.corners();
    for i in 0..4 {
        let (p, q) = (clip[i], clip[(i + 1) % 4]);
        let edge = q - p;
        let inside = |x: &Vector2<f64>| edge.perp(&(x - p)) >= 0.0;
        let input = core::mem::take(&mut poly);
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            let (ci, pi) = (inside(&cur), inside(&prev));
            if ci != pi {
                let denom = edge.perp(&(cur - prev));
                if denom.abs() > 1e-15 {
                    let t = edge.perp(&(p - prev)) / denom;
                    poly.push(prev + (cur - prev) * t);
                }
            }
            if ci {
                poly.push(cur);
            }
        }
        if poly.is_empty() {
            return 0.0;
        }
    }
    let mut area = 0.0;
    for i in 0..poly.len() {
        area += poly[i].perp(&poly[(i + 1) % poly.len()]);
    }
    (area * 0.5).abs()
}

/// Robot body at `q`: gripper box, column, and the held object's prism.
pub struct RobotBody {
    pub gripper: Prism,
    pub column: Column,
    pub held: Option<Prism>,
}

impl RobotBody {
    pub fn at(world: &WorldState, q: &JointConfig) -> RobotBody {
        let tool = tool_pose(q);
        let gripper = Prism { center: Vector3::new(q.x, q.y, q.z + GRIPPER_HALF.z), half: GRIPPER_HALF, yaw: q.yaw };
        let column = Column {
            center: Vector2::new(q.x, q.y),
            radius: COLUMN_RADIUS,
            z_min: q.z + 2.0 * GRIPPER_HALF.z,
            z_max: COLUMN_TOP,
        };
        let held = world
            .gripper
            .held
            .as_ref()
            .and_then(|h| world.object(&h.id).map(|o| Prism::of_box(&tool.compose(&h.grip), &o.extents)));
        RobotBody { gripper, column, held }
    }

    pub fn touches(&self, obstacle: &Prism) -> bool {
        self.gripper.overlaps(obstacle)
            || obstacle.overlaps_column(&self.column)
            || self.held.is_some_and(|h| h.overlaps(obstacle))
    }

    pub fn below_table(&self, table_z: f64) -> bool {
        self.gripper.bottom() < table_z - CONTACT_EPS || self.held.is_some_and(|h| h.bottom() < table_z - CONTACT_EPS)
    }
}

fn is_obstacle(world: &WorldState, obj: &WorldObject) -> bool {
    world.held_id() != Some(obj.id.as_str()) && !world.collision_disabled.contains(&obj.id)
}

/// True iff the robot body (or what it holds) at `q` overlaps any
/// non-disabled, non-held object or the table.
pub fn check_collision(world: &WorldState, q: &JointConfig) -> bool {
    let body = RobotBody::at(world, q);
    if body.below_table(world.table_z) {
        return true;
    }
    world.objects.iter().filter(|o| is_obstacle(world, o)).any(|o| body.touches(&Prism::of_object(o)))
}

/// Indices of standing objects the robot body is pushing into at `q`.
pub fn contacts(world: &WorldState, q: &JointConfig) -> Vec<usize> {
    let body = RobotBody::at(world, q);
    world
        .objects
        .iter()
        .enumerate()
        .filter(|(_, o)| !o.knocked && is_obstacle(world, o))
        .filter(|(_, o)| body.touches(&Prism::of_object(o)))
        .map(|(i, _)| i)
        .collect()
}
