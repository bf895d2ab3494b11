//! Physical consequences: swept motion with knock-over, gripper actuation
//! and object settling.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{UnitQuaternion, Vector2, Vector3};

use super::collision::{contacts, footprint_overlap_area, Prism};
use super::{normalize_angle, Category, Held, JointConfig, ObjectId, Pose, WorldDelta, WorldState};
use crate::bt::TickStatus;
use crate::motion::MotionPlan;
use crate::sim::SimConfig;
use crate::smartmove::{grasp_candidates, GraspSpec};

/// Horizontal displacement of a knocked object, meters.
pub const KNOCK_DISPLACEMENT: f64 = 0.02;
/// A support surface this close below a released object catches it.
pub const SETTLE_GAP: f64 = 0.005;
/// Minimum fraction of the footprint that must rest on a support.
pub const SUPPORT_FRACTION: f64 = 0.5;
pub const MATE_XY_TOL: f64 = 0.01;
pub const MATE_YAW_TOL: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GripperTarget {
    Open,
    Closed,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MoveOutcome {
    pub knocked: Vec<ObjectId>,
    /// Weighted C-space length travelled, meters.
    pub length: f64,
    pub duration: f64,
}

/// Incremental executor for a piecewise-linear joint path.
///
/// Contact checks happen at fixed sample points on each segment
/// (`ceil(len / resolution)` evenly spaced samples), so the set of knocks
/// does not depend on how the motion is sliced into ticks.
#[derive(Clone, Debug, PartialEq)]
pub struct PathFollower {
    waypoints: Vec<JointConfig>,
    resolution: f64,
    segment: usize,
    along: f64,
    next_sample: usize,
    knocked: Vec<ObjectId>,
    travelled: f64,
}

impl PathFollower {
    pub fn new(world: &WorldState, waypoints: &[JointConfig], resolution: f64) -> Self {
        let mut wps = Vec::with_capacity(waypoints.len() + 1);
        if waypoints.first().is_none_or(|w| w.distance(&world.robot) > 1e-9) {
            wps.push(world.robot);
        }
        wps.extend_from_slice(waypoints);
        PathFollower {
            waypoints: wps,
            resolution,
            segment: 0,
            along: 0.0,
            next_sample: 1,
            knocked: Vec::new(),
            travelled: 0.0,
        }
    }

    pub fn straight(world: &WorldState, target: JointConfig, resolution: f64) -> Self {
        Self::new(world, &[world.robot, target], resolution)
    }

    pub fn is_done(&self) -> bool {
        self.segment + 1 >= self.waypoints.len()
    }

    pub fn knocked(&self) -> &[ObjectId] {
        &self.knocked
    }

    pub fn travelled(&self) -> f64 {
        self.travelled
    }

    pub fn remaining(&self) -> f64 {
        if self.is_done() {
            return 0.0;
        }
        let mut r = self.waypoints[self.segment].distance(&self.waypoints[self.segment + 1]) - self.along;
        for w in self.waypoints[self.segment + 1..].windows(2) {
            r += w[0].distance(&w[1]);
        }
        r.max(0.0)
    }

    /// Moves up to `budget` meters along the path; returns the distance used.
    pub fn advance(&mut self, world: &mut WorldState, budget: f64) -> f64 {
        let mut left = budget;
        let start = self.travelled;
        while !self.is_done() {
            let a = self.waypoints[self.segment];
            let b = self.waypoints[self.segment + 1];
            let len = a.distance(&b);
            let samples = libm::ceil(len / self.resolution).max(1.0) as usize;
            let dir = Vector2::new(b.x - a.x, b.y - a.y);
            let rest = len - self.along;
            if left >= rest - 1e-12 {
                for k in self.next_sample..=samples {
                    let q = a.lerp(&b, k as f64 / samples as f64);
                    self.visit(world, q, dir);
                }
                left -= rest.max(0.0);
                self.travelled += rest.max(0.0);
                world.set_robot(b);
                self.segment += 1;
                self.along = 0.0;
                self.next_sample = 1;
            } else {
                self.along += left;
                self.travelled += left;
                while self.next_sample <= samples
                    && (self.next_sample as f64 / samples as f64) * len <= self.along + 1e-12
                {
                    let q = a.lerp(&b, self.next_sample as f64 / samples as f64);
                    self.visit(world, q, dir);
                    self.next_sample += 1;
                }
                world.set_robot(a.lerp(&b, self.along / len));
                break;
            }
        }
        self.travelled - start
    }

    fn visit(&mut self, world: &mut WorldState, q: JointConfig, dir: Vector2<f64>) {
        world.set_robot(q);
        for idx in contacts(world, &q) {
            let from = Vector2::new(q.x, q.y);
            knock(world, idx, from, dir);
            self.knocked.push(world.objects[idx].id.clone());
        }
    }
}

/// Executes `path` blindly: contacted objects are knocked over and the arm
/// keeps going. Advances `sim_time` by the travel time.
pub fn sweep_and_apply(world: &mut WorldState, path: &MotionPlan, cfg: &SimConfig) -> MoveOutcome {
    let mut follower = PathFollower::new(world, &path.waypoints, cfg.sweep_resolution);
    let length = follower.advance(world, f64::INFINITY);
    let duration = length / cfg.arm_speed;
    world.sim_time += duration;
    MoveOutcome { knocked: follower.knocked, length, duration }
}

/// Tips object `idx` onto its side and pushes it away from `from`.
pub(crate) fn knock(world: &mut WorldState, idx: usize, from: Vector2<f64>, fallback: Vector2<f64>) {
    let table_z = world.table_z;
    let obj = &mut world.objects[idx];
    let c = obj.pose.position();
    let mut push = Vector2::new(c.x, c.y) - from;
    if push.norm() < 1e-3 {
        push = fallback;
    }
    if push.norm() < 1e-9 {
        push = Vector2::new(1.0, 0.0);
    }
    let push = push.normalize() * KNOCK_DISPLACEMENT;
    let roll = UnitQuaternion::from_axis_angle(&Vector3::x_axis(), PI / 2.0);
    let tipped = Pose::new(Vector3::new(c.x + push.x, c.y + push.y, c.z), obj.pose.rotation() * roll);
    let prism = Prism::of_box(&tipped, &obj.extents);
    obj.pose = tipped.translated(Vector3::new(0.0, 0.0, table_z - prism.bottom()));
    obj.knocked = true;
    obj.mated_on = None;
    let id = obj.id.clone();
    for other in world.objects.iter_mut() {
        if other.mated_on.as_deref() == Some(id.as_str()) {
            other.mated_on = None;
        }
    }
    world.push(WorldDelta::Knocked { id });
}

/// Instantaneous gripper state change (no time cost).
pub(crate) fn actuate_gripper(
    world: &mut WorldState,
    target: GripperTarget,
    spec: Option<&GraspSpec>,
    cfg: &SimConfig,
) {
    match target {
        GripperTarget::Closed => {
            world.gripper.closed = true;
            if world.gripper.held.is_some() {
                world.push(WorldDelta::GripperClosed { held: world.held_id().map(Into::into) });
                return;
            }
            let tcp = world.gripper_pose();
            let mut best: Option<(f64, usize)> = None;
            for (i, obj) in world.objects.iter_mut().enumerate() {
                let default;
                let spec = match spec {
                    Some(s) => s,
                    None => {
                        default = GraspSpec::top_grasp(&obj.extents);
                        &default
                    }
                };
                for cand in grasp_candidates(obj, spec) {
                    let dp = (cand.position() - tcp.position()).norm();
                    let dyaw = normalize_angle(cand.yaw() - tcp.yaw()).abs();
                    if dp <= 2.0 * cfg.grasp_position_tol && dyaw <= 2.0 * cfg.grasp_yaw_tol {
                        obj.grasp_attempted = true;
                    }
                    if dp <= cfg.grasp_position_tol && dyaw <= cfg.grasp_yaw_tol && best.is_none_or(|(d, _)| dp < d) {
                        best = Some((dp, i));
                    }
                }
            }
            let held = best.map(|(_, i)| {
                let obj = &mut world.objects[i];
                obj.attached = true;
                obj.mated_on = None;
                let id = obj.id.clone();
                let grip = tcp.inverse().compose(&obj.pose);
                for other in world.objects.iter_mut() {
                    if other.mated_on.as_deref() == Some(id.as_str()) {
                        other.mated_on = None;
                    }
                }
                world.gripper.held = Some(Held { id: id.clone(), grip });
                id
            });
            world.push(WorldDelta::GripperClosed { held });
        }
        GripperTarget::Open => {
            world.gripper.closed = false;
            let released = world.gripper.held.take().map(|h| h.id);
            if let Some(id) = &released {
                if let Some(obj) = world.object_mut(id) {
                    obj.attached = false;
                    obj.placed = true;
                }
            }
            world.push(WorldDelta::GripperOpened { released: released.clone() });
            if let Some(id) = released {
                settle_object(world, &id);
            }
        }
    }
}

/// Opens or closes the gripper. Closing attaches an object whose grasp pose
/// (per `spec`, or the default top grasp) is within tolerance of the tool.
/// Takes `gripper_s` of simulated time.
pub fn set_gripper(
    world: &mut WorldState,
    target: GripperTarget,
    spec: Option<&GraspSpec>,
    cfg: &SimConfig,
) -> TickStatus {
    actuate_gripper(world, target, spec, cfg);
    world.sim_time += cfg.gripper_s;
    TickStatus::Success
}

/// Lets a just-released object come to rest.
pub fn settle_object(world: &mut WorldState, id: &str) {
    let Some(idx) = world.index_of(id) else { return };
    let prism = Prism::of_object(&world.objects[idx]);
    let bottom = prism.bottom();
    let footprint = prism.footprint_area();

    let mut support: Option<(usize, f64, f64)> = None;
    for (j, other) in world.objects.iter().enumerate() {
        if j == idx || other.attached {
            continue;
        }
        let op = Prism::of_object(other);
        if op.top() > bottom + 1e-6 {
            continue;
        }
        let area = footprint_overlap_area(&prism, &op);
        if area <= 1e-12 {
            continue;
        }
        if support.is_none_or(|(_, top, _)| op.top() > top) {
            support = Some((j, op.top(), area / footprint));
        }
    }

    match support {
        Some((j, top, fraction)) if bottom - top <= SETTLE_GAP + 1e-9 && fraction >= SUPPORT_FRACTION - 1e-9 => {
            let obj = &mut world.objects[idx];
            obj.pose = obj.pose.translated(Vector3::new(0.0, 0.0, top - bottom));
            let support_id = world.objects[j].id.clone();
            world.push(WorldDelta::Settled { id: id.into(), on: Some(support_id.clone()) });
            if is_mate(&world.objects[idx], &world.objects[j]) {
                world.objects[idx].mated_on = Some(support_id.clone());
                world.push(WorldDelta::Mated { link: id.into(), node: support_id });
            }
        }
        Some((j, _, _)) => {
            // Partial support, or dropped onto an object from a height.
            let c = world.objects[j].pose.position();
            knock(world, idx, Vector2::new(c.x, c.y), Vector2::new(1.0, 0.0));
        }
        None => {
            let table_z = world.table_z;
            let obj = &mut world.objects[idx];
            obj.pose = obj.pose.translated(Vector3::new(0.0, 0.0, table_z - bottom));
            world.push(WorldDelta::Settled { id: id.into(), on: None });
        }
    }
}

fn is_mate(link: &super::WorldObject, node: &super::WorldObject) -> bool {
    if link.category != Category::Link || node.category != Category::Node || link.knocked || node.knocked {
        return false;
    }
    if !link.pose.is_upright() || !node.pose.is_upright() {
        return false;
    }
    let (a, b) = (link.pose.position(), node.pose.position());
    if libm::hypot(a.x - b.x, a.y - b.y) > MATE_XY_TOL {
        return false;
    }
    let period = 2.0 * PI / node.symmetry_order as f64;
    let r = libm::fmod(normalize_angle(link.pose.yaw() - node.pose.yaw()).abs(), period);
    r.min(period - r) <= MATE_YAW_TOL
}
