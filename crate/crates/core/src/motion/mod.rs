//! Motion generation: blind joint-space servoing and RRT-Connect planning
//! with shortcut smoothing.

use alloc::vec::Vec;

use crate::bt::TickStatus;
use crate::sim::Sim;
use crate::world::{check_collision, sweep_and_apply, JointConfig, WorldState};

pub mod rrt;

pub use rrt::plan_rrt_connect;

/// Collision checking resolution along C-space segments, meters.
pub const CHECK_RESOLUTION: f64 = 0.005;

#[derive(Clone, Debug, PartialEq)]
pub struct MotionPlan {
    pub waypoints: Vec<JointConfig>,
    /// Sum of weighted segment lengths.
    pub length: f64,
}

impl MotionPlan {
    pub fn from_waypoints(waypoints: Vec<JointConfig>) -> Self {
        let length = path_length(&waypoints);
        MotionPlan { waypoints, length }
    }
}

pub fn path_length(waypoints: &[JointConfig]) -> f64 {
    waypoints.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlannerParams {
    /// Extension step in the weighted metric, meters.
    pub step: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// Random shortcut attempts; 0 disables smoothing entirely.
    pub shortcut_iterations: usize,
    pub goal_tolerance: f64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams { step: 0.05, max_iterations: 5000, seed: 0, shortcut_iterations: 50, goal_tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("start configuration is in collision")]
    StartInCollision,
    #[error("goal configuration is outside the joint limits")]
    GoalOutOfLimits,
    #[error("no collision-free path found")]
    NoPath,
    #[error("invalid planner parameters: {0}")]
    BadParams(&'static str),
}

/// True when every configuration on the straight segment `a → b`, sampled
/// at most `resolution` apart (endpoints included), is collision-free.
pub fn segment_is_free(world: &WorldState, a: &JointConfig, b: &JointConfig, resolution: f64) -> bool {
    let n = libm::ceil(a.distance(b) / resolution).max(1.0) as usize;
    (0..=n).all(|k| !check_collision(world, &a.lerp(b, k as f64 / n as f64)))
}

pub fn path_is_free(world: &WorldState, waypoints: &[JointConfig], resolution: f64) -> bool {
    if waypoints.len() == 1 {
        return !check_collision(world, &waypoints[0]);
    }
    waypoints.windows(2).all(|w| segment_is_free(world, &w[0], &w[1], resolution))
}

/// Moves straight to `target` with no collision checking or planning.
pub fn servo_to_joint(sim: &mut Sim, target: JointConfig) -> TickStatus {
    if !target.within_limits() {
        return TickStatus::Failure;
    }
    let plan = MotionPlan::from_waypoints(alloc::vec![sim.world.robot, target]);
    sweep_and_apply(&mut sim.world, &plan, &sim.config);
    TickStatus::Success
}

/// Plans to `goal` and executes the plan; Failure when no plan exists.
pub fn plan_to_joint(sim: &mut Sim, goal: JointConfig) -> TickStatus {
    let params = sim.next_planner_params();
    match plan_rrt_connect(&sim.world, &sim.world.robot, &goal, &params) {
        Ok(plan) => {
            sweep_and_apply(&mut sim.world, &plan, &sim.config);
            TickStatus::Success
        }
        Err(_) => TickStatus::Failure,
    }
}

pub fn plan_to_home(sim: &mut Sim) -> TickStatus {
    let home = sim.world.home;
    plan_to_joint(sim, home)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicator::KnowledgeBase;
    use crate::world::{Category, WorldObject};
    use alloc::vec;
    use nalgebra::Vector3;

    fn q(x: f64, y: f64, z: f64, yaw: f64) -> JointConfig {
        JointConfig::new(x, y, z, yaw).unwrap()
    }

    fn world(objects: Vec<WorldObject>) -> WorldState {
        WorldState::new(q(0.0, 0.0, 0.4, 0.0), 0.0, objects)
    }

    fn wall(id: &str, x: f64, y: f64, half: Vector3<f64>) -> WorldObject {
        WorldObject::resting(id, Category::Link, x, y, 0.0, 0.0, half).unwrap()
    }

    #[test]
    fn servo_through_obstacle_knocks_and_succeeds() {
        let mut sim = Sim::new(
            world(vec![wall("link_1", 0.3, 0.0, Vector3::new(0.045, 0.0125, 0.0125))]),
            KnowledgeBase::default(),
            1,
        );
        sim.world.set_robot(q(0.3, -0.3, 0.01, 0.0));
        assert_eq!(servo_to_joint(&mut sim, q(0.3, 0.3, 0.01, 0.0)), TickStatus::Success);
        assert!(sim.world.object("link_1").unwrap().knocked);
    }

    #[test]
    fn servo_out_of_limits_fails_without_moving() {
        let mut sim = Sim::new(world(Vec::new()), KnowledgeBase::default(), 1);
        let before = sim.world.clone();
        let bad = JointConfig { x: 0.95, y: 0.0, z: 0.2, yaw: 0.0 };
        assert_eq!(servo_to_joint(&mut sim, bad), TickStatus::Failure);
        assert_eq!(sim.world, before);
    }

    #[test]
    fn plan_to_home_when_already_home_is_zero_length() {
        let mut sim = Sim::new(world(Vec::new()), KnowledgeBase::default(), 1);
        assert_eq!(plan_to_home(&mut sim), TickStatus::Success);
        assert!(sim.world.sim_time.abs() < 1e-12);
    }

    #[test]
    fn plan_to_enclosed_home_fails() {
        let mut w = world(Vec::new());
        // A box swallowing the home pose.
        let mut cage = wall("cage", 0.0, 0.0, Vector3::new(0.1, 0.1, 0.3));
        cage.pose = crate::world::Pose::upright(0.0, 0.0, 0.45, 0.0);
        w.objects.push(cage);
        w.set_robot(q(0.5, 0.5, 0.3, 0.0));
        let mut sim = Sim::new(w, KnowledgeBase::default(), 1);
        assert_eq!(plan_to_home(&mut sim), TickStatus::Failure);
    }
}
