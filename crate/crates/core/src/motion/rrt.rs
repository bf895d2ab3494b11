use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{segment_is_free, MotionPlan, PlanError, PlannerParams, CHECK_RESOLUTION};
use crate::world::kinematics::{X_LIMITS, YAW_LIMITS, Y_LIMITS, Z_LIMITS};
use crate::world::{check_collision, JointConfig, WorldState};

struct Tree {
    nodes: Vec<JointConfig>,
    parent: Vec<usize>,
}

enum Extend {
    Trapped,
    Advanced,
    Reached,
}

impl Tree {
    fn new(root: JointConfig) -> Self {
        Tree { nodes: vec![root], parent: vec![0] }
    }

    fn nearest(&self, q: &JointConfig) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, n) in self.nodes.iter().enumerate() {
            let d = n.distance(q);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    fn extend(&mut self, world: &WorldState, target: &JointConfig, step: f64) -> Extend {
        let near_idx = self.nearest(target);
        let near = self.nodes[near_idx];
        let d = near.distance(target);
        let (q_new, reached) = if d <= step { (*target, true) } else { (near.lerp(target, step / d), false) };
        if !segment_is_free(world, &near, &q_new, CHECK_RESOLUTION) {
            return Extend::Trapped;
        }
        self.nodes.push(q_new);
        self.parent.push(near_idx);
        if reached {
            Extend::Reached
        } else {
            Extend::Advanced
        }
    }

    fn connect(&mut self, world: &WorldState, target: &JointConfig, step: f64) -> Extend {
        loop {
            match self.extend(world, target, step) {
                Extend::Advanced => continue,
                other => return other,
            }
        }
    }

    /// Root-to-last path.
    fn path_to_last(&self) -> Vec<JointConfig> {
        let mut out = Vec::new();
        let mut i = self.nodes.len() - 1;
        loop {
            out.push(self.nodes[i]);
            if i == 0 {
                break;
            }
            i = self.parent[i];
        }
        out.reverse();
        out
    }
}

fn sample(rng: &mut ChaCha8Rng) -> JointConfig {
    JointConfig {
        x: rng.random_range(X_LIMITS.0..=X_LIMITS.1),
        y: rng.random_range(Y_LIMITS.0..=Y_LIMITS.1),
        z: rng.random_range(Z_LIMITS.0..=Z_LIMITS.1),
        yaw: rng.random_range(YAW_LIMITS.0..=YAW_LIMITS.1),
    }
}

/// Bidirectional RRT-Connect from `start` to `goal`, followed by shortcut
/// smoothing. Every returned segment is collision-free at 5 mm resolution.
pub fn plan_rrt_connect(
    world: &WorldState,
    start: &JointConfig,
    goal: &JointConfig,
    params: &PlannerParams,
) -> Result<MotionPlan, PlanError> {
    if !(params.step > 0.0) {
        return Err(PlanError::BadParams("step must be positive"));
    }
    if params.max_iterations == 0 {
        return Err(PlanError::BadParams("max_iterations must be at least 1"));
    }
    if !goal.within_limits() {
        return Err(PlanError::GoalOutOfLimits);
    }
    if check_collision(world, start) {
        return Err(PlanError::StartInCollision);
    }
    if check_collision(world, goal) {
        return Err(PlanError::NoPath);
    }
    if start.distance(goal) <= params.goal_tolerance {
        return Ok(MotionPlan::from_waypoints(vec![*start]));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut a = Tree::new(*start);
    let mut b = Tree::new(*goal);
    let mut a_is_start = true;

    for _ in 0..params.max_iterations {
        let q_rand = sample(&mut rng);
        if !matches!(a.extend(world, &q_rand, params.step), Extend::Trapped) {
            let q_new = *a.nodes.last().expect("tree is never empty");
            if matches!(b.connect(world, &q_new, params.step), Extend::Reached) {
                let (from_start, from_goal) = if a_is_start { (&a, &b) } else { (&b, &a) };
                let mut path = from_start.path_to_last();
                let mut tail = from_goal.path_to_last();
                tail.reverse();
                path.extend(tail.into_iter().skip(1));
                if params.shortcut_iterations > 0 {
                    shortcut(world, &mut path, params.shortcut_iterations, &mut rng);
                }
                return Ok(MotionPlan::from_waypoints(path));
            }
        }
        core::mem::swap(&mut a, &mut b);
        a_is_start = !a_is_start;
    }
    Err(PlanError::NoPath)
}

/// Random-pair shortcutting followed by one greedy farthest-visible pass.
/// Never lengthens the path.
fn shortcut(world: &WorldState, path: &mut Vec<JointConfig>, iterations: usize, rng: &mut ChaCha8Rng) {
    for _ in 0..iterations {
        let n = path.len();
        if n < 3 {
            break;
        }
        let i = rng.random_range(0..n - 2);
        let j = rng.random_range(i + 2..n);
        if segment_is_free(world, &path[i], &path[j], CHECK_RESOLUTION) {
            path.drain(i + 1..j);
        }
    }

    let mut out = vec![path[0]];
    let mut i = 0;
    while i + 1 < path.len() {
        let mut j = path.len() - 1;
        while j > i + 1 && !segment_is_free(world, &path[i], &path[j], CHECK_RESOLUTION) {
            j -= 1;
        }
        out.push(path[j]);
        i = j;
    }
    *path = out;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::path_is_free;
    use crate::world::{Category, Pose, WorldObject};
    use nalgebra::Vector3;

    fn q(x: f64, y: f64, z: f64, yaw: f64) -> JointConfig {
        JointConfig::new(x, y, z, yaw).unwrap()
    }

    fn block(id: &str, x: f64, y: f64, z: f64, half: Vector3<f64>) -> WorldObject {
        WorldObject::new(id, Category::Link, Pose::upright(x, y, z, 0.0), half, 2).unwrap()
    }

    fn world(objects: Vec<WorldObject>) -> WorldState {
        WorldState::new(q(0.0, 0.0, 0.4, 0.0), 0.0, objects)
    }

    #[test]
    fn empty_scene_gives_near_straight_plan() {
        let w = world(Vec::new());
        for seed in 0..10 {
            let (s, g) = (q(-0.5, -0.4, 0.1, -1.0), q(0.6, 0.5, 0.5, 2.0));
            let plan = plan_rrt_connect(&w, &s, &g, &PlannerParams { seed, ..Default::default() }).unwrap();
            assert!(plan.length <= 1.05 * s.distance(&g), "seed {seed}: {} vs {}", plan.length, s.distance(&g));
            assert_eq!(plan.waypoints[0], s);
            assert!(plan.waypoints.last().unwrap().distance(&g) <= 1e-6);
        }
    }

    #[test]
    fn goal_inside_obstacle_is_no_path() {
        let w = world(vec![block("b", 0.3, 0.3, 0.1, Vector3::new(0.1, 0.1, 0.1))]);
        let r = plan_rrt_connect(&w, &q(0.0, 0.0, 0.4, 0.0), &q(0.3, 0.3, 0.1, 0.0), &PlannerParams::default());
        assert_eq!(r, Err(PlanError::NoPath));
    }

    #[test]
    fn start_in_collision_is_distinct_error() {
        let w = world(vec![block("b", 0.3, 0.3, 0.1, Vector3::new(0.1, 0.1, 0.1))]);
        let r = plan_rrt_connect(&w, &q(0.3, 0.3, 0.1, 0.0), &q(0.0, 0.0, 0.4, 0.0), &PlannerParams::default());
        assert_eq!(r, Err(PlanError::StartInCollision));
    }

    #[test]
    fn plans_around_a_wall_deterministically() {
        let w = world(vec![block("wall", 0.0, 0.0, 0.25, Vector3::new(0.6, 0.02, 0.25))]);
        let (s, g) = (q(0.0, -0.3, 0.1, 0.0), q(0.0, 0.3, 0.1, 0.0));
        let params = PlannerParams { seed: 7, ..Default::default() };
        let a = plan_rrt_connect(&w, &s, &g, &params).unwrap();
        let b = plan_rrt_connect(&w, &s, &g, &params).unwrap();
        assert_eq!(a, b);
        assert!(path_is_free(&w, &a.waypoints, 0.005));
        assert!(a.length > s.distance(&g));
    }

    #[test]
    fn smoothing_never_lengthens() {
        let w = world(vec![block("wall", 0.0, 0.0, 0.25, Vector3::new(0.6, 0.02, 0.25))]);
        let (s, g) = (q(0.1, -0.3, 0.1, 0.5), q(-0.1, 0.3, 0.1, -0.5));
        for seed in 0..5 {
            let raw =
                plan_rrt_connect(&w, &s, &g, &PlannerParams { seed, shortcut_iterations: 0, ..Default::default() })
                    .unwrap();
            let smooth = plan_rrt_connect(&w, &s, &g, &PlannerParams { seed, ..Default::default() }).unwrap();
            assert!(smooth.length <= raw.length + 1e-12);
        }
    }
}
