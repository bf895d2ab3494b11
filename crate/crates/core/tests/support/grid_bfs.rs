//! Reachability over a 1 cm grid of gripper positions at fixed yaw, with
//! obstacles and the table inflated for clearance.

#![allow(dead_code)]

use std::collections::VecDeque;

use rand::Rng;
use tabletop_core::world::check_collision;
use tabletop_core::{Category, JointConfig, WorldObject, WorldState};

pub const CELL: f64 = 0.01;
/// Inflation applied to every obstacle: twice the grid step.
pub const CLEARANCE: f64 = 2.0 * CELL;

pub const X_RANGE: (i32, i32) = (0, 75);
pub const Y_RANGE: (i32, i32) = (-50, 50);
pub const Z_RANGE: (i32, i32) = (0, 45);

pub fn inflated(world: &WorldState) -> WorldState {
    let mut w = world.clone();
    for o in &mut w.objects {
        o.extents.x += CLEARANCE;
        o.extents.y += CLEARANCE;
        o.extents.z += CLEARANCE;
    }
    w.table_z += CLEARANCE;
    w
}

fn config(c: (i32, i32, i32), yaw: f64) -> JointConfig {
    JointConfig { x: c.0 as f64 * CELL, y: c.1 as f64 * CELL, z: c.2 as f64 * CELL, yaw }
}

pub fn cell_of(q: &JointConfig) -> (i32, i32, i32) {
    ((q.x / CELL).round() as i32, (q.y / CELL).round() as i32, (q.z / CELL).round() as i32)
}

/// True iff a 6-connected path of clearance-free cells joins `start` and
/// `goal` (both on the grid, same yaw).
pub fn certified(world: &WorldState, start: &JointConfig, goal: &JointConfig) -> bool {
    let w = inflated(world);
    let yaw = start.yaw;
    let (s, g) = (cell_of(start), cell_of(goal));
    let inside = |c: (i32, i32, i32)| {
        (X_RANGE.0..=X_RANGE.1).contains(&c.0)
            && (Y_RANGE.0..=Y_RANGE.1).contains(&c.1)
            && (Z_RANGE.0..=Z_RANGE.1).contains(&c.2)
    };
    let free = |c: (i32, i32, i32)| inside(c) && !check_collision(&w, &config(c, yaw));
    if !free(s) || !free(g) {
        return false;
    }
    let dims = (
        (X_RANGE.1 - X_RANGE.0 + 1) as usize,
        (Y_RANGE.1 - Y_RANGE.0 + 1) as usize,
        (Z_RANGE.1 - Z_RANGE.0 + 1) as usize,
    );
    let index = |c: (i32, i32, i32)| {
        ((c.0 - X_RANGE.0) as usize * dims.1 + (c.1 - Y_RANGE.0) as usize) * dims.2 + (c.2 - Z_RANGE.0) as usize
    };
    let mut seen = vec![false; dims.0 * dims.1 * dims.2];
    let mut queue = VecDeque::from([s]);
    seen[index(s)] = true;
    while let Some(c) = queue.pop_front() {
        if c == g {
            return true;
        }
        for d in [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)] {
            let n = (c.0 + d.0, c.1 + d.1, c.2 + d.2);
            if inside(n) && !seen[index(n)] {
                seen[index(n)] = true;
                if free(n) {
                    queue.push_back(n);
                }
            }
        }
    }
    false
}

/// Random clutter: blocks and thin walls inside the grid region, plus a
/// start and goal on the grid at yaw 0 that are collision-free in the real
/// world.
pub fn random_instance<R: Rng>(rng: &mut R) -> (WorldState, JointConfig, JointConfig) {
    let home = JointConfig::new(0.0, 0.0, 0.4, 0.0).unwrap();
    let mut objects = Vec::new();
    for i in 0..rng.random_range(2..=5) {
        let wall = rng.random_bool(0.4);
        let extents = if wall {
            nalgebra::Vector3::new(rng.random_range(0.05..0.15), 0.01, rng.random_range(0.05..0.15))
        } else {
            nalgebra::Vector3::new(0.025, 0.025, 0.025)
        };
        let (x, y) = (rng.random_range(0.15..0.6), rng.random_range(-0.35..0.35));
        let yaw = rng.random_range(-3.0..3.0);
        let category = if wall { Category::Link } else { Category::Node };
        objects.push(WorldObject::resting(format!("obj_{i}"), category, x, y, 0.0, yaw, extents).unwrap());
    }
    let world = WorldState::new(home, 0.0, objects);
    let pick = |rng: &mut R| loop {
        let c = (rng.random_range(5..70), rng.random_range(-45..45), rng.random_range(0..30));
        let q = config(c, 0.0);
        if !check_collision(&world, &q) {
            return q;
        }
    };
    let start = pick(rng);
    let goal = pick(rng);
    (world, start, goal)
}
