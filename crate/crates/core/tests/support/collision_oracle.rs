//! Brute-force collision check: sample the robot body on a 1 mm grid and
//! test each sample against every obstacle box.

#![allow(dead_code)]

use nalgebra::Point3;
use tabletop_core::world::collision::{COLUMN_RADIUS, GRIPPER_HALF};
use tabletop_core::{JointConfig, WorldState};

pub const STEP: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Hit,
    Clear,
    /// Within one grid step of touching; a 1 mm sampler cannot decide.
    TooClose,
}

/// Signed distance from `p` to the box `extents` around the origin: negative
/// inside, Chebyshev-style (exact enough for a margin test).
fn box_depth(p: &Point3<f64>, half: [f64; 3]) -> f64 {
    (0..3).map(|i| p[i].abs() - half[i]).fold(f64::MIN, f64::max)
}

/// Samples of the gripper box and of the column up to `column_top`.
pub fn body_samples(q: &JointConfig, column_top: f64) -> Vec<Point3<f64>> {
    let (c, s) = (q.yaw.cos(), q.yaw.sin());
    let n = |h: f64| (h / STEP).round() as i64;
    let mut out = Vec::new();
    let (nx, ny, nz) = (n(GRIPPER_HALF.x), n(GRIPPER_HALF.y), n(2.0 * GRIPPER_HALF.z));
    for i in -nx..=nx {
        for j in -ny..=ny {
            let (lx, ly) = (i as f64 * STEP, j as f64 * STEP);
            for k in 0..=nz {
                out.push(Point3::new(q.x + c * lx - s * ly, q.y + s * lx + c * ly, q.z + k as f64 * STEP));
            }
        }
    }
    let r = n(COLUMN_RADIUS);
    let base = q.z + 2.0 * GRIPPER_HALF.z;
    let top = n((column_top - base).max(0.0));
    for i in -r..=r {
        for j in -r..=r {
            let (dx, dy) = (i as f64 * STEP, j as f64 * STEP);
            if dx.hypot(dy) > COLUMN_RADIUS {
                continue;
            }
            for k in 0..=top {
                out.push(Point3::new(q.x + dx, q.y + dy, base + k as f64 * STEP));
            }
        }
    }
    out
}

/// Classifies the robot at `q` against upright, non-disabled objects and
/// the table. Only worlds where nothing is held are supported.
pub fn classify(world: &WorldState, q: &JointConfig) -> Verdict {
    assert!(world.gripper.held.is_none());
    let mut deepest = q.z - world.table_z;
    let obstacles: Vec<_> = world.objects.iter().filter(|o| !world.collision_disabled.contains(&o.id)).collect();
    let column_top = obstacles.iter().map(|o| o.pose.position().z + o.extents.z).fold(0.0, f64::max) + 0.01;
    for p in body_samples(q, column_top) {
        for o in &obstacles {
            let local = o.pose.0.inverse_transform_point(&p);
            deepest = deepest.min(box_depth(&local, [o.extents.x, o.extents.y, o.extents.z]));
        }
    }
    let margin = STEP * 3f64.sqrt();
    if deepest < -margin {
        Verdict::Hit
    } else if deepest > margin {
        Verdict::Clear
    } else {
        Verdict::TooClose
    }
}
