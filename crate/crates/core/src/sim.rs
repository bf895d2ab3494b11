//! Execution context shared by every leaf operation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::motion::PlannerParams;
use crate::predicator::KnowledgeBase;
use crate::profiles::CapabilityProfile;
use crate::world::physics::PathFollower;
use crate::world::WorldState;

/// Timing and tolerance constants of the simulated cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// Tick quantum, seconds of simulated time.
    pub dt: f64,
    /// Arm speed along the weighted C-space metric, m/s.
    pub arm_speed: f64,
    pub gripper_s: f64,
    pub detect_s: f64,
    pub grasp_position_tol: f64,
    pub grasp_yaw_tol: f64,
    /// C-space interpolation step for swept contact checks, meters.
    pub sweep_resolution: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 0.05,
            arm_speed: 0.25,
            gripper_s: 1.0,
            detect_s: 0.5,
            grasp_position_tol: 0.015,
            grasp_yaw_tol: 0.2,
            sweep_resolution: 0.005,
        }
    }
}

/// World, knowledge and configuration for one run.
#[derive(Clone, Debug)]
pub struct Sim {
    pub world: WorldState,
    pub kb: KnowledgeBase,
    pub config: SimConfig,
    pub planner: PlannerParams,
    /// Active capability profile; leaf dispatch refuses ops outside it.
    pub profile: Option<CapabilityProfile>,
    pub(crate) rng: ChaCha8Rng,
    plan_calls: u64,
}

impl Sim {
    pub fn new(world: WorldState, kb: KnowledgeBase, seed: u64) -> Self {
        Sim {
            world,
            kb,
            config: SimConfig::default(),
            planner: PlannerParams { seed, ..PlannerParams::default() },
            profile: None,
            rng: ChaCha8Rng::seed_from_u64(seed),
            plan_calls: 0,
        }
    }

    pub fn with_profile(mut self, profile: CapabilityProfile) -> Self {
        self.profile = Some(profile);
        self
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Planner parameters for the next planning call. Each call gets its own
    /// seed derived from the base seed and a call counter.
    pub fn next_planner_params(&mut self) -> PlannerParams {
        self.plan_calls += 1;
        let mut p = self.planner.clone();
        p.seed = splitmix64(self.planner.seed ^ self.plan_calls.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        p
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Countdown for fixed-duration actions (gripper, detection).
#[derive(Clone, Debug, PartialEq)]
pub struct Timer {
    remaining: f64,
}

impl Timer {
    pub fn new(duration: f64) -> Self {
        Timer { remaining: duration }
    }

    /// Spends up to `slice` seconds; returns `(finished, seconds_used)`.
    pub fn advance(&mut self, slice: f64) -> (bool, f64) {
        if slice >= self.remaining - 1e-9 {
            let used = self.remaining.max(0.0);
            self.remaining = 0.0;
            (true, used)
        } else {
            self.remaining -= slice;
            (false, slice)
        }
    }
}

/// Drives `follower` for up to `slice` seconds at the configured arm speed;
/// returns `(finished, seconds_used)`.
pub fn follow(world: &mut WorldState, follower: &mut PathFollower, slice: f64, cfg: &SimConfig) -> (bool, f64) {
    let used = follower.advance(world, slice * cfg.arm_speed) / cfg.arm_speed;
    (follower.is_done(), used.min(slice))
}
