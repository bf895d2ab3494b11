//! SmartGrasp and SmartRelease: predicate-selected, symmetry-expanded,
//! distance-sorted pick and place backed by the planner.
//!
//! Both operations run as small state machines so the tree engine can
//! advance them one time slice at a time:
//! select a candidate, plan to its backoff pose (align), move straight
//! in, actuate the gripper, and retreat straight back out.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{UnitQuaternion, Vector3};

use crate::bt::TickStatus;
use crate::motion::{plan_rrt_connect, segment_is_free, CHECK_RESOLUTION};
use crate::predicator::{pose_query, KnowledgeBase, PredicateQuery, SymbolError};
use crate::sim::{follow, Sim, Timer};
use crate::world::collision::check_collision;
use crate::world::physics::{actuate_gripper, GripperTarget, PathFollower};
use crate::world::{
    inverse_kinematics, JointConfig, ObjectId, Pose, SmartOp, SmartPhase, WorldDelta, WorldObject, WorldState,
};

pub const DEFAULT_BACKOFF: f64 = 0.10;

/// One demonstrated grasp: the gripper frame in the object frame, plus the
/// approach standoff.
#[derive(Clone, Debug, PartialEq)]
pub struct GraspSpec {
    pub taught_grasp: Pose,
    /// Meters along the gripper approach axis.
    pub backoff: f64,
}

impl GraspSpec {
    /// Tool pointing down at the center of the object's top face.
    pub fn top_grasp(extents: &Vector3<f64>) -> Self {
        GraspSpec { taught_grasp: Pose::tool(0.0, 0.0, extents.z, 0.0), backoff: DEFAULT_BACKOFF }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReleaseTarget {
    /// Gripper pose in the world frame.
    World(Pose),
    /// Gripper pose in the frame of each query-matching object.
    Relative(Pose),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReleaseSpec {
    pub taught_release: ReleaseTarget,
    /// Meters along world +z.
    pub backoff: f64,
    pub query: Option<PredicateQuery>,
}

impl ReleaseSpec {
    pub fn validate(&self) -> Result<(), SymbolError> {
        if !(self.backoff > 0.0) {
            return Err(SymbolError::BadBackoff);
        }
        if matches!(self.taught_release, ReleaseTarget::Relative(_)) && self.query.is_none() {
            return Err(SymbolError::MissingQuery);
        }
        Ok(())
    }
}

/// A concrete grasp or release goal.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateGoal {
    /// Object grasped, or reference object released onto; `None` for a
    /// world-frame release.
    pub object_id: Option<ObjectId>,
    pub symmetry_index: u32,
    pub pose: Pose,
    pub backoff_pose: Pose,
    pub config: JointConfig,
    pub backoff_config: JointConfig,
    /// Weighted C-space distance from the current configuration to `config`.
    pub distance: f64,
}

fn symmetry_rotation(k: u32, order: u32) -> Pose {
    let r = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), 2.0 * PI * k as f64 / order as f64);
    Pose::new(Vector3::zeros(), r)
}

/// `pose ∘ Rz(2πk/order) ∘ local` for every `k`, keeping only the
/// downward-facing results, tagged with `k`.
fn expand(pose: &Pose, order: u32, local: &Pose) -> Vec<(u32, Pose)> {
    let order = order.max(1);
    (0..order)
        .map(|k| (k, pose.compose(&symmetry_rotation(k, order)).compose(local)))
        .filter(|(_, p)| p.is_downward())
        .collect()
}

/// Symmetry-expanded grasp poses for `obj`.
pub fn grasp_candidates(obj: &WorldObject, spec: &GraspSpec) -> Vec<Pose> {
    expand(&obj.pose, obj.symmetry_order, &spec.taught_grasp).into_iter().map(|(_, p)| p).collect()
}

fn goal(
    current: &JointConfig,
    object_id: Option<ObjectId>,
    k: u32,
    pose: Pose,
    backoff_pose: Pose,
) -> Option<CandidateGoal> {
    let config = inverse_kinematics(&pose).ok()?;
    let backoff_config = inverse_kinematics(&backoff_pose).ok()?;
    Some(CandidateGoal {
        object_id,
        symmetry_index: k,
        pose,
        backoff_pose,
        config,
        backoff_config,
        distance: current.distance(&config),
    })
}

fn sorted(mut goals: Vec<CandidateGoal>) -> Vec<CandidateGoal> {
    // Stable: generation order is (object id, symmetry index).
    goals.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    goals
}

/// Every reachable grasp of every detected object matching `query`, nearest
/// first.
pub fn sort_candidates(
    world: &WorldState,
    kb: &KnowledgeBase,
    query: &PredicateQuery,
    spec: &GraspSpec,
) -> Vec<CandidateGoal> {
    let mut goals = Vec::new();
    for (id, _) in pose_query(kb, world, query) {
        let det = &kb.detected[&id];
        for (k, pose) in expand(&det.pose, det.symmetry_order, &spec.taught_grasp) {
            let backoff_pose = pose.translated(-spec.backoff * pose.z_axis());
            goals.extend(goal(&world.robot, Some(id.clone()), k, pose, backoff_pose));
        }
    }
    sorted(goals)
}

/// Release goals for `spec`, nearest first. A relative spec is expanded over
/// every matching object except the one being held.
pub fn release_candidates(
    world: &WorldState,
    kb: &KnowledgeBase,
    query: Option<&PredicateQuery>,
    spec: &ReleaseSpec,
) -> Vec<CandidateGoal> {
    let raise = Vector3::new(0.0, 0.0, spec.backoff);
    match &spec.taught_release {
        ReleaseTarget::World(pose) => goal(&world.robot, None, 0, *pose, pose.translated(raise)).into_iter().collect(),
        ReleaseTarget::Relative(transform) => {
            let Some(query) = query.or(spec.query.as_ref()) else { return Vec::new() };
            let held = world.held_id();
            let mut goals = Vec::new();
            for (id, _) in pose_query(kb, world, query) {
                if Some(id.as_str()) == held {
                    continue;
                }
                let det = &kb.detected[&id];
                for (k, pose) in expand(&det.pose, det.symmetry_order, transform) {
                    goals.extend(goal(&world.robot, Some(id.clone()), k, pose, pose.translated(raise)));
                }
            }
            sorted(goals)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Stage {
    Start,
    Select,
    Align(PathFollower),
    MoveIn(PathFollower),
    Actuate(Timer),
    /// Grasp closed on nothing: reopen, back out, try the next candidate.
    Reopen(Timer),
    BackOut(PathFollower),
    Retreat(PathFollower),
    Done(TickStatus),
}

/// Resumable SmartGrasp / SmartRelease execution.
#[derive(Clone, Debug, PartialEq)]
pub struct SmartMachine {
    op: SmartOp,
    stage: Stage,
    candidates: Vec<CandidateGoal>,
    next: usize,
    entry_disabled: BTreeSet<ObjectId>,
    /// Object whose collisions this machine disabled for the current candidate.
    disabled_now: Option<ObjectId>,
}

pub enum SmartRequest<'a> {
    Grasp { query: &'a PredicateQuery, spec: &'a GraspSpec },
    Release { query: Option<&'a PredicateQuery>, spec: &'a ReleaseSpec },
}

impl SmartMachine {
    pub fn new(op: SmartOp) -> Self {
        SmartMachine {
            op,
            stage: Stage::Start,
            candidates: Vec::new(),
            next: 0,
            entry_disabled: BTreeSet::new(),
            disabled_now: None,
        }
    }

    fn current(&self) -> &CandidateGoal {
        &self.candidates[self.next]
    }

    fn restore_candidate(&mut self, world: &mut WorldState) {
        if let Some(id) = self.disabled_now.take() {
            world.collision_disabled.remove(&id);
            world.push(WorldDelta::CollisionsRestored { id });
        }
    }

    fn finish(&mut self, world: &mut WorldState, status: TickStatus) -> TickStatus {
        self.restore_candidate(world);
        let extra: Vec<ObjectId> = world.collision_disabled.difference(&self.entry_disabled).cloned().collect();
        for id in extra {
            world.collision_disabled.remove(&id);
            world.push(WorldDelta::CollisionsRestored { id });
        }
        self.stage = Stage::Done(status);
        status
    }

    /// Abandons an operation in progress, restoring the collision set.
    pub fn halt(&mut self, world: &mut WorldState) {
        if !matches!(self.stage, Stage::Start | Stage::Done(_)) {
            self.finish(world, TickStatus::Failure);
        }
    }

    fn phase(&self, world: &mut WorldState, phase: SmartPhase) {
        world.push(WorldDelta::Phase { op: self.op, phase });
    }

    /// Picks the first candidate with a collision-free straight approach
    /// and a plannable path to its backoff pose.
    fn select(&mut self, sim: &mut Sim) -> Option<PathFollower> {
        while self.next < self.candidates.len() {
            let cand = self.current().clone();
            if let Some(id) = &cand.object_id {
                if !sim.world.collision_disabled.contains(id) {
                    sim.world.collision_disabled.insert(id.clone());
                    sim.world.push(WorldDelta::CollisionsDisabled { id: id.clone() });
                    self.disabled_now = Some(id.clone());
                }
            }
            let w = &sim.world;
            let approach_ok = !check_collision(w, &cand.config)
                && segment_is_free(w, &cand.backoff_config, &cand.config, CHECK_RESOLUTION);
            if approach_ok {
                let params = sim.next_planner_params();
                if let Ok(plan) = plan_rrt_connect(&sim.world, &sim.world.robot, &cand.backoff_config, &params) {
                    return Some(PathFollower::new(&sim.world, &plan.waypoints, sim.config.sweep_resolution));
                }
            }
            self.restore_candidate(&mut sim.world);
            self.next += 1;
        }
        None
    }

    /// Advances by up to `slice` seconds; returns the status and the time used.
    pub fn tick(&mut self, sim: &mut Sim, req: &SmartRequest<'_>, slice: f64) -> (TickStatus, f64) {
        let mut used = 0.0;
        loop {
            let left = slice - used;
            let stage = core::mem::replace(&mut self.stage, Stage::Start);
            match stage {
                Stage::Done(s) => {
                    self.stage = Stage::Done(s);
                    return (s, used);
                }
                Stage::Start => {
                    self.entry_disabled = sim.world.collision_disabled.clone();
                    let holding = sim.world.gripper.held.is_some();
                    self.candidates = match req {
                        SmartRequest::Grasp { query, spec } => {
                            if holding {
                                return (self.finish(&mut sim.world, TickStatus::Failure), used);
                            }
                            sort_candidates(&sim.world, &sim.kb, query, spec)
                        }
                        SmartRequest::Release { query, spec } => {
                            if !holding {
                                return (self.finish(&mut sim.world, TickStatus::Failure), used);
                            }
                            release_candidates(&sim.world, &sim.kb, *query, spec)
                        }
                    };
                    self.next = 0;
                    self.stage = Stage::Select;
                }
                Stage::Select => match self.select(sim) {
                    Some(f) => {
                        self.phase(&mut sim.world, SmartPhase::Align);
                        self.stage = Stage::Align(f);
                    }
                    None => return (self.finish(&mut sim.world, TickStatus::Failure), used),
                },
                Stage::Align(mut f) => {
                    let (done, t) = follow(&mut sim.world, &mut f, left, &sim.config);
                    used += t;
                    if !done {
                        self.stage = Stage::Align(f);
                        return (TickStatus::Running, used);
                    }
                    self.phase(&mut sim.world, SmartPhase::MoveIn);
                    let target = self.current().config;
                    self.stage = Stage::MoveIn(PathFollower::straight(&sim.world, target, sim.config.sweep_resolution));
                }
                Stage::MoveIn(mut f) => {
                    let (done, t) = follow(&mut sim.world, &mut f, left, &sim.config);
                    used += t;
                    if !done {
                        self.stage = Stage::MoveIn(f);
                        return (TickStatus::Running, used);
                    }
                    self.phase(&mut sim.world, SmartPhase::Actuate);
                    match req {
                        SmartRequest::Grasp { spec, .. } => {
                            actuate_gripper(&mut sim.world, GripperTarget::Closed, Some(spec), &sim.config)
                        }
                        SmartRequest::Release { .. } => {
                            actuate_gripper(&mut sim.world, GripperTarget::Open, None, &sim.config)
                        }
                    }
                    self.stage = Stage::Actuate(Timer::new(sim.config.gripper_s));
                }
                Stage::Actuate(mut timer) => {
                    let (done, t) = timer.advance(left);
                    used += t;
                    if !done {
                        self.stage = Stage::Actuate(timer);
                        return (TickStatus::Running, used);
                    }
                    let target = self.current().backoff_config;
                    let f = PathFollower::straight(&sim.world, target, sim.config.sweep_resolution);
                    if self.op == SmartOp::Grasp && sim.world.gripper.held.is_none() {
                        actuate_gripper(&mut sim.world, GripperTarget::Open, None, &sim.config);
                        self.stage = Stage::Reopen(Timer::new(sim.config.gripper_s));
                    } else {
                        self.phase(&mut sim.world, SmartPhase::Retreat);
                        self.stage = Stage::Retreat(f);
                    }
                }
                Stage::Reopen(mut timer) => {
                    let (done, t) = timer.advance(left);
                    used += t;
                    if !done {
                        self.stage = Stage::Reopen(timer);
                        return (TickStatus::Running, used);
                    }
                    let target = self.current().backoff_config;
                    self.stage =
                        Stage::BackOut(PathFollower::straight(&sim.world, target, sim.config.sweep_resolution));
                }
                Stage::BackOut(mut f) => {
                    let (done, t) = follow(&mut sim.world, &mut f, left, &sim.config);
                    used += t;
                    if !done {
                        self.stage = Stage::BackOut(f);
                        return (TickStatus::Running, used);
                    }
                    self.restore_candidate(&mut sim.world);
                    // The object is not where the snapshot says; skip its other grasps.
                    let missed = self.current().object_id.clone();
                    while self.next < self.candidates.len() && self.candidates[self.next].object_id == missed {
                        self.next += 1;
                    }
                    self.stage = Stage::Select;
                }
                Stage::Retreat(mut f) => {
                    let (done, t) = follow(&mut sim.world, &mut f, left, &sim.config);
                    used += t;
                    if !done {
                        self.stage = Stage::Retreat(f);
                        return (TickStatus::Running, used);
                    }
                    sim.kb.last_grasped = match self.op {
                        SmartOp::Grasp => sim.world.held_id().map(Into::into),
                        SmartOp::Release => None,
                    };
                    return (self.finish(&mut sim.world, TickStatus::Success), used);
                }
            }
        }
    }
}

fn run_to_end(sim: &mut Sim, op: SmartOp, req: SmartRequest<'_>) -> TickStatus {
    let mut m = SmartMachine::new(op);
    let (status, used) = m.tick(sim, &req, f64::INFINITY);
    sim.world.sim_time += used;
    status
}

/// Picks the nearest reachable object matching `query`, start to finish.
pub fn smart_grasp(sim: &mut Sim, query: &PredicateQuery, spec: &GraspSpec) -> TickStatus {
    run_to_end(sim, SmartOp::Grasp, SmartRequest::Grasp { query, spec })
}

/// Places the held object at the nearest reachable release pose.
pub fn smart_release(sim: &mut Sim, query: Option<&PredicateQuery>, spec: &ReleaseSpec) -> TickStatus {
    run_to_end(sim, SmartOp::Release, SmartRequest::Release { query, spec })
}
