//! Leaf operations and their incremental execution.

use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use crate::bt::TickStatus;
use crate::motion::plan_rrt_connect;
use crate::predicator::{
    detect_objects, disable_collisions, knowledge_test, resolve_relative, PredicateQuery, SymbolKind, SymbolPayload,
};
use crate::sim::{follow, Sim, Timer};
use crate::smartmove::{SmartMachine, SmartRequest};
use crate::world::physics::{actuate_gripper, PathFollower};
use crate::world::{inverse_kinematics, GripperTarget, JointConfig, ObjectId, SmartOp};

/// Registered leaf operation identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    Gripper,
    ServoToJoint,
    PlanToJoint,
    PlanToHome,
    MoveToRelativeWaypoint,
    DetectObjects,
    DisableCollisions,
    KnowledgeTest,
    SmartGrasp,
    SmartRelease,
    AlwaysSuccess,
    AlwaysFailure,
    AlwaysRunning,
}

impl OpKind {
    pub const ALL: [OpKind; 13] = [
        OpKind::Gripper,
        OpKind::ServoToJoint,
        OpKind::PlanToJoint,
        OpKind::PlanToHome,
        OpKind::MoveToRelativeWaypoint,
        OpKind::DetectObjects,
        OpKind::DisableCollisions,
        OpKind::KnowledgeTest,
        OpKind::SmartGrasp,
        OpKind::SmartRelease,
        OpKind::AlwaysSuccess,
        OpKind::AlwaysFailure,
        OpKind::AlwaysRunning,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OpKind::Gripper => "gripper",
            OpKind::ServoToJoint => "servo-to-joint",
            OpKind::PlanToJoint => "plan-to-joint",
            OpKind::PlanToHome => "plan-to-home",
            OpKind::MoveToRelativeWaypoint => "move-to-relative-waypoint",
            OpKind::DetectObjects => "detect-objects",
            OpKind::DisableCollisions => "disable-collisions",
            OpKind::KnowledgeTest => "knowledge-test",
            OpKind::SmartGrasp => "smart-grasp",
            OpKind::SmartRelease => "smart-release",
            OpKind::AlwaysSuccess => "always-success",
            OpKind::AlwaysFailure => "always-failure",
            OpKind::AlwaysRunning => "always-running",
        }
    }

    pub fn parse(s: &str) -> Option<OpKind> {
        OpKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Late-bound reference to a taught symbol (`@name` in tree files).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SymbolRef(pub String);

impl fmt::Display for SymbolRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LeafOp {
    Gripper(GripperTarget),
    ServoToJoint(SymbolRef),
    PlanToJoint(SymbolRef),
    PlanToHome,
    MoveToRelativeWaypoint(SymbolRef),
    DetectObjects,
    DisableCollisions(ObjectId),
    KnowledgeTest(PredicateQuery),
    SmartGrasp {
        query: PredicateQuery,
        spec: SymbolRef,
    },
    SmartRelease {
        query: Option<PredicateQuery>,
        spec: SymbolRef,
    },
    /// Static leaf returning the same status on every tick.
    Constant(TickStatus),
}

impl LeafOp {
    pub fn kind(&self) -> OpKind {
        match self {
            LeafOp::Gripper(_) => OpKind::Gripper,
            LeafOp::ServoToJoint(_) => OpKind::ServoToJoint,
            LeafOp::PlanToJoint(_) => OpKind::PlanToJoint,
            LeafOp::PlanToHome => OpKind::PlanToHome,
            LeafOp::MoveToRelativeWaypoint(_) => OpKind::MoveToRelativeWaypoint,
            LeafOp::DetectObjects => OpKind::DetectObjects,
            LeafOp::DisableCollisions(_) => OpKind::DisableCollisions,
            LeafOp::KnowledgeTest(_) => OpKind::KnowledgeTest,
            LeafOp::SmartGrasp { .. } => OpKind::SmartGrasp,
            LeafOp::SmartRelease { .. } => OpKind::SmartRelease,
            LeafOp::Constant(TickStatus::Success) => OpKind::AlwaysSuccess,
            LeafOp::Constant(TickStatus::Failure) => OpKind::AlwaysFailure,
            LeafOp::Constant(TickStatus::Running) => OpKind::AlwaysRunning,
        }
    }

    /// The symbol this op references and the kind it must have.
    pub fn symbol(&self) -> Option<(&SymbolRef, SymbolKind)> {
        match self {
            LeafOp::ServoToJoint(s) | LeafOp::PlanToJoint(s) => Some((s, SymbolKind::JointWaypoint)),
            LeafOp::MoveToRelativeWaypoint(s) => Some((s, SymbolKind::RelativeWaypoint)),
            LeafOp::SmartGrasp { spec, .. } => Some((spec, SymbolKind::GraspSpec)),
            LeafOp::SmartRelease { spec, .. } => Some((spec, SymbolKind::ReleaseSpec)),
            _ => None,
        }
    }
}

/// In-flight state of a leaf.
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) enum LeafRun {
    #[default]
    Idle,
    Wait(Timer),
    Move(Box<PathFollower>),
    Smart(Box<SmartMachine>),
}

impl LeafRun {
    pub(crate) fn halt(&mut self, sim: &mut Sim) {
        if let LeafRun::Smart(m) = self {
            m.halt(&mut sim.world);
        }
        *self = LeafRun::Idle;
    }
}

fn payload<'a>(sim: &'a Sim, op: &LeafOp) -> Option<&'a SymbolPayload> {
    let (sym, kind) = op.symbol()?;
    let found = sim.kb.symbol(&sym.0)?;
    (found.kind() == kind).then_some(&found.payload)
}

fn joint_target(sim: &Sim, op: &LeafOp) -> Option<JointConfig> {
    match payload(sim, op)? {
        SymbolPayload::Joint(q) => Some(*q),
        _ => None,
    }
}

fn planned(sim: &mut Sim, goal: JointConfig) -> Option<LeafRun> {
    let params = sim.next_planner_params();
    let plan = plan_rrt_connect(&sim.world, &sim.world.robot, &goal, &params).ok()?;
    Some(LeafRun::Move(Box::new(PathFollower::new(&sim.world, &plan.waypoints, sim.config.sweep_resolution))))
}

fn permitted(sim: &Sim, op: &LeafOp) -> bool {
    let Some(profile) = &sim.profile else { return true };
    profile.allows_op(op.kind()) && op.symbol().is_none_or(|(_, k)| profile.allows_symbol(k))
}

/// Starts `op`. Instant ops finish here and return their status.
fn start(op: &LeafOp, sim: &mut Sim) -> Result<LeafRun, TickStatus> {
    if !permitted(sim, op) || (op.symbol().is_some() && payload(sim, op).is_none()) {
        return Err(TickStatus::Failure);
    }
    let cfg = sim.config.clone();
    match op {
        LeafOp::Gripper(target) => {
            actuate_gripper(&mut sim.world, *target, None, &cfg);
            Ok(LeafRun::Wait(Timer::new(cfg.gripper_s)))
        }
        LeafOp::DetectObjects => {
            detect_objects(&mut sim.world, &mut sim.kb, &mut sim.rng);
            Ok(LeafRun::Wait(Timer::new(cfg.detect_s)))
        }
        LeafOp::ServoToJoint(_) => match joint_target(sim, op) {
            Some(q) if q.within_limits() => {
                Ok(LeafRun::Move(Box::new(PathFollower::straight(&sim.world, q, cfg.sweep_resolution))))
            }
            _ => Err(TickStatus::Failure),
        },
        LeafOp::PlanToJoint(_) => {
            let q = joint_target(sim, op).ok_or(TickStatus::Failure)?;
            planned(sim, q).ok_or(TickStatus::Failure)
        }
        LeafOp::PlanToHome => {
            let home = sim.world.home;
            planned(sim, home).ok_or(TickStatus::Failure)
        }
        LeafOp::MoveToRelativeWaypoint(_) => {
            let Some(SymbolPayload::Relative { category, transform }) = payload(sim, op).cloned() else {
                return Err(TickStatus::Failure);
            };
            let pose = resolve_relative(&sim.kb, &sim.world, category, &transform).ok_or(TickStatus::Failure)?;
            let q = inverse_kinematics(&pose).map_err(|_| TickStatus::Failure)?;
            planned(sim, q).ok_or(TickStatus::Failure)
        }
        LeafOp::DisableCollisions(id) => Err(disable_collisions(&mut sim.world, id)),
        LeafOp::KnowledgeTest(q) => Err(knowledge_test(&sim.kb, &sim.world, q)),
        LeafOp::SmartGrasp { .. } => Ok(LeafRun::Smart(Box::new(SmartMachine::new(SmartOp::Grasp)))),
        LeafOp::SmartRelease { .. } => Ok(LeafRun::Smart(Box::new(SmartMachine::new(SmartOp::Release)))),
        LeafOp::Constant(s) => Err(*s),
    }
}

/// Advances `op` by up to `slice` seconds; returns the status and time used.
pub(crate) fn exec_leaf(op: &LeafOp, run: &mut LeafRun, sim: &mut Sim, slice: f64) -> (TickStatus, f64) {
    if *run == LeafRun::Idle {
        match start(op, sim) {
            Ok(r) => *run = r,
            Err(status) => return (status, 0.0),
        }
    }
    let (status, used) = match run {
        LeafRun::Idle => (TickStatus::Failure, 0.0),
        LeafRun::Wait(t) => match t.advance(slice) {
            (true, u) => (TickStatus::Success, u),
            (false, u) => (TickStatus::Running, u),
        },
        LeafRun::Move(f) => match follow(&mut sim.world, f, slice, &sim.config) {
            (true, u) => (TickStatus::Success, u),
            (false, u) => (TickStatus::Running, u),
        },
        LeafRun::Smart(m) => match (op, payload(sim, op).cloned()) {
            (LeafOp::SmartGrasp { query, .. }, Some(SymbolPayload::Grasp(spec))) => {
                m.tick(sim, &SmartRequest::Grasp { query, spec: &spec }, slice)
            }
            (LeafOp::SmartRelease { query, .. }, Some(SymbolPayload::Release(spec))) => {
                m.tick(sim, &SmartRequest::Release { query: query.as_ref(), spec: &spec }, slice)
            }
            _ => {
                m.halt(&mut sim.world);
                (TickStatus::Failure, 0.0)
            }
        },
    };
    if status != TickStatus::Running {
        *run = LeafRun::Idle;
    }
    (status, used)
}
