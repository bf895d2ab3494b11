//! Knowledge store: detected-object snapshots, taught symbols and predicate
//! evaluation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::bt::TickStatus;
use crate::smartmove::{GraspSpec, ReleaseSpec};
use crate::world::{Category, JointConfig, ObjectId, Pose, WorldDelta, WorldState};

/// Snapshot of one object as seen by the last scan.
#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub category: Category,
    pub pose: Pose,
    pub extents: Vector3<f64>,
    pub symmetry_order: u32,
    pub time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    JointWaypoint,
    RelativeWaypoint,
    GraspSpec,
    ReleaseSpec,
}

impl SymbolKind {
    pub const ALL: [SymbolKind; 4] =
        [SymbolKind::JointWaypoint, SymbolKind::RelativeWaypoint, SymbolKind::GraspSpec, SymbolKind::ReleaseSpec];

    pub fn as_str(&self) -> &'static str {
        match self {
            SymbolKind::JointWaypoint => "joint_waypoint",
            SymbolKind::RelativeWaypoint => "relative_waypoint",
            SymbolKind::GraspSpec => "grasp_spec",
            SymbolKind::ReleaseSpec => "release_spec",
        }
    }

    pub fn parse(s: &str) -> Option<SymbolKind> {
        SymbolKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SymbolPayload {
    Joint(JointConfig),
    /// Gripper pose expressed in the frame of an object of `category`.
    Relative {
        category: Category,
        transform: Pose,
    },
    Grasp(GraspSpec),
    Release(ReleaseSpec),
}

impl SymbolPayload {
    pub fn kind(&self) -> SymbolKind {
        match self {
            SymbolPayload::Joint(_) => SymbolKind::JointWaypoint,
            SymbolPayload::Relative { .. } => SymbolKind::RelativeWaypoint,
            SymbolPayload::Grasp(_) => SymbolKind::GraspSpec,
            SymbolPayload::Release(_) => SymbolKind::ReleaseSpec,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaughtSymbol {
    pub name: String,
    pub payload: SymbolPayload,
}

impl TaughtSymbol {
    pub fn kind(&self) -> SymbolKind {
        self.payload.kind()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymbolError {
    #[error("symbol name must be non-empty")]
    EmptyName,
    #[error("joint waypoint is outside the joint limits")]
    OutOfLimits,
    #[error("no object of category `{0}` in the scene")]
    UnknownCategory(Category),
    #[error("backoff must be positive")]
    BadBackoff,
    #[error("relative release needs a non-empty query")]
    MissingQuery,
    #[error("{0}")]
    BadQuery(#[from] QueryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PredicateAtom {
    IsCategory(Category),
    LeftOfRobot,
    RightOfRobot,
    GripperHolding,
    Found(Category),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("a query needs at least one atom")]
    Empty,
    #[error("a query may name at most one category")]
    TwoCategories,
}

/// Conjunction of atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct PredicateQuery {
    atoms: Vec<PredicateAtom>,
}

impl PredicateQuery {
    pub fn new(atoms: Vec<PredicateAtom>) -> Result<Self, QueryError> {
        if atoms.is_empty() {
            return Err(QueryError::Empty);
        }
        if atoms.iter().filter(|a| matches!(a, PredicateAtom::IsCategory(_))).count() > 1 {
            return Err(QueryError::TwoCategories);
        }
        Ok(PredicateQuery { atoms })
    }

    pub fn atoms(&self) -> &[PredicateAtom] {
        &self.atoms
    }

    /// True when the query only inspects the gripper.
    pub fn is_gripper_only(&self) -> bool {
        self.atoms.iter().all(|a| *a == PredicateAtom::GripperHolding)
    }

    /// Categories the query refers to.
    pub fn categories(&self) -> impl Iterator<Item = Category> + '_ {
        self.atoms.iter().filter_map(|a| match a {
            PredicateAtom::IsCategory(c) | PredicateAtom::Found(c) => Some(*c),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct KnowledgeBase {
    pub detected: BTreeMap<ObjectId, Detection>,
    pub taught: BTreeMap<String, TaughtSymbol>,
    pub last_grasped: Option<ObjectId>,
    /// Std-dev of Gaussian noise added to detected x and y by `detect_objects`, meters.
    pub perception_noise_sigma: f64,
}

impl KnowledgeBase {
    pub fn symbol(&self, name: &str) -> Option<&TaughtSymbol> {
        self.taught.get(name)
    }
}

/// Replaces the snapshot with every object's current pose, optionally
/// perturbed by horizontal position noise. Always succeeds.
pub fn detect_objects<R: Rng + ?Sized>(world: &mut WorldState, kb: &mut KnowledgeBase, rng: &mut R) -> TickStatus {
    let noise = if kb.perception_noise_sigma > 0.0 { Normal::new(0.0, kb.perception_noise_sigma).ok() } else { None };
    kb.detected.clear();
    for obj in &world.objects {
        let mut pose = obj.pose;
        if let Some(n) = &noise {
            let d = Vector3::new(n.sample(rng), n.sample(rng), 0.0);
            pose = pose.translated(d);
        }
        kb.detected.insert(
            obj.id.clone(),
            Detection {
                category: obj.category,
                pose,
                extents: obj.extents,
                symmetry_order: obj.symmetry_order,
                time: world.sim_time,
            },
        );
    }
    let count = kb.detected.len();
    world.push(WorldDelta::Detected { count });
    TickStatus::Success
}

/// Evaluates one atom for an object of `category` at `pose`.
///
/// Robot base is at the origin with +x forward and +y to the left; the
/// side tests are strict, so `y = 0` is neither left nor right.
pub fn eval_atom(atom: &PredicateAtom, category: Category, pose: &Pose, world: &WorldState) -> bool {
    match atom {
        PredicateAtom::IsCategory(c) | PredicateAtom::Found(c) => category == *c,
        PredicateAtom::LeftOfRobot => pose.position().y > 0.0,
        PredicateAtom::RightOfRobot => pose.position().y < 0.0,
        PredicateAtom::GripperHolding => world.gripper.held.is_some(),
    }
}

fn matches(query: &PredicateQuery, det: &Detection, world: &WorldState) -> bool {
    query.atoms().iter().all(|a| eval_atom(a, det.category, &det.pose, world))
}

/// All detected objects satisfying `query`, ordered by object id.
pub fn pose_query(kb: &KnowledgeBase, world: &WorldState, query: &PredicateQuery) -> Vec<(ObjectId, Pose)> {
    kb.detected.iter().filter(|(_, d)| matches(query, d, world)).map(|(id, d)| (id.clone(), d.pose)).collect()
}

/// Success iff the query holds: for a gripper-only query, iff something is
/// held; otherwise iff some detected object satisfies every atom.
pub fn knowledge_test(kb: &KnowledgeBase, world: &WorldState, query: &PredicateQuery) -> TickStatus {
    let holds = if query.is_gripper_only() {
        world.gripper.held.is_some()
    } else {
        kb.detected.values().any(|d| matches(query, d, world))
    };
    if holds {
        TickStatus::Success
    } else {
        TickStatus::Failure
    }
}

/// Stores (or overwrites) a taught symbol after validating its payload.
pub fn save_waypoint(
    kb: &mut KnowledgeBase,
    world: &WorldState,
    name: &str,
    payload: SymbolPayload,
) -> Result<(), SymbolError> {
    if name.is_empty() {
        return Err(SymbolError::EmptyName);
    }
    match &payload {
        SymbolPayload::Joint(q) if !q.within_limits() => return Err(SymbolError::OutOfLimits),
        SymbolPayload::Relative { category, .. } if !world.categories().contains(category) => {
            return Err(SymbolError::UnknownCategory(*category))
        }
        SymbolPayload::Grasp(g) if !(g.backoff > 0.0) => return Err(SymbolError::BadBackoff),
        SymbolPayload::Release(r) => r.validate()?,
        _ => {}
    }
    kb.taught.insert(name.into(), TaughtSymbol { name: name.into(), payload });
    Ok(())
}

/// Lets the robot touch `target` without the contact counting as a collision
/// or a knock.
pub fn disable_collisions(world: &mut WorldState, target: &str) -> TickStatus {
    if world.object(target).is_none() {
        return TickStatus::Failure;
    }
    if world.collision_disabled.insert(target.into()) {
        world.push(WorldDelta::CollisionsDisabled { id: target.into() });
    }
    TickStatus::Success
}

/// Detected object of `category` nearest to the gripper position (ties go
/// to the lowest id). `exclude` is skipped.
pub fn nearest_detected<'a>(
    kb: &'a KnowledgeBase,
    world: &WorldState,
    category: Category,
    exclude: Option<&str>,
) -> Option<(&'a ObjectId, &'a Detection)> {
    let tcp = world.gripper_pose().position();
    let mut best: Option<(f64, (&ObjectId, &Detection))> = None;
    for (id, d) in &kb.detected {
        if d.category != category || Some(id.as_str()) == exclude {
            continue;
        }
        let dist = (d.pose.position() - tcp).norm();
        if best.is_none_or(|(b, _)| dist < b) {
            best = Some((dist, (id, d)));
        }
    }
    best.map(|(_, hit)| hit)
}

/// World pose of a relative waypoint, bound to the nearest detected object
/// of its category.
pub fn resolve_relative(kb: &KnowledgeBase, world: &WorldState, category: Category, transform: &Pose) -> Option<Pose> {
    nearest_detected(kb, world, category, None).map(|(_, d)| d.pose.compose(transform))
}
