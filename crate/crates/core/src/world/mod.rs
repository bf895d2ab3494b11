//! The tabletop world: objects, the gantry arm and its gripper.
//!
//! `WorldState` is the single mutable simulation truth. Perception only ever
//! sees snapshots of it (see [`crate::predicator`]).

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::Vector3;

pub mod collision;
pub mod kinematics;
pub mod physics;
pub mod pose;

pub use collision::{check_collision, Prism};
pub use kinematics::{forward_kinematics, inverse_kinematics, JointConfig};
pub use physics::{set_gripper, settle_object, sweep_and_apply, GripperTarget, MoveOutcome};
pub use pose::{normalize_angle, Pose};

pub type ObjectId = String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WorldError {
    #[error("joint configuration ({x}, {y}, {z}, {yaw}) is outside the joint limits")]
    OutOfLimits { x: f64, y: f64, z: f64, yaw: f64 },
    #[error("unreachable pose: {0}")]
    Unreachable(&'static str),
    #[error("unknown object `{0}`")]
    UnknownObject(ObjectId),
    #[error("invalid object `{id}`: {reason}")]
    InvalidObject { id: ObjectId, reason: &'static str },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Node,
    Link,
}

impl Category {
    pub const ALL: [Category; 2] = [Category::Node, Category::Link];

    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Node => "node",
            Category::Link => "link",
        }
    }

    pub fn parse(s: &str) -> Option<Category> {
        match s {
            "node" => Some(Category::Node),
            "link" => Some(Category::Link),
            _ => None,
        }
    }

    /// Rotational symmetry order about local z used when none is given.
    pub fn default_symmetry(&self) -> u32 {
        match self {
            Category::Node => 4,
            Category::Link => 2,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorldObject {
    pub id: ObjectId,
    pub category: Category,
    pub pose: Pose,
    /// Box half-sizes along the object's local axes, meters.
    pub extents: Vector3<f64>,
    pub symmetry_order: u32,
    pub attached: bool,
    pub knocked: bool,
    pub mated_on: Option<ObjectId>,
    /// A gripper close happened within twice the grasp tolerance of this object.
    pub grasp_attempted: bool,
    /// The object has been released from the gripper at least once.
    pub placed: bool,
}

impl WorldObject {
    pub fn new(
        id: impl Into<ObjectId>,
        category: Category,
        pose: Pose,
        extents: Vector3<f64>,
        symmetry_order: u32,
    ) -> Result<Self, WorldError> {
        let id = id.into();
        if !(extents.x > 0.0 && extents.y > 0.0 && extents.z > 0.0) {
            return Err(WorldError::InvalidObject { id, reason: "extents must be positive" });
        }
        if symmetry_order == 0 {
            return Err(WorldError::InvalidObject { id, reason: "symmetry order must be at least 1" });
        }
        Ok(WorldObject {
            id,
            category,
            pose,
            extents,
            symmetry_order,
            attached: false,
            knocked: false,
            mated_on: None,
            grasp_attempted: false,
            placed: false,
        })
    }

    /// Upright object resting on a surface at height `base_z`.
    pub fn resting(
        id: impl Into<ObjectId>,
        category: Category,
        x: f64,
        y: f64,
        base_z: f64,
        yaw: f64,
        extents: Vector3<f64>,
    ) -> Result<Self, WorldError> {
        let pose = Pose::upright(x, y, base_z + extents.z, yaw);
        Self::new(id, category, pose, extents, category.default_symmetry())
    }
}

/// Object currently in the gripper, with its pose in the tool frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Held {
    pub id: ObjectId,
    pub grip: Pose,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Gripper {
    pub closed: bool,
    pub held: Option<Held>,
}

/// Something that happened to the world; collected for execution traces.
#[derive(Clone, Debug, PartialEq)]
pub enum WorldDelta {
    Knocked { id: ObjectId },
    GripperClosed { held: Option<ObjectId> },
    GripperOpened { released: Option<ObjectId> },
    Settled { id: ObjectId, on: Option<ObjectId> },
    Mated { link: ObjectId, node: ObjectId },
    CollisionsDisabled { id: ObjectId },
    CollisionsRestored { id: ObjectId },
    Detected { count: usize },
    Phase { op: SmartOp, phase: SmartPhase },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmartOp {
    Grasp,
    Release,
}

/// Steps of a smart pick or place, in execution order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmartPhase {
    /// Planned motion to the backoff pose.
    Align,
    /// Straight move from backoff to the grasp or release pose.
    MoveIn,
    /// Gripper actuation (close for grasp, open for release).
    Actuate,
    /// Straight retreat back to the backoff pose.
    Retreat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorldState {
    pub objects: Vec<WorldObject>,
    pub robot: JointConfig,
    pub home: JointConfig,
    pub gripper: Gripper,
    pub collision_disabled: BTreeSet<ObjectId>,
    pub table_z: f64,
    pub sim_time: f64,
    pub log: Vec<WorldDelta>,
}

impl WorldState {
    pub fn new(home: JointConfig, table_z: f64, objects: Vec<WorldObject>) -> Self {
        WorldState {
            objects,
            robot: home,
            home,
            gripper: Gripper::default(),
            collision_disabled: BTreeSet::new(),
            table_z,
            sim_time: 0.0,
            log: Vec::new(),
        }
    }

    pub fn object(&self, id: &str) -> Option<&WorldObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn object_mut(&mut self, id: &str) -> Option<&mut WorldObject> {
        self.objects.iter_mut().find(|o| o.id == id)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.id == id)
    }

    pub fn held_id(&self) -> Option<&str> {
        self.gripper.held.as_ref().map(|h| h.id.as_str())
    }

    pub fn gripper_pose(&self) -> Pose {
        kinematics::tool_pose(&self.robot)
    }

    /// Moves the arm; a held object follows rigidly.
    pub fn set_robot(&mut self, q: JointConfig) {
        self.robot = q;
        if let Some(held) = &self.gripper.held {
            let pose = kinematics::tool_pose(&q).compose(&held.grip);
            let id = held.id.clone();
            if let Some(obj) = self.object_mut(&id) {
                obj.pose = pose;
            }
        }
    }

    pub fn push(&mut self, delta: WorldDelta) {
        self.log.push(delta);
    }

    pub fn drain_log(&mut self) -> Vec<WorldDelta> {
        core::mem::take(&mut self.log)
    }

    pub fn categories(&self) -> BTreeSet<Category> {
        self.objects.iter().map(|o| o.category).collect()
    }
}
