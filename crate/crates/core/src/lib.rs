//! Behavior Tree task execution against a deterministic tabletop world.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation: tree semantics, the s-expression tree language, the
//! knowledge store, a 4-DOF gantry world with box collision geometry, an
//! RRT-Connect planner, predicate-driven pick and place (`SmartGrasp` /
//! `SmartRelease`), capability profiles and the task score. File formats
//! and the command line live in the companion `tabletop` crate.
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bt;
pub mod dsl;
pub mod motion;
pub mod predicator;
pub mod profiles;
pub mod scoring;
pub mod sim;
pub mod smartmove;
pub mod world;

pub use bt::{reset_tree, run_tree, tick_node, ExecutionTrace, NodeKind, Outcome, TickStatus, TreeNode};
pub use predicator::{KnowledgeBase, PredicateAtom, PredicateQuery, SymbolKind, TaughtSymbol};
pub use profiles::CapabilityProfile;
pub use scoring::{score, ScoreBreakdown, TaskGoal};
pub use sim::{Sim, SimConfig};
pub use world::{Category, JointConfig, Pose, WorldObject, WorldState};
