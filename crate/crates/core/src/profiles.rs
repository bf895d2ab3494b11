//! Capability profiles: which leaf ops and symbol kinds a tree may use.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bt::validate_paths;
use crate::bt::{NodeKind, OpKind, TreeNode, Violation, ViolationKind};
use crate::predicator::SymbolKind;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapabilityProfile {
    pub name: String,
    pub allowed_ops: BTreeSet<OpKind>,
    pub allowed_symbol_kinds: BTreeSet<SymbolKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProfileError {
    #[error("profile name must be non-empty")]
    EmptyName,
    #[error("profile `{0}` allows no operations")]
    NoOps(String),
}

impl CapabilityProfile {
    pub fn new(
        name: impl Into<String>,
        ops: impl IntoIterator<Item = OpKind>,
        kinds: impl IntoIterator<Item = SymbolKind>,
    ) -> Result<Self, ProfileError> {
        let name = name.into();
        if name.is_empty() {
            return Err(ProfileError::EmptyName);
        }
        let allowed_ops: BTreeSet<_> = ops.into_iter().collect();
        if allowed_ops.is_empty() {
            return Err(ProfileError::NoOps(name));
        }
        Ok(CapabilityProfile { name, allowed_ops, allowed_symbol_kinds: kinds.into_iter().collect() })
    }

    fn builtin(name: &str, ops: &[OpKind], kinds: &[SymbolKind]) -> Self {
        Self::new(name, ops.iter().copied(), kinds.iter().copied()).expect("builtin profiles are well formed")
    }

    /// Blind joint-space waypoints and the gripper.
    pub fn simple() -> Self {
        Self::builtin("simple", &[OpKind::ServoToJoint, OpKind::Gripper], &[SymbolKind::JointWaypoint])
    }

    /// Simple plus perception-as-geometry and collision-free planning.
    pub fn motion() -> Self {
        Self::builtin(
            "motion",
            &[
                OpKind::ServoToJoint,
                OpKind::Gripper,
                OpKind::DetectObjects,
                OpKind::DisableCollisions,
                OpKind::PlanToJoint,
                OpKind::PlanToHome,
            ],
            &[SymbolKind::JointWaypoint],
        )
    }

    /// Motion plus waypoints relative to detected objects.
    pub fn relative() -> Self {
        let mut p = Self::motion();
        p.name = "relative".into();
        p.allowed_ops.insert(OpKind::MoveToRelativeWaypoint);
        p.allowed_symbol_kinds.insert(SymbolKind::RelativeWaypoint);
        p
    }

    /// Predicate-driven SmartGrasp / SmartRelease. Raw servo moves and
    /// relative waypoints are not part of it.
    pub fn smartmove() -> Self {
        Self::builtin(
            "smartmove",
            &[
                OpKind::DetectObjects,
                OpKind::KnowledgeTest,
                OpKind::Gripper,
                OpKind::SmartGrasp,
                OpKind::SmartRelease,
                OpKind::PlanToHome,
            ],
            &[SymbolKind::GraspSpec, SymbolKind::ReleaseSpec, SymbolKind::JointWaypoint],
        )
    }

    /// Looks up one of the four built-in profiles by name.
    pub fn by_name(name: &str) -> Option<Self> {
        builtin_profiles().into_iter().find(|p| p.name == name)
    }

    pub fn allows_op(&self, op: OpKind) -> bool {
        self.allowed_ops.contains(&op)
    }

    pub fn allows_symbol(&self, kind: SymbolKind) -> bool {
        self.allowed_symbol_kinds.contains(&kind)
    }
}

pub fn builtin_profiles() -> Vec<CapabilityProfile> {
    alloc::vec![
        CapabilityProfile::simple(),
        CapabilityProfile::motion(),
        CapabilityProfile::relative(),
        CapabilityProfile::smartmove(),
    ]
}

/// One violation per leaf whose op (or referenced symbol kind) the profile
/// does not allow.
pub fn profile_violations(tree: &TreeNode, profile: &CapabilityProfile) -> Vec<Violation> {
    let mut out = Vec::new();
    for (path, node) in validate_paths(tree) {
        let NodeKind::Leaf(op) = &node.kind else { continue };
        if !profile.allows_op(op.kind()) {
            out.push(Violation {
                path,
                kind: ViolationKind::OpNotInProfile,
                message: format!("operation `{}` is not available under profile `{}`", op.kind(), profile.name),
            });
        } else if let Some((sym, kind)) = op.symbol() {
            if !profile.allows_symbol(kind) {
                out.push(Violation {
                    path,
                    kind: ViolationKind::SymbolKindNotInProfile,
                    message: format!("symbol {sym} of kind {kind} is not available under profile `{}`", profile.name),
                });
            }
        }
    }
    out
}

/// Structural and profile violations; empty means runnable.
pub fn check_tree(tree: &TreeNode, profile: &CapabilityProfile) -> Vec<Violation> {
    crate::dsl::validate_tree(tree, profile)
}
