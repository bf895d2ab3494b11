use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{NodeKind, RepeatCount, TreeNode};

pub const MAX_DEPTH: usize = 256;
pub const MAX_CHILDREN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// Wrong number of children for the node kind.
    Arity,
    /// Root somewhere other than the top, or a top node that is not Root.
    RootPlacement,
    TooDeep,
    TooManyChildren,
    /// Repeat with a zero count.
    BadRepeat,
    /// Leaf op outside the profile whitelist.
    OpNotInProfile,
    /// Leaf references a symbol kind outside the profile whitelist.
    SymbolKindNotInProfile,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub path: Vec<usize>,
    pub kind: ViolationKind,
    pub message: String,
}

fn kind_name(kind: &NodeKind) -> &'static str {
    match kind {
        NodeKind::Root => "root",
        NodeKind::Sequence => "sequence",
        NodeKind::Selector => "selector",
        NodeKind::ParallelAll => "parallel-all",
        NodeKind::Repeat(_) => "repeat",
        NodeKind::Leaf(op) => op.kind().name(),
    }
}

pub(crate) fn paths(tree: &TreeNode) -> Vec<(Vec<usize>, &TreeNode)> {
    let mut out = Vec::new();
    let mut stack = vec![(Vec::new(), tree)];
    while let Some((path, node)) = stack.pop() {
        for (i, c) in node.children.iter().enumerate().rev() {
            let mut p = path.clone();
            p.push(i);
            stack.push((p, c));
        }
        out.push((path, node));
    }
    out
}

/// Structural problems: arity, Root placement, depth and width limits.
pub fn structural_violations(tree: &TreeNode) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |path: &[usize], kind, message: String| out.push(Violation { path: path.to_vec(), kind, message });
    for (path, node) in paths(tree) {
        let n = node.children.len();
        let name = kind_name(&node.kind);
        let is_root = matches!(node.kind, NodeKind::Root);
        if path.is_empty() != is_root {
            let msg = if is_root { "root may only appear at the top" } else { "the top node must be root" };
            push(&path, ViolationKind::RootPlacement, msg.into());
        }
        if path.len() + 1 > MAX_DEPTH {
            push(&path, ViolationKind::TooDeep, format!("tree deeper than {MAX_DEPTH}"));
        }
        if n > MAX_CHILDREN {
            push(
                &path,
                ViolationKind::TooManyChildren,
                format!("{name} has {n} children, the limit is {MAX_CHILDREN}"),
            );
        }
        let arity_ok = match node.kind {
            NodeKind::Root | NodeKind::Repeat(_) => n == 1,
            NodeKind::Sequence | NodeKind::Selector | NodeKind::ParallelAll => n >= 1,
            NodeKind::Leaf(_) => n == 0,
        };
        if !arity_ok {
            let want = match node.kind {
                NodeKind::Root | NodeKind::Repeat(_) => "exactly one child",
                NodeKind::Leaf(_) => "no children",
                _ => "at least one child",
            };
            push(&path, ViolationKind::Arity, format!("{name} needs {want}, found {n}"));
        }
        if node.kind == NodeKind::Repeat(RepeatCount::Times(0)) {
            push(&path, ViolationKind::BadRepeat, "repeat count must be positive".into());
        }
    }
    out
}
