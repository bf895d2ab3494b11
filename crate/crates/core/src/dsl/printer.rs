use alloc::string::String;
use alloc::vec;
use core::fmt::Write;

use crate::bt::{LeafOp, NodeKind, RepeatCount, TreeNode};
use crate::predicator::{PredicateAtom, PredicateQuery};
use crate::world::GripperTarget;

pub fn serialize_predicate(q: &PredicateQuery) -> String {
    let mut s = String::from("(and");
    for a in q.atoms() {
        s.push(' ');
        match a {
            PredicateAtom::IsCategory(c) => write!(s, "(is {c})"),
            PredicateAtom::Found(c) => write!(s, "(found {c})"),
            PredicateAtom::LeftOfRobot => write!(s, "(left-of robot)"),
            PredicateAtom::RightOfRobot => write!(s, "(right-of robot)"),
            PredicateAtom::GripperHolding => write!(s, "(gripper-holding)"),
        }
        .expect("writing to a String");
    }
    s.push(')');
    s
}

fn head(node: &TreeNode) -> String {
    let mut s = String::from("(");
    let w = &mut s;
    let r = match &node.kind {
        NodeKind::Root => write!(w, "root"),
        NodeKind::Sequence => write!(w, "sequence"),
        NodeKind::Selector => write!(w, "selector"),
        NodeKind::ParallelAll => write!(w, "parallel-all"),
        NodeKind::Repeat(RepeatCount::Times(n)) => write!(w, "repeat {n}"),
        NodeKind::Repeat(RepeatCount::Forever) => write!(w, "repeat forever"),
        NodeKind::Leaf(op) => {
            let name = op.kind().name();
            match op {
                LeafOp::Gripper(GripperTarget::Open) => write!(w, "{name} open"),
                LeafOp::Gripper(GripperTarget::Closed) => write!(w, "{name} close"),
                LeafOp::ServoToJoint(s) | LeafOp::PlanToJoint(s) | LeafOp::MoveToRelativeWaypoint(s) => {
                    write!(w, "{name} {s}")
                }
                LeafOp::DisableCollisions(id) => write!(w, "{name} {id}"),
                LeafOp::KnowledgeTest(q) => write!(w, "{name} {}", serialize_predicate(q)),
                LeafOp::SmartGrasp { query, spec } => write!(w, "{name} {} {spec}", serialize_predicate(query)),
                LeafOp::SmartRelease { query: Some(q), spec } => write!(w, "{name} {} {spec}", serialize_predicate(q)),
                LeafOp::SmartRelease { query: None, spec } => write!(w, "{name} {spec}"),
                LeafOp::PlanToHome | LeafOp::DetectObjects | LeafOp::Constant(_) => write!(w, "{name}"),
            }
        }
    };
    r.expect("writing to a String");
    s
}

/// Canonical text: one node per line, two-space indentation, closing
/// parentheses gathered on the last line of each node, trailing newline.
pub fn serialize(tree: &TreeNode) -> String {
    enum Step<'a> {
        Open(&'a TreeNode, usize),
        Close,
    }
    let mut out = String::new();
    let mut stack = vec![Step::Open(tree, 0)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Close => out.push(')'),
            Step::Open(node, indent) => {
                if indent > 0 {
                    out.push('\n');
                }
                for _ in 0..indent {
                    out.push_str("  ");
                }
                out.push_str(&head(node));
                stack.push(Step::Close);
                for c in node.children.iter().rev() {
                    stack.push(Step::Open(c, indent + 1));
                }
            }
        }
    }
    out.push('\n');
    out
}
