//! Random structurally valid trees for roundtrip checks.

#![allow(dead_code)]

use rand::Rng;
use tabletop_core::bt::{LeafOp, RepeatCount, SymbolRef};
use tabletop_core::world::GripperTarget;
use tabletop_core::{Category, PredicateAtom, PredicateQuery, TickStatus, TreeNode};

const NAMES: [&str; 6] = ["home", "hover_1", "grasp-node", "place.left", "w2", "link_over"];

fn symbol<R: Rng>(rng: &mut R) -> SymbolRef {
    SymbolRef(NAMES[rng.random_range(0..NAMES.len())].to_string())
}

fn category<R: Rng>(rng: &mut R) -> Category {
    Category::ALL[rng.random_range(0..Category::ALL.len())]
}

pub fn query<R: Rng>(rng: &mut R) -> PredicateQuery {
    let mut atoms = Vec::new();
    if rng.random_bool(0.7) {
        atoms.push(PredicateAtom::IsCategory(category(rng)));
    }
    for _ in 0..rng.random_range(0..3) {
        atoms.push(match rng.random_range(0..4) {
            0 => PredicateAtom::LeftOfRobot,
            1 => PredicateAtom::RightOfRobot,
            2 => PredicateAtom::GripperHolding,
            _ => PredicateAtom::Found(category(rng)),
        });
    }
    if atoms.is_empty() {
        atoms.push(PredicateAtom::GripperHolding);
    }
    PredicateQuery::new(atoms).expect("at most one category")
}

pub fn leaf<R: Rng>(rng: &mut R) -> LeafOp {
    match rng.random_range(0..13) {
        0 => LeafOp::Gripper(if rng.random_bool(0.5) { GripperTarget::Open } else { GripperTarget::Closed }),
        1 => LeafOp::ServoToJoint(symbol(rng)),
        2 => LeafOp::PlanToJoint(symbol(rng)),
        3 => LeafOp::PlanToHome,
        4 => LeafOp::MoveToRelativeWaypoint(symbol(rng)),
        5 => LeafOp::DetectObjects,
        6 => LeafOp::DisableCollisions(["node_1", "link_2", "table"][rng.random_range(0..3)].into()),
        7 => LeafOp::KnowledgeTest(query(rng)),
        8 => LeafOp::SmartGrasp { query: query(rng), spec: symbol(rng) },
        9 => LeafOp::SmartRelease { query: rng.random_bool(0.5).then(|| query(rng)), spec: symbol(rng) },
        10 => LeafOp::Constant(TickStatus::Success),
        11 => LeafOp::Constant(TickStatus::Failure),
        _ => LeafOp::Constant(TickStatus::Running),
    }
}

/// A non-root subtree at most `depth` levels deep.
pub fn node<R: Rng>(rng: &mut R, depth: usize) -> TreeNode {
    if depth <= 1 || rng.random_bool(0.3) {
        return TreeNode::leaf(leaf(rng));
    }
    let kids = |rng: &mut R| (0..rng.random_range(1..=4)).map(|_| node(rng, depth - 1)).collect();
    match rng.random_range(0..4) {
        0 => TreeNode::sequence(kids(rng)),
        1 => TreeNode::selector(kids(rng)),
        2 => TreeNode::parallel_all(kids(rng)),
        _ => {
            let count =
                if rng.random_bool(0.2) { RepeatCount::Forever } else { RepeatCount::Times(rng.random_range(1..1000)) };
            TreeNode::repeat(count, node(rng, depth - 1))
        }
    }
}

pub fn tree<R: Rng>(rng: &mut R, depth: usize) -> TreeNode {
    TreeNode::root(node(rng, depth))
}
