use super::*;
use crate::predicator::{KnowledgeBase, SymbolPayload, TaughtSymbol};
use crate::profiles::CapabilityProfile;
use crate::world::{Category, GripperTarget, JointConfig, WorldDelta, WorldObject, WorldState};
use alloc::string::ToString;
use nalgebra::Vector3;

use TickStatus::{Failure as F, Running as R, Success as S};

fn home() -> JointConfig {
    JointConfig::new(0.0, 0.0, 0.4, 0.0).unwrap()
}

fn node(id: &str, x: f64, y: f64) -> WorldObject {
    WorldObject::resting(id, Category::Node, x, y, 0.0, 0.0, Vector3::new(0.025, 0.025, 0.025)).unwrap()
}

fn sim(objects: Vec<WorldObject>) -> Sim {
    Sim::new(WorldState::new(home(), 0.0, objects), KnowledgeBase::default(), 11)
}

fn teach_joint(sim: &mut Sim, name: &str, q: JointConfig) {
    sim.kb.taught.insert(name.to_string(), TaughtSymbol { name: name.to_string(), payload: SymbolPayload::Joint(q) });
}

fn c(s: TickStatus) -> TreeNode {
    TreeNode::constant(s)
}

fn gripper(t: GripperTarget) -> TreeNode {
    TreeNode::leaf(LeafOp::Gripper(t))
}

fn status_events(trace: &ExecutionTrace, path: &[usize]) -> Vec<TickStatus> {
    trace
        .events
        .iter()
        .filter(|e| e.path == path)
        .filter_map(|e| match e.entry {
            TraceEntry::Status(s) => Some(s),
            TraceEntry::World(_) => None,
        })
        .collect()
}

#[test]
fn constant_truth_table() {
    let cases = [
        (TreeNode::sequence(vec![c(S), c(S)]), S),
        (TreeNode::sequence(vec![c(S), c(F), c(R)]), F),
        (TreeNode::sequence(vec![c(S), c(R), c(F)]), R),
        (TreeNode::selector(vec![c(F), c(F)]), F),
        (TreeNode::selector(vec![c(F), c(S), c(R)]), S),
        (TreeNode::selector(vec![c(F), c(R), c(S)]), R),
        (TreeNode::parallel_all(vec![c(S), c(S)]), S),
        (TreeNode::parallel_all(vec![c(R), c(F)]), F),
        (TreeNode::parallel_all(vec![c(S), c(R)]), R),
        (TreeNode::repeat(RepeatCount::Times(1), c(S)), S),
        (TreeNode::repeat(RepeatCount::Times(2), c(S)), R),
        (TreeNode::repeat(RepeatCount::Forever, c(F)), F),
    ];
    let mut s = sim(vec![]);
    for (tree, want) in cases {
        let mut root = TreeNode::root(tree);
        assert_eq!(tick_node(&mut root, &mut s, 0.05), want, "{:?}", root.children[0].kind);
    }
}

#[test]
fn selector_remembers_failed_children() {
    let mut s = sim(vec![]);
    let mut tree = TreeNode::root(TreeNode::selector(vec![c(F), gripper(GripperTarget::Open)]));
    let trace = run_tree(&mut tree, &mut s, 10.0).unwrap();
    assert_eq!(trace.outcome, Outcome::Success);
    assert_eq!(status_events(&trace, &[0, 0]), vec![F]);
    assert_eq!(status_events(&trace, &[0, 1]), vec![R, S]);
}

#[test]
fn resume_index_tracks_running_child() {
    let mut s = sim(vec![]);
    let mut tree = TreeNode::root(TreeNode::sequence(vec![c(S), gripper(GripperTarget::Open), c(S)]));
    assert_eq!(tick_node(&mut tree, &mut s, 0.05), R);
    assert_eq!(tree.children[0].resume_index(), 1);
}

#[test]
fn parallel_fails_fast_and_halts() {
    let mut s = sim(vec![]);
    let mut tree = TreeNode::root(TreeNode::parallel_all(vec![c(F), gripper(GripperTarget::Closed)]));
    let trace = run_tree(&mut tree, &mut s, 10.0).unwrap();
    assert_eq!((trace.outcome, trace.ticks), (Outcome::Failure, 1));
    assert!(!s.world.gripper.closed);
    assert!(trace.world_deltas().next().is_none());

    let failing = TreeNode::sequence(vec![TreeNode::repeat(RepeatCount::Times(3), c(S)), c(F)]);
    let mut tree = TreeNode::root(TreeNode::parallel_all(vec![gripper(GripperTarget::Closed), failing]));
    let trace = run_tree(&mut tree, &mut s, 10.0).unwrap();
    assert_eq!((trace.outcome, trace.ticks), (Outcome::Failure, 3));
    assert_eq!(status_events(&trace, &[0, 0]), vec![R]);
    assert_eq!(tree.children[0].children[0].state.leaf, LeafRun::Idle);
}

#[test]
fn repeat_counts_and_resets() {
    let mut s = sim(vec![]);
    let mut tree = TreeNode::root(TreeNode::repeat(RepeatCount::Times(5), c(S)));
    tick_node(&mut tree, &mut s, 0.05);
    tick_node(&mut tree, &mut s, 0.05);
    assert_eq!(tree.children[0].completed_iterations(), 2);
    let tree = reset_tree(tree);
    assert_eq!(tree.children[0].completed_iterations(), 0);

    let mut tree = TreeNode::root(TreeNode::repeat(RepeatCount::Forever, c(S)));
    let trace = run_tree(&mut tree, &mut s, 1.0).unwrap();
    assert_eq!((trace.outcome, trace.ticks), (Outcome::BudgetExhausted, 20));
    assert_eq!(tree.children[0].completed_iterations(), 0);

    let mut tree = TreeNode::root(TreeNode::repeat(RepeatCount::Times(3), c(S)));
    let trace = run_tree(&mut tree, &mut s, 1.0).unwrap();
    assert_eq!((trace.outcome, trace.ticks), (Outcome::Success, 3));
}

#[test]
fn gripper_takes_one_second() {
    let mut s = sim(vec![]);
    let mut tree = TreeNode::root(gripper(GripperTarget::Closed));
    let trace = run_tree(&mut tree, &mut s, 10.0).unwrap();
    assert_eq!((trace.outcome, trace.ticks), (Outcome::Success, 20));
    assert!((trace.sim_time_total - 1.0).abs() < 1e-9);
    assert!(s.world.gripper.closed);
    assert_eq!(trace.events[0].time, 0.05);

    let mut tree =
        TreeNode::root(TreeNode::sequence(vec![gripper(GripperTarget::Open), gripper(GripperTarget::Closed)]));
    assert_eq!(run_tree(&mut tree, &mut s, 10.0).unwrap().ticks, 40);
    let mut tree =
        TreeNode::root(TreeNode::parallel_all(vec![gripper(GripperTarget::Open), gripper(GripperTarget::Open)]));
    assert_eq!(run_tree(&mut tree, &mut s, 10.0).unwrap().ticks, 20);
}

#[test]
fn budget_ends_a_slow_tree() {
    let mut s = sim(vec![]);
    let mut tree = TreeNode::root(gripper(GripperTarget::Closed));
    let trace = run_tree(&mut tree, &mut s, 0.5).unwrap();
    assert_eq!((trace.outcome, trace.ticks), (Outcome::BudgetExhausted, 10));
}

#[test]
fn servo_knocks_what_it_hits() {
    let mut s = sim(vec![node("node_1", 0.3, 0.0)]);
    teach_joint(&mut s, "down", JointConfig::new(0.3, 0.0, 0.02, 0.0).unwrap());
    let mut tree = TreeNode::root(TreeNode::leaf(LeafOp::ServoToJoint(SymbolRef("down".into()))));
    let trace = run_tree(&mut tree, &mut s, 30.0).unwrap();
    assert_eq!(trace.outcome, Outcome::Success);
    assert_eq!(trace.knocks(), 1);
    assert!(trace.world_deltas().any(|d| *d == WorldDelta::Knocked { id: "node_1".into() }));
    assert!(s.world.object("node_1").unwrap().knocked);
}

#[test]
fn missing_symbol_fails() {
    let mut s = sim(vec![]);
    let mut tree = TreeNode::root(TreeNode::leaf(LeafOp::PlanToJoint(SymbolRef("nowhere".into()))));
    assert_eq!(run_tree(&mut tree, &mut s, 5.0).unwrap().outcome, Outcome::Failure);
}

#[test]
fn planned_runs_are_reproducible() {
    let run = || {
        let mut s = sim(vec![node("node_1", 0.3, 0.0)]);
        s.world.set_robot(JointConfig::new(0.5, 0.1, 0.03, 1.0).unwrap());
        let mut tree = TreeNode::root(TreeNode::leaf(LeafOp::PlanToHome));
        let trace = run_tree(&mut tree, &mut s, 60.0).unwrap();
        (trace, s.world.robot)
    };
    let (a, qa) = run();
    let (b, qb) = run();
    assert_eq!(a.outcome, Outcome::Success);
    assert_eq!(a, b);
    assert_eq!(qa, qb);
    assert_eq!(a.knocks(), 0);
}

#[test]
fn run_checks_before_ticking() {
    let mut s = sim(vec![]);
    let mut bad = TreeNode::new(NodeKind::Root, vec![c(S), c(S)]);
    assert!(matches!(run_tree(&mut bad, &mut s, 1.0), Err(RunError::Invalid(_))));
    let mut ok = TreeNode::root(c(S));
    assert_eq!(run_tree(&mut ok, &mut s, 0.0), Err(RunError::BadParams));
    let mut s = s.with_profile(CapabilityProfile::simple());
    let mut smart = TreeNode::root(TreeNode::leaf(LeafOp::DetectObjects));
    assert!(matches!(run_tree(&mut smart, &mut s, 1.0), Err(RunError::Invalid(_))));
    assert_eq!(s.world.sim_time, 0.0);
}
