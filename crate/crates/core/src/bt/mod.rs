//! Behavior Tree structure and tick semantics.
//!
//! Every tick hands a time slice (seconds of simulated time) to the root.
//! Leaves that take time consume part of it; a Sequence or Selector passes
//! what is left to its next child. Sequence and Selector keep a resume
//! index, so a finished child is not ticked again until the parent itself
//! returns Success or Failure. ParallelAll ticks all unfinished children
//! with the full slice and fails as soon as one child fails, halting the
//! rest. Repeat completes at most one iteration of its child per tick.

use alloc::vec;
use alloc::vec::Vec;

use crate::sim::Sim;

mod ops;
mod trace;
mod validate;

pub use ops::{LeafOp, OpKind, SymbolRef};
pub use trace::{ExecutionTrace, Outcome, TraceEntry, TraceEvent};
pub use validate::{structural_violations, Violation, ViolationKind, MAX_CHILDREN, MAX_DEPTH};

use ops::{exec_leaf, LeafRun};
pub(crate) use validate::paths as validate_paths;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TickStatus {
    Success,
    Failure,
    Running,
}

impl TickStatus {
    pub fn is_terminal(&self) -> bool {
        *self != TickStatus::Running
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepeatCount {
    Times(u32),
    Forever,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Root,
    Sequence,
    Selector,
    ParallelAll,
    Repeat(RepeatCount),
    Leaf(LeafOp),
}

#[derive(Clone, Debug, Default, PartialEq)]
struct NodeState {
    /// Sequence/Selector resume index.
    index: usize,
    /// ParallelAll children that already succeeded.
    done: Vec<bool>,
    iterations: u32,
    leaf: LeafRun,
    /// Last status recorded in the trace for this node.
    reported: Option<TickStatus>,
}

/// A tree node and its runtime state. Equality is structural: runtime
/// state is ignored.
#[derive(Clone, Debug)]
pub struct TreeNode {
    pub kind: NodeKind,
    pub children: Vec<TreeNode>,
    state: NodeState,
}

impl PartialEq for TreeNode {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.children == other.children
    }
}

impl TreeNode {
    pub fn new(kind: NodeKind, children: Vec<TreeNode>) -> Self {
        TreeNode { kind, children, state: NodeState::default() }
    }

    pub fn root(child: TreeNode) -> Self {
        Self::new(NodeKind::Root, vec![child])
    }

    pub fn sequence(children: Vec<TreeNode>) -> Self {
        Self::new(NodeKind::Sequence, children)
    }

    pub fn selector(children: Vec<TreeNode>) -> Self {
        Self::new(NodeKind::Selector, children)
    }

    pub fn parallel_all(children: Vec<TreeNode>) -> Self {
        Self::new(NodeKind::ParallelAll, children)
    }

    pub fn repeat(count: RepeatCount, child: TreeNode) -> Self {
        Self::new(NodeKind::Repeat(count), vec![child])
    }

    pub fn leaf(op: LeafOp) -> Self {
        Self::new(NodeKind::Leaf(op), Vec::new())
    }

    pub fn constant(status: TickStatus) -> Self {
        Self::leaf(LeafOp::Constant(status))
    }

    /// Iterations a Repeat node has completed in its current run.
    pub fn completed_iterations(&self) -> u32 {
        self.state.iterations
    }

    /// Index of the child a Sequence or Selector resumes at.
    pub fn resume_index(&self) -> usize {
        self.state.index
    }

    /// Clears runtime state in the whole subtree; structure is unchanged.
    pub fn reset(&mut self) {
        self.state = NodeState::default();
        for c in &mut self.children {
            c.reset();
        }
    }

    /// Depth-first iterator over all nodes.
    pub fn walk(&self) -> impl Iterator<Item = &TreeNode> {
        let mut stack = vec![self];
        core::iter::from_fn(move || {
            let n = stack.pop()?;
            stack.extend(n.children.iter().rev());
            Some(n)
        })
    }

    /// Abandons whatever is in flight below this node.
    fn halt(&mut self, sim: &mut Sim) {
        self.state.leaf.halt(sim);
        for c in &mut self.children {
            c.halt(sim);
        }
        let reported = self.state.reported;
        let done = core::mem::take(&mut self.state.done);
        self.state = NodeState { reported, done: cleared(done), ..NodeState::default() };
    }

    /// Clears this node's progress after it returned a terminal status.
    fn finish(&mut self) {
        let reported = self.state.reported;
        let leaf = core::mem::take(&mut self.state.leaf);
        let done = core::mem::take(&mut self.state.done);
        self.state = NodeState { reported, leaf, done: cleared(done), ..NodeState::default() };
    }
}

/// Empties `v` but keeps its allocation.
fn cleared(mut v: Vec<bool>) -> Vec<bool> {
    v.clear();
    v
}

/// Returns `tree` with all runtime state cleared.
pub fn reset_tree(mut tree: TreeNode) -> TreeNode {
    tree.reset();
    tree
}

pub(crate) struct Recorder<'a> {
    path: Vec<usize>,
    events: Option<&'a mut Vec<TraceEvent>>,
}

impl Recorder<'_> {
    fn status(&mut self, node: &mut TreeNode, s: TickStatus) {
        if node.state.reported != Some(s) {
            node.state.reported = Some(s);
            if let Some(ev) = self.events.as_deref_mut() {
                ev.push(TraceEvent { time: 0.0, path: self.path.clone(), entry: TraceEntry::Status(s) });
            }
        }
        if s.is_terminal() {
            node.state.reported = None;
        }
    }
}

fn tick_child(node: &mut TreeNode, i: usize, sim: &mut Sim, slice: f64, rec: &mut Recorder<'_>) -> (TickStatus, f64) {
    if rec.events.is_none() {
        return tick_inner(&mut node.children[i], sim, slice, rec);
    }
    rec.path.push(i);
    let r = tick_inner(&mut node.children[i], sim, slice, rec);
    rec.path.pop();
    r
}

#[derive(Clone, Copy, PartialEq)]
enum Tag {
    Root,
    Sequence,
    Selector,
    ParallelAll,
    Repeat(RepeatCount),
    Leaf,
}

fn tick_inner(node: &mut TreeNode, sim: &mut Sim, slice: f64, rec: &mut Recorder<'_>) -> (TickStatus, f64) {
    let tag = match &node.kind {
        NodeKind::Root => Tag::Root,
        NodeKind::Sequence => Tag::Sequence,
        NodeKind::Selector => Tag::Selector,
        NodeKind::ParallelAll => Tag::ParallelAll,
        NodeKind::Repeat(c) => Tag::Repeat(*c),
        NodeKind::Leaf(_) => Tag::Leaf,
    };
    let (status, used) = match tag {
        Tag::Root => tick_child(node, 0, sim, slice, rec),
        Tag::Sequence | Tag::Selector => {
            let stop_on = if tag == Tag::Sequence { TickStatus::Failure } else { TickStatus::Success };
            let mut used = 0.0;
            let mut result = None;
            while node.state.index < node.children.len() {
                let (s, u) = tick_child(node, node.state.index, sim, (slice - used).max(0.0), rec);
                used += u;
                if s == TickStatus::Running || s == stop_on {
                    result = Some(s);
                    break;
                }
                node.state.index += 1;
            }
            let fallthrough = if stop_on == TickStatus::Failure { TickStatus::Success } else { TickStatus::Failure };
            (result.unwrap_or(fallthrough), used)
        }
        Tag::ParallelAll => {
            let n = node.children.len();
            if node.state.done.len() != n {
                node.state.done.clear();
                node.state.done.resize(n, false);
            }
            let mut used: f64 = 0.0;
            let mut failed = false;
            for i in 0..n {
                if node.state.done[i] {
                    continue;
                }
                let (s, u) = tick_child(node, i, sim, slice, rec);
                used = used.max(u);
                match s {
                    TickStatus::Success => node.state.done[i] = true,
                    TickStatus::Failure => {
                        failed = true;
                        break;
                    }
                    TickStatus::Running => {}
                }
            }
            if failed {
                for c in &mut node.children {
                    c.halt(sim);
                }
                (TickStatus::Failure, used)
            } else if node.state.done.iter().all(|d| *d) {
                (TickStatus::Success, used)
            } else {
                (TickStatus::Running, used)
            }
        }
        Tag::Repeat(count) => {
            let (s, u) = tick_child(node, 0, sim, slice, rec);
            let status = match s {
                TickStatus::Success => {
                    node.state.iterations += 1;
                    match count {
                        RepeatCount::Times(n) if node.state.iterations >= n => TickStatus::Success,
                        _ => TickStatus::Running,
                    }
                }
                other => other,
            };
            (status, u)
        }
        Tag::Leaf => {
            let TreeNode { kind, state, .. } = node;
            match kind {
                NodeKind::Leaf(op) => exec_leaf(op, &mut state.leaf, sim, slice),
                _ => unreachable!(),
            }
        }
    };
    rec.status(node, status);
    if status.is_terminal() {
        node.finish();
    }
    (status, used.min(slice))
}

/// Ticks `node` once with a `dt` time slice and advances simulated time by
/// `dt`.
///
/// # Panics
/// If `dt` is not positive.
pub fn tick_node(node: &mut TreeNode, sim: &mut Sim, dt: f64) -> TickStatus {
    assert!(dt > 0.0, "tick quantum must be positive");
    let mut rec = Recorder { path: Vec::new(), events: None };
    let (status, _) = tick_inner(node, sim, dt, &mut rec);
    sim.world.sim_time += dt;
    status
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error("tree is not runnable ({} violations)", .0.len())]
    Invalid(Vec<Violation>),
    #[error("budget and tick quantum must be positive")]
    BadParams,
}

/// Ticks the root every `sim.config.dt` seconds until it returns Success or
/// Failure, or simulated time reaches `budget`.
///
/// The tree is checked for structure (and against `sim.profile`, if set)
/// before anything runs.
pub fn run_tree(tree: &mut TreeNode, sim: &mut Sim, budget: f64) -> Result<ExecutionTrace, RunError> {
    let dt = sim.config.dt;
    if !(budget > 0.0 && dt > 0.0) {
        return Err(RunError::BadParams);
    }
    let mut violations = structural_violations(tree);
    if let Some(p) = &sim.profile {
        violations.extend(crate::profiles::profile_violations(tree, p));
    }
    if !violations.is_empty() {
        return Err(RunError::Invalid(violations));
    }
    sim.world.drain_log();
    let start = sim.world.sim_time;
    let mut events = Vec::new();
    let mut ticks: u64 = 0;
    let outcome = loop {
        if sim.world.sim_time >= start + budget - 1e-9 {
            break Outcome::BudgetExhausted;
        }
        let first = events.len();
        let mut rec = Recorder { path: Vec::new(), events: Some(&mut events) };
        let (status, _) = tick_inner(tree, sim, dt, &mut rec);
        ticks += 1;
        sim.world.sim_time = start + ticks as f64 * dt;
        let now = sim.world.sim_time;
        for ev in &mut events[first..] {
            ev.time = now;
        }
        for delta in sim.world.drain_log() {
            events.push(TraceEvent { time: now, path: Vec::new(), entry: TraceEntry::World(delta) });
        }
        match status {
            TickStatus::Success => break Outcome::Success,
            TickStatus::Failure => break Outcome::Failure,
            TickStatus::Running => {}
        }
    };
    if outcome == Outcome::BudgetExhausted {
        tree.halt(sim);
        tree.reset();
        for delta in sim.world.drain_log() {
            events.push(TraceEvent { time: sim.world.sim_time, path: Vec::new(), entry: TraceEntry::World(delta) });
        }
    }
    Ok(ExecutionTrace { events, outcome, sim_time_total: sim.world.sim_time - start, ticks })
}

#[cfg(test)]
mod tests;
