//! Reference evaluator for trees of static-status leaves, written as plain
//! recursion over its own tree type.

#![allow(dead_code)]

use std::rc::Rc;

use tabletop_core::bt::RepeatCount;
use tabletop_core::{TickStatus, TreeNode};

#[derive(Clone, Debug)]
pub enum Spec {
    Leaf(TickStatus),
    Seq(Vec<Rc<Spec>>),
    Sel(Vec<Rc<Spec>>),
    Par(Vec<Rc<Spec>>),
    Rep(Option<u32>, Rc<Spec>),
}

#[derive(Clone, Debug)]
pub struct State {
    index: usize,
    done: Vec<bool>,
    iterations: u32,
    kids: Vec<State>,
}

pub fn fresh(spec: &Spec) -> State {
    let kids: Vec<State> = match spec {
        Spec::Leaf(_) => Vec::new(),
        Spec::Seq(c) | Spec::Sel(c) | Spec::Par(c) => c.iter().map(|k| fresh(k)).collect(),
        Spec::Rep(_, c) => vec![fresh(c)],
    };
    let done = if matches!(spec, Spec::Par(_)) { vec![false; kids.len()] } else { Vec::new() };
    State { index: 0, done, iterations: 0, kids }
}

/// Fresh state of a composite whose children start from `kids`.
pub fn composite(kids: Vec<State>) -> State {
    State { index: 0, done: vec![false; kids.len()], iterations: 0, kids }
}

pub fn into_kids(st: State) -> Vec<State> {
    st.kids
}

/// One tick of `spec` from state `st`.
pub fn eval(spec: &Spec, st: &mut State) -> TickStatus {
    use TickStatus::*;
    let result = match spec {
        Spec::Leaf(s) => return *s,
        Spec::Seq(c) | Spec::Sel(c) => {
            let (go_on, last) = if matches!(spec, Spec::Seq(_)) { (Success, Success) } else { (Failure, Failure) };
            let mut out = last;
            while st.index < c.len() {
                let r = eval(&c[st.index], &mut st.kids[st.index]);
                if r != go_on {
                    out = r;
                    break;
                }
                st.index += 1;
            }
            out
        }
        Spec::Par(c) => {
            let mut out = None;
            for (i, child) in c.iter().enumerate() {
                if st.done[i] {
                    continue;
                }
                match eval(child, &mut st.kids[i]) {
                    Success => st.done[i] = true,
                    Failure => {
                        out = Some(Failure);
                        break;
                    }
                    Running => {}
                }
            }
            out.unwrap_or(if st.done.iter().all(|d| *d) { Success } else { Running })
        }
        Spec::Rep(n, c) => match eval(c, &mut st.kids[0]) {
            Success => {
                st.iterations += 1;
                match n {
                    Some(n) if st.iterations >= *n => Success,
                    _ => Running,
                }
            }
            other => other,
        },
    };
    if result != Running {
        reset(st);
    }
    result
}

/// Same as replacing `st` with `fresh(spec)`, without reallocating.
pub fn reset(st: &mut State) {
    st.index = 0;
    st.iterations = 0;
    st.done.fill(false);
    for k in &mut st.kids {
        reset(k);
    }
}

pub fn to_tree(spec: &Spec) -> TreeNode {
    match spec {
        Spec::Leaf(s) => TreeNode::constant(*s),
        Spec::Seq(c) => TreeNode::sequence(c.iter().map(|k| to_tree(k)).collect()),
        Spec::Sel(c) => TreeNode::selector(c.iter().map(|k| to_tree(k)).collect()),
        Spec::Par(c) => TreeNode::parallel_all(c.iter().map(|k| to_tree(k)).collect()),
        Spec::Rep(n, c) => TreeNode::repeat(n.map_or(RepeatCount::Forever, RepeatCount::Times), to_tree(c)),
    }
}

pub const REPEATS: [Option<u32>; 3] = [Some(1), Some(2), None];

/// All trees of depth at most `depth` (a lone leaf has depth 1) with at most
/// `branching` children per composite.
pub fn enumerate(depth: usize, branching: usize) -> Vec<Spec> {
    let mut out = Vec::new();
    for_each_tree(depth, branching, &mut |s| out.push(s.clone()));
    out
}

/// Visits every tree `enumerate` would return without storing them.
pub fn for_each_tree(depth: usize, branching: usize, f: &mut dyn FnMut(&Spec)) {
    for s in [TickStatus::Success, TickStatus::Failure, TickStatus::Running] {
        f(&Spec::Leaf(s));
    }
    if depth <= 1 {
        return;
    }
    let sub: Vec<Rc<Spec>> = enumerate(depth - 1, branching).into_iter().map(Rc::new).collect();
    let mut idx: Vec<usize> = Vec::new();
    for k in 1..=branching {
        idx.clear();
        idx.resize(k, 0);
        loop {
            let mut spec = Spec::Seq(idx.iter().map(|&i| sub[i].clone()).collect());
            f(&spec);
            let Spec::Seq(kids) = spec else { unreachable!() };
            spec = Spec::Sel(kids);
            f(&spec);
            let Spec::Sel(kids) = spec else { unreachable!() };
            f(&Spec::Par(kids));
            let mut pos = k;
            while pos > 0 {
                idx[pos - 1] += 1;
                if idx[pos - 1] < sub.len() {
                    break;
                }
                idx[pos - 1] = 0;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
        }
    }
    for s in &sub {
        for n in REPEATS {
            f(&Spec::Rep(n, s.clone()));
        }
    }
}
