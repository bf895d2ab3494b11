//! Task score: nodes moved, errors, link credit and a time bonus.

use crate::world::{Category, WorldState};

/// Link credit when the link was released near a node but did not mate.
pub const LINK_NEAR_CREDIT: f64 = 0.75;
pub const LINK_ATTEMPT_CREDIT: f64 = 0.25;
pub const LINK_MATED_CREDIT: f64 = 1.0;
/// XY distance from a node center that counts as "near a node top", meters.
pub const LINK_NEAR_RADIUS: f64 = 0.06;
/// At most this many nodes count toward Task C.
pub const TASK_C_NODE_CAP: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaskGoal {
    /// Move the nodes to the left without knocking the link.
    TaskAB,
    /// Move two nodes left and stack the link on one.
    TaskC,
}

impl TaskGoal {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaskGoal::TaskAB => "task_ab",
            TaskGoal::TaskC => "task_c",
        }
    }

    pub fn parse(s: &str) -> Option<TaskGoal> {
        match s {
            "task_ab" => Some(TaskGoal::TaskAB),
            "task_c" => Some(TaskGoal::TaskC),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreBreakdown {
    /// Nodes resting left of the robot and not knocked (uncapped).
    pub n_nodes: u32,
    pub n_errors: u32,
    /// Fraction of the budget used, in `[0, 1]`.
    pub t: f64,
    pub link_credit: f64,
    pub total: f64,
}

/// `n_nodes − n_errors + 2(1 − t)`, with Task C capping nodes at two and
/// adding the link credit.
pub fn total(goal: TaskGoal, n_nodes: u32, n_errors: u32, t: f64, link_credit: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    let bonus = 2.0 * (1.0 - t);
    match goal {
        TaskGoal::TaskAB => n_nodes as f64 - n_errors as f64 + bonus,
        TaskGoal::TaskC => n_nodes.min(TASK_C_NODE_CAP) as f64 + link_credit - n_errors as f64 + bonus,
    }
}

pub fn count_nodes(world: &WorldState) -> u32 {
    world
        .objects
        .iter()
        .filter(|o| o.category == Category::Node && !o.knocked && !o.attached && o.pose.position().y > 0.0)
        .count() as u32
}

pub fn count_errors(world: &WorldState) -> u32 {
    world.objects.iter().any(|o| o.category == Category::Link && o.knocked) as u32
}

/// Best credit over all links: mated 1.0, released near a node 0.75, a
/// grasp attempted 0.25.
pub fn link_credit(world: &WorldState) -> f64 {
    let nodes: alloc::vec::Vec<_> = world.objects.iter().filter(|o| o.category == Category::Node).collect();
    world
        .objects
        .iter()
        .filter(|o| o.category == Category::Link)
        .map(|link| {
            if link.mated_on.is_some() && !link.knocked {
                return LINK_MATED_CREDIT;
            }
            let p = link.pose.position();
            let near = nodes.iter().any(|n| {
                let c = n.pose.position();
                libm::hypot(p.x - c.x, p.y - c.y) <= LINK_NEAR_RADIUS
            });
            if link.placed && !link.attached && near {
                LINK_NEAR_CREDIT
            } else if link.grasp_attempted {
                LINK_ATTEMPT_CREDIT
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

pub fn score(goal: TaskGoal, world: &WorldState, sim_time: f64, budget: f64) -> ScoreBreakdown {
    let t = if budget > 0.0 { (sim_time / budget).clamp(0.0, 1.0) } else { 1.0 };
    let n_nodes = count_nodes(world);
    let n_errors = count_errors(world);
    let link_credit = match goal {
        TaskGoal::TaskAB => 0.0,
        TaskGoal::TaskC => link_credit(world),
    };
    ScoreBreakdown { n_nodes, n_errors, t, link_credit, total: total(goal, n_nodes, n_errors, t, link_credit) }
}
