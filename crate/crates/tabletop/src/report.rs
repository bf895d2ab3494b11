//! Run reports: score, trace summary and final object poses.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use tabletop_core::bt::TraceEntry;
use tabletop_core::world::{SmartOp, SmartPhase, WorldDelta};
use tabletop_core::{ExecutionTrace, JointConfig, Outcome, ScoreBreakdown, TaskGoal, WorldObject, WorldState};

use crate::formats::{category_from, invalid, FormatError, PoseJson};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreJson {
    pub n_nodes: u32,
    pub n_errors: u32,
    pub t: f64,
    pub link_credit: f64,
    pub total: f64,
}

impl From<&ScoreBreakdown> for ScoreJson {
    fn from(s: &ScoreBreakdown) -> Self {
        ScoreJson { n_nodes: s.n_nodes, n_errors: s.n_errors, t: s.t, link_credit: s.link_credit, total: s.total }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSummary {
    pub ticks: u64,
    pub status_events: usize,
    pub knocks: usize,
    pub grasps: usize,
    pub releases: usize,
    /// World changes in order, as `"<time> <what>"`.
    pub world_events: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectReport {
    pub id: String,
    pub category: String,
    pub pose: PoseJson,
    pub extents: [f64; 3],
    pub symmetry_order: u32,
    pub attached: bool,
    pub knocked: bool,
    pub mated_on: Option<String>,
    pub grasp_attempted: bool,
    pub placed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub scenario: String,
    pub profile: String,
    pub seed: u64,
    pub goal: String,
    pub budget_s: f64,
    pub outcome: String,
    pub sim_time_s: f64,
    pub score: ScoreJson,
    pub trace: TraceSummary,
    pub objects: Vec<ObjectReport>,
}

fn describe(d: &WorldDelta) -> String {
    match d {
        WorldDelta::Knocked { id } => format!("knocked {id}"),
        WorldDelta::GripperClosed { held: Some(id) } => format!("gripper closed on {id}"),
        WorldDelta::GripperClosed { held: None } => "gripper closed on nothing".into(),
        WorldDelta::GripperOpened { released: Some(id) } => format!("gripper opened, released {id}"),
        WorldDelta::GripperOpened { released: None } => "gripper opened".into(),
        WorldDelta::Settled { id, on: Some(on) } => format!("{id} settled on {on}"),
        WorldDelta::Settled { id, on: None } => format!("{id} settled on table"),
        WorldDelta::Mated { link, node } => format!("{link} mated on {node}"),
        WorldDelta::CollisionsDisabled { id } => format!("collisions disabled for {id}"),
        WorldDelta::CollisionsRestored { id } => format!("collisions restored for {id}"),
        WorldDelta::Detected { count } => format!("detected {count} objects"),
        WorldDelta::Phase { op, phase } => {
            let op = match op {
                SmartOp::Grasp => "smart-grasp",
                SmartOp::Release => "smart-release",
            };
            let phase = match phase {
                SmartPhase::Align => "align",
                SmartPhase::MoveIn => "move-in",
                SmartPhase::Actuate => "actuate",
                SmartPhase::Retreat => "retreat",
            };
            format!("{op} {phase}")
        }
    }
}

pub fn summarize(trace: &ExecutionTrace) -> TraceSummary {
    let mut world_events = Vec::new();
    let mut status_events = 0;
    for e in &trace.events {
        match &e.entry {
            TraceEntry::Status(_) => status_events += 1,
            TraceEntry::World(d) => world_events.push(format!("{:.2} {}", e.time, describe(d))),
        }
    }
    let deltas: Vec<&WorldDelta> = trace.world_deltas().collect();
    TraceSummary {
        ticks: trace.ticks,
        status_events,
        knocks: trace.knocks(),
        grasps: deltas.iter().filter(|d| matches!(d, WorldDelta::GripperClosed { held: Some(_) })).count(),
        releases: deltas.iter().filter(|d| matches!(d, WorldDelta::GripperOpened { released: Some(_) })).count(),
        world_events,
    }
}

pub fn object_reports(world: &WorldState) -> Vec<ObjectReport> {
    world
        .objects
        .iter()
        .map(|o| ObjectReport {
            id: o.id.to_string(),
            category: o.category.as_str().into(),
            pose: (&o.pose).into(),
            extents: [o.extents.x, o.extents.y, o.extents.z],
            symmetry_order: o.symmetry_order,
            attached: o.attached,
            knocked: o.knocked,
            mated_on: o.mated_on.as_ref().map(|m| m.to_string()),
            grasp_attempted: o.grasp_attempted,
            placed: o.placed,
        })
        .collect()
}

/// Time charged to the score: the real run time on success, the whole
/// budget otherwise.
pub fn charged_time(outcome: Outcome, sim_time: f64, budget: f64) -> f64 {
    if outcome == Outcome::Success {
        sim_time
    } else {
        budget
    }
}

pub fn parse_outcome(s: &str) -> Option<Outcome> {
    [Outcome::Success, Outcome::Failure, Outcome::BudgetExhausted].into_iter().find(|o| o.as_str() == s)
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Report, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Final world rebuilt from the stored object states.
    pub fn final_world(&self) -> Result<WorldState, FormatError> {
        let mut objects = Vec::new();
        for o in &self.objects {
            let ext = Vector3::new(o.extents[0], o.extents[1], o.extents[2]);
            let mut obj =
                WorldObject::new(o.id.clone(), category_from(&o.category)?, o.pose.to_pose()?, ext, o.symmetry_order)
                    .map_err(|e| invalid(e.to_string()))?;
            obj.attached = o.attached;
            obj.knocked = o.knocked;
            obj.mated_on = o.mated_on.clone();
            obj.grasp_attempted = o.grasp_attempted;
            obj.placed = o.placed;
            objects.push(obj);
        }
        let home = JointConfig::new(0.0, 0.0, 0.4, 0.0).expect("within limits");
        Ok(WorldState::new(home, 0.0, objects))
    }

    /// Score recomputed from the stored final state.
    pub fn rescore(&self) -> Result<ScoreBreakdown, FormatError> {
        let goal = TaskGoal::parse(&self.goal).ok_or_else(|| invalid(format!("unknown goal `{}`", self.goal)))?;
        let outcome =
            parse_outcome(&self.outcome).ok_or_else(|| invalid(format!("unknown outcome `{}`", self.outcome)))?;
        let world = self.final_world()?;
        let time = charged_time(outcome, self.sim_time_s, self.budget_s);
        Ok(tabletop_core::score(goal, &world, time, self.budget_s))
    }

    pub fn pretty_score(&self) -> String {
        let s = &self.score;
        let mut out = format!(
            "scenario   {}\nprofile    {}\noutcome    {}\nsim time   {:.2} s of {:.0} s\n",
            self.scenario, self.profile, self.outcome, self.sim_time_s, self.budget_s
        );
        out += &format!("n_nodes    {}\nn_errors   {}\nt          {:.4}\n", s.n_nodes, s.n_errors, s.t);
        if self.goal == TaskGoal::TaskC.as_str() {
            out += &format!("link       {:.2}\n", s.link_credit);
        }
        out += &format!("total      {:.4}\n", s.total);
        out
    }
}
