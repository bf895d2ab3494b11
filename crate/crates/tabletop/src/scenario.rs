//! Runs one tree against one scene and builds the report.

use tabletop_core::bt::{RunError, Violation};
use tabletop_core::dsl::{format_errors, parse, validate_tree, ParseError};
use tabletop_core::predicator::SymbolError;
use tabletop_core::{run_tree, score, CapabilityProfile, KnowledgeBase, Sim, TreeNode, WorldState};

use crate::library::{install, Library};
use crate::report::{charged_time, object_reports, summarize, Report, ScoreJson};
use crate::scene::Scenario;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("tree does not parse:\n{}", format_errors(.0).trim_end())]
    Parse(Vec<ParseError>),
    #[error("tree is not runnable:\n{}", format_violations(.0).trim_end())]
    Invalid(Vec<Violation>),
    #[error("symbol `{0}`: {1}")]
    Symbol(String, SymbolError),
}

pub fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| {
            let path: Vec<String> = v.path.iter().map(|i| i.to_string()).collect();
            format!("at [{}]: {}\n", path.join("."), v.message)
        })
        .collect()
}

/// Everything a run produced, including the final world.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Report,
    pub world: WorldState,
    pub trace: tabletop_core::ExecutionTrace,
}

pub fn run_scenario(
    scenario: &Scenario,
    tree: &TreeNode,
    library: &Library,
    profile: &CapabilityProfile,
    seed: u64,
) -> Result<RunOutput, ScenarioError> {
    let violations = validate_tree(tree, profile);
    if !violations.is_empty() {
        return Err(ScenarioError::Invalid(violations));
    }
    let world = scenario.world.clone();
    let mut kb = KnowledgeBase { perception_noise_sigma: scenario.perception_noise, ..KnowledgeBase::default() };
    install(&mut kb, &world, library).map_err(|(name, e)| ScenarioError::Symbol(name, e))?;
    let mut sim = Sim::new(world, kb, seed).with_profile(profile.clone());
    sim.planner = scenario.planner_params(seed);
    let mut tree = tree.clone();
    tree.reset();
    let trace = run_tree(&mut tree, &mut sim, scenario.budget_s).map_err(|e| match e {
        RunError::Invalid(v) => ScenarioError::Invalid(v),
        RunError::BadParams => ScenarioError::Invalid(Vec::new()),
    })?;
    let time = charged_time(trace.outcome, trace.sim_time_total, scenario.budget_s);
    let s = score(scenario.goal, &sim.world, time, scenario.budget_s);
    let report = Report {
        scenario: scenario.name.clone(),
        profile: profile.name.clone(),
        seed,
        goal: scenario.goal.as_str().into(),
        budget_s: scenario.budget_s,
        outcome: trace.outcome.as_str().into(),
        sim_time_s: trace.sim_time_total,
        score: ScoreJson::from(&s),
        trace: summarize(&trace),
        objects: object_reports(&sim.world),
    };
    Ok(RunOutput { report, world: sim.world, trace })
}

/// Parses `source` and runs it.
pub fn run_source(
    scenario: &Scenario,
    source: &str,
    library: &Library,
    profile: &CapabilityProfile,
    seed: u64,
) -> Result<RunOutput, ScenarioError> {
    let tree = parse(source).map_err(ScenarioError::Parse)?;
    run_scenario(scenario, &tree, library, profile, seed)
}
