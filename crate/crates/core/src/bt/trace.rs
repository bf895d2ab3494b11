use alloc::vec::Vec;

use super::TickStatus;
use crate::world::WorldDelta;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Failure,
    /// The budget ran out while the root was still Running.
    BudgetExhausted,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::Failure => "failure",
            Outcome::BudgetExhausted => "budget_exhausted",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceEntry {
    Status(TickStatus),
    World(WorldDelta),
}

/// One recorded change. `path` lists child indices from the root; world
/// deltas carry an empty path.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEvent {
    pub time: f64,
    pub path: Vec<usize>,
    pub entry: TraceEntry,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExecutionTrace {
    pub events: Vec<TraceEvent>,
    pub outcome: Outcome,
    pub sim_time_total: f64,
    pub ticks: u64,
}

impl ExecutionTrace {
    pub fn world_deltas(&self) -> impl Iterator<Item = &WorldDelta> {
        self.events.iter().filter_map(|e| match &e.entry {
            TraceEntry::World(d) => Some(d),
            TraceEntry::Status(_) => None,
        })
    }

    pub fn knocks(&self) -> usize {
        self.world_deltas().filter(|d| matches!(d, WorldDelta::Knocked { .. })).count()
    }
}
