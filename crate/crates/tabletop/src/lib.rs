//! Scene files, taught-symbol libraries, reports and the command line for
//! the tabletop Behavior Tree simulator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod demo;
pub mod formats;
pub mod library;
pub mod profile_file;
pub mod report;
pub mod scenario;
pub mod scene;
pub mod teach;

pub use library::{library_to_json, parse_library, Library};
pub use report::Report;
pub use scenario::{run_scenario, run_source, RunOutput, ScenarioError};
pub use scene::{load_scene, Scenario};
