//! Command line: run, validate, score, scenes, demo and teach.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};
use tabletop_core::dsl::{format_errors, parse, validate_tree};

use crate::demo::{demo, write_demo, CONDITIONS, TASKS};
use crate::library::{library_to_json, parse_library, Library};
use crate::profile_file::{load_profile, ProfileLoadError};
use crate::report::Report;
use crate::scenario::{format_violations, run_scenario, ScenarioError};
use crate::scene::{builtin_scene_names, builtin_scene_source, load_scene, LoadError};
use crate::teach::{Reply, Session};

pub const EXIT_OK: i32 = 0;
/// The tree, library or profile was rejected.
pub const EXIT_INVALID: i32 = 2;
/// A file could not be read, written or decoded.
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tabletop", version, about = "Behavior Tree pick-and-place simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a tree in a scene and report the score.
    Run {
        /// Built-in scene name or scene file.
        #[arg(long)]
        scene: String,
        /// Tree source file.
        #[arg(long)]
        tree: PathBuf,
        /// Taught-symbol library (JSON).
        #[arg(long = "teach-file", alias = "library", value_name = "FILE")]
        library: Option<PathBuf>,
        /// Built-in profile name or profile file.
        #[arg(long, default_value = "smartmove")]
        profile: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here.
        #[arg(long = "report", alias = "out", value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Check a tree for syntax, structure and profile errors.
    Validate {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, default_value = "smartmove")]
        profile: String,
    },
    /// Recompute the score from a saved report.
    Score {
        #[arg(long)]
        report: PathBuf,
    },
    /// List the built-in scenes, or print one.
    Scenes {
        #[arg(long)]
        show: Option<String>,
    },
    /// Write a reference tree and library.
    Demo {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(CONDITIONS))]
        condition: String,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(TASKS))]
        task: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Teach symbols interactively; commands are read from stdin.
    Teach {
        #[arg(long)]
        scene: String,
        /// Library file to write on `done` or end of input.
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Invalid(String),
    Io(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

fn scene_error(e: LoadError) -> Failure {
    match e {
        LoadError::Unknown(_) => Failure::Invalid(e.to_string()),
        _ => Failure::Io(e.into()),
    }
}

fn profile_error(e: ProfileLoadError) -> Failure {
    match e {
        ProfileLoadError::Unknown(_) => Failure::Invalid(e.to_string()),
        _ => Failure::Io(e.into()),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_library(path: Option<&Path>) -> Result<Library, Failure> {
    match path {
        None => Ok(Library::new()),
        Some(p) => {
            let text = read(p)?;
            parse_library(&text).with_context(|| format!("library {}", p.display())).map_err(Failure::Io)
        }
    }
}

/// Runs one command; returns the process exit code.
pub fn run(cli: Cli, stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli.command, stdin, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INVALID
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_IO
        }
    }
}

fn dispatch(command: Command, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Run { scene, tree, library, profile, seed, out: report_path } => {
            let scenario = load_scene(&scene).map_err(scene_error)?;
            let profile = load_profile(&profile).map_err(profile_error)?;
            let source = read(&tree)?;
            let library = load_library(library.as_deref())?;
            let tree = parse(&source).map_err(|e| Failure::Invalid(format_errors(&e).trim_end().to_string()))?;
            let run = run_scenario(&scenario, &tree, &library, &profile, seed).map_err(|e| match e {
                ScenarioError::Parse(_) | ScenarioError::Invalid(_) | ScenarioError::Symbol(..) => {
                    Failure::Invalid(e.to_string())
                }
            })?;
            if let Some(p) = report_path {
                std::fs::write(&p, run.report.to_json()).with_context(|| format!("cannot write {}", p.display()))?;
            }
            write!(out, "{}", run.report.pretty_score()).context("writing output")?;
            Ok(())
        }
        Command::Validate { tree, profile } => {
            let profile = load_profile(&profile).map_err(profile_error)?;
            let source = read(&tree)?;
            let tree = parse(&source).map_err(|e| Failure::Invalid(format_errors(&e).trim_end().to_string()))?;
            let v = validate_tree(&tree, &profile);
            if !v.is_empty() {
                return Err(Failure::Invalid(format_violations(&v).trim_end().to_string()));
            }
            writeln!(out, "ok").context("writing output")?;
            Ok(())
        }
        Command::Score { report } => {
            let text = read(&report)?;
            let r = Report::from_json(&text).with_context(|| format!("report {}", report.display()))?;
            let s = r.rescore().with_context(|| format!("report {}", report.display()))?;
            if (s.total - r.score.total).abs() > 1e-9 {
                return Err(Failure::Invalid(format!(
                    "stored total {} disagrees with the recomputed {}",
                    r.score.total, s.total
                )));
            }
            write!(out, "{}", r.pretty_score()).context("writing output")?;
            Ok(())
        }
        Command::Scenes { show: None } => {
            for n in builtin_scene_names() {
                writeln!(out, "{n}").context("writing output")?;
            }
            Ok(())
        }
        Command::Scenes { show: Some(name) } => {
            let src = builtin_scene_source(&name).ok_or_else(|| scene_error(LoadError::Unknown(name.clone())))?;
            write!(out, "{src}").context("writing output")?;
            Ok(())
        }
        Command::Demo { condition, task, out_dir } => {
            let d = demo(&condition, &task).ok_or_else(|| Failure::Invalid(format!("no demo {condition}/{task}")))?;
            let (bt, teach) =
                write_demo(&out_dir, &d).with_context(|| format!("cannot write into {}", out_dir.display()))?;
            writeln!(out, "{}\n{}\nscene: {}", bt.display(), teach.display(), d.scene()).context("writing output")?;
            Ok(())
        }
        Command::Teach { scene, out: lib_path } => {
            let scenario = load_scene(&scene).map_err(scene_error)?;
            let mut session = Session::new(&scenario);
            let mut line = String::new();
            loop {
                line.clear();
                if stdin.read_line(&mut line).context("reading commands")? == 0 {
                    break;
                }
                match session.execute(&line) {
                    Ok(Reply::Done) => break,
                    Ok(Reply::Text(t)) if t.is_empty() => {}
                    Ok(Reply::Text(t)) => writeln!(out, "{}", t.trim_end()).context("writing output")?,
                    Err(e) => writeln!(out, "error: {e}").context("writing output")?,
                }
            }
            std::fs::write(&lib_path, library_to_json(session.library()))
                .with_context(|| format!("cannot write {}", lib_path.display()))?;
            writeln!(out, "wrote {} symbols to {}", session.library().len(), lib_path.display())
                .context("writing output")?;
            Ok(())
        }
    }
}
