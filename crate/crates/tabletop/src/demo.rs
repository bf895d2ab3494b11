//! Reference trees and taught symbols for every condition and task.

use std::path::{Path, PathBuf};

pub const CONDITIONS: [&str; 4] = ["simple", "motion", "relative", "smartmove"];
pub const TASKS: [&str; 3] = ["a", "b", "c"];

const DEMOS: [(&str, &str, &str, &str); 12] = [
    (
        "simple",
        "a",
        include_str!("../assets/demos/simple_task_a.bt"),
        include_str!("../assets/demos/simple_task_a.teach.json"),
    ),
    (
        "simple",
        "b",
        include_str!("../assets/demos/simple_task_b.bt"),
        include_str!("../assets/demos/simple_task_b.teach.json"),
    ),
    (
        "simple",
        "c",
        include_str!("../assets/demos/simple_task_c.bt"),
        include_str!("../assets/demos/simple_task_c.teach.json"),
    ),
    (
        "motion",
        "a",
        include_str!("../assets/demos/motion_task_a.bt"),
        include_str!("../assets/demos/motion_task_a.teach.json"),
    ),
    (
        "motion",
        "b",
        include_str!("../assets/demos/motion_task_b.bt"),
        include_str!("../assets/demos/motion_task_b.teach.json"),
    ),
    (
        "motion",
        "c",
        include_str!("../assets/demos/motion_task_c.bt"),
        include_str!("../assets/demos/motion_task_c.teach.json"),
    ),
    (
        "relative",
        "a",
        include_str!("../assets/demos/relative_task_a.bt"),
        include_str!("../assets/demos/relative_task_a.teach.json"),
    ),
    (
        "relative",
        "b",
        include_str!("../assets/demos/relative_task_b.bt"),
        include_str!("../assets/demos/relative_task_b.teach.json"),
    ),
    (
        "relative",
        "c",
        include_str!("../assets/demos/relative_task_c.bt"),
        include_str!("../assets/demos/relative_task_c.teach.json"),
    ),
    (
        "smartmove",
        "a",
        include_str!("../assets/demos/smartmove_task_a.bt"),
        include_str!("../assets/demos/smartmove_task_a.teach.json"),
    ),
    (
        "smartmove",
        "b",
        include_str!("../assets/demos/smartmove_task_b.bt"),
        include_str!("../assets/demos/smartmove_task_b.teach.json"),
    ),
    (
        "smartmove",
        "c",
        include_str!("../assets/demos/smartmove_task_c.bt"),
        include_str!("../assets/demos/smartmove_task_c.teach.json"),
    ),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Demo {
    pub condition: &'static str,
    pub task: &'static str,
    pub tree: &'static str,
    pub library: &'static str,
}

impl Demo {
    /// Built-in scene the demo was authored for.
    pub fn scene(&self) -> String {
        format!("task_{}", self.task)
    }

    pub fn file_stem(&self) -> String {
        format!("{}_task_{}", self.condition, self.task)
    }
}

pub fn demo(condition: &str, task: &str) -> Option<Demo> {
    DEMOS.iter().find(|(c, t, _, _)| *c == condition && *t == task).map(|&(condition, task, tree, library)| Demo {
        condition,
        task,
        tree,
        library,
    })
}

pub fn all_demos() -> impl Iterator<Item = Demo> {
    DEMOS.iter().map(|&(condition, task, tree, library)| Demo { condition, task, tree, library })
}

/// Writes `<stem>.bt` and `<stem>.teach.json` into `dir`, returning both paths.
pub fn write_demo(dir: &Path, demo: &Demo) -> std::io::Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let bt = dir.join(format!("{}.bt", demo.file_stem()));
    let teach = dir.join(format!("{}.teach.json", demo.file_stem()));
    std::fs::write(&bt, demo.tree)?;
    std::fs::write(&teach, demo.library)?;
    Ok((bt, teach))
}
