//! Scene files and the bundled task scenes.

use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use tabletop_core::motion::PlannerParams;
use tabletop_core::{TaskGoal, WorldObject, WorldState};

use crate::formats::{category_from, invalid, joint_from, joint_to, FormatError, UprightPoseJson};

pub const DEFAULT_BUDGET_S: f64 = 900.0;

fn default_budget() -> f64 {
    DEFAULT_BUDGET_S
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectJson {
    pub id: String,
    pub category: String,
    pub pose: UprightPoseJson,
    pub extents: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry_order: Option<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shortcut_iterations: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub robot_home: [f64; 4],
    pub table_z: f64,
    #[serde(default = "default_budget")]
    pub budget_s: f64,
    /// `task_ab` or `task_c`; defaults to `task_c` when the scene has a link
    /// and three or more nodes, `task_ab` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perception_noise: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planner: Option<PlannerJson>,
    pub objects: Vec<ObjectJson>,
}

/// A loaded scene: the world template plus run settings.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub world: WorldState,
    pub budget_s: f64,
    pub goal: TaskGoal,
    pub perception_noise: f64,
    pub planner: PlannerJson,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("unknown scene `{0}`; built-in scenes are task_a, task_b, task_c, gen_obstacles, gen_moved")]
    Unknown(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("scene {name}: {source}")]
    Format { name: String, source: FormatError },
}

const BUILTIN: [(&str, &str); 5] = [
    ("task_a", include_str!("../assets/scenes/task_a.json")),
    ("task_b", include_str!("../assets/scenes/task_b.json")),
    ("task_c", include_str!("../assets/scenes/task_c.json")),
    ("gen_obstacles", include_str!("../assets/scenes/gen_obstacles.json")),
    ("gen_moved", include_str!("../assets/scenes/gen_moved.json")),
];

pub fn builtin_scene_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

pub fn builtin_scene_source(name: &str) -> Option<&'static str> {
    BUILTIN.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

impl SceneFile {
    pub fn into_scenario(self, name: &str) -> Result<Scenario, FormatError> {
        let home = joint_from(self.robot_home)?;
        if !(self.budget_s > 0.0 && self.budget_s.is_finite()) {
            return Err(invalid("budget_s must be positive"));
        }
        let mut objects = Vec::new();
        for o in &self.objects {
            let category = category_from(&o.category)?;
            if objects.iter().any(|p: &WorldObject| p.id == o.id) {
                return Err(invalid(format!("duplicate object id `{}`", o.id)));
            }
            let [x, y, z] = o.pose.xyz;
            let pose = tabletop_core::Pose::upright(x, y, z, o.pose.yaw);
            let extents = Vector3::new(o.extents[0], o.extents[1], o.extents[2]);
            let order = o.symmetry_order.unwrap_or_else(|| category.default_symmetry());
            let obj = WorldObject::new(o.id.clone(), category, pose, extents, order)
                .map_err(|e| invalid(format!("object `{}`: {e}", o.id)))?;
            objects.push(obj);
        }
        let goal = match &self.goal {
            Some(g) => TaskGoal::parse(g).ok_or_else(|| invalid(format!("unknown goal `{g}`")))?,
            None => {
                let nodes = self.objects.iter().filter(|o| o.category == "node").count();
                let links = self.objects.iter().filter(|o| o.category == "link").count();
                if nodes >= 3 && links >= 1 {
                    TaskGoal::TaskC
                } else {
                    TaskGoal::TaskAB
                }
            }
        };
        let noise = self.perception_noise.unwrap_or(0.0);
        if !(noise >= 0.0 && noise.is_finite()) {
            return Err(invalid("perception_noise must be non-negative"));
        }
        Ok(Scenario {
            name: name.to_string(),
            world: WorldState::new(home, self.table_z, objects),
            budget_s: self.budget_s,
            goal,
            perception_noise: noise,
            planner: self.planner.unwrap_or_default(),
        })
    }
}

impl Scenario {
    /// Planner parameters for this scene with the given seed.
    pub fn planner_params(&self, seed: u64) -> PlannerParams {
        let d = PlannerParams::default();
        PlannerParams {
            seed,
            step: self.planner.step.unwrap_or(d.step),
            max_iterations: self.planner.max_iterations.unwrap_or(d.max_iterations),
            shortcut_iterations: self.planner.shortcut_iterations.unwrap_or(d.shortcut_iterations),
            ..d
        }
    }

    /// Scene file describing this scenario's starting world.
    pub fn to_file(&self) -> SceneFile {
        SceneFile {
            robot_home: joint_to(&self.world.home),
            table_z: self.world.table_z,
            budget_s: self.budget_s,
            goal: Some(self.goal.as_str().to_string()),
            perception_noise: (self.perception_noise > 0.0).then_some(self.perception_noise),
            planner: (self.planner != PlannerJson::default()).then(|| self.planner.clone()),
            objects: self
                .world
                .objects
                .iter()
                .map(|o| {
                    let p = o.pose.position();
                    ObjectJson {
                        id: o.id.to_string(),
                        category: o.category.as_str().to_string(),
                        pose: UprightPoseJson { xyz: [p.x, p.y, p.z], yaw: o.pose.yaw() },
                        extents: [o.extents.x, o.extents.y, o.extents.z],
                        symmetry_order: Some(o.symmetry_order),
                    }
                })
                .collect(),
        }
    }
}

pub fn parse_scene(name: &str, text: &str) -> Result<Scenario, LoadError> {
    let format = |source| LoadError::Format { name: name.to_string(), source };
    let file: SceneFile = serde_json::from_str(text).map_err(|e| format(e.into()))?;
    file.into_scenario(name).map_err(format)
}

/// Loads a built-in scene by name, or a scene file by path.
pub fn load_scene(name_or_path: &str) -> Result<Scenario, LoadError> {
    if let Some(src) = builtin_scene_source(name_or_path) {
        return parse_scene(name_or_path, src);
    }
    let path = Path::new(name_or_path);
    if !path.exists() && path.extension().is_none() {
        return Err(LoadError::Unknown(name_or_path.to_string()));
    }
    let text =
        std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: name_or_path.to_string(), source })?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(name_or_path);
    parse_scene(name, &text)
}
