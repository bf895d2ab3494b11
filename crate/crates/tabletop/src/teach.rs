//! Interactive teaching: jog the arm in a scene and save named symbols.

use tabletop_core::dsl::{format_errors, parse_predicate};
use tabletop_core::predicator::{detect_objects, save_waypoint, SymbolPayload};
use tabletop_core::smartmove::{GraspSpec, ReleaseSpec, ReleaseTarget};
use tabletop_core::world::{check_collision, set_gripper, GripperTarget};
use tabletop_core::{JointConfig, KnowledgeBase, Pose, Sim, TaughtSymbol};

use crate::library::{library_to_json, Library};
use crate::scene::Scenario;

pub const HELP: &str = "\
commands:
  goto X Y Z YAW                 move the arm (joint values, meters and radians)
  detect                         snapshot object poses
  grip open|close
  save-waypoint NAME             current joint configuration
  save-relative NAME OBJ         current tool pose in OBJ's frame
  save-grasp NAME OBJ [BACKOFF]  current tool pose as a grasp of OBJ
  save-release NAME              current tool pose as a world release
  save-release NAME OBJ [QUERY]  current tool pose as a release on objects like OBJ
  list                           show taught symbols as JSON
  help
  done                           finish and write the library
";

const DEFAULT_BACKOFF: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub enum Reply {
    Text(String),
    Done,
}

pub struct Session {
    sim: Sim,
    library: Library,
}

fn number(s: Option<&str>, what: &str) -> Result<f64, String> {
    let s = s.ok_or_else(|| format!("missing {what}"))?;
    s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("bad {what} `{s}`"))
}

fn name(s: Option<&str>) -> Result<String, String> {
    s.map(str::to_string).ok_or_else(|| "missing symbol name".into())
}

impl Session {
    pub fn new(scenario: &Scenario) -> Self {
        let kb = KnowledgeBase { perception_noise_sigma: scenario.perception_noise, ..KnowledgeBase::default() };
        Session { sim: Sim::new(scenario.world.clone(), kb, 0), library: Library::new() }
    }

    pub fn library(&self) -> &Library {
        &self.library
    }

    fn object_frame(&self, id: Option<&str>) -> Result<(Pose, tabletop_core::Category), String> {
        let id = id.ok_or("missing object id")?;
        let obj = self.sim.world.object(id).ok_or_else(|| format!("no object `{id}` in the scene"))?;
        Ok((obj.pose, obj.category))
    }

    fn in_frame(&self, frame: &Pose) -> Pose {
        frame.inverse().compose(&self.sim.world.gripper_pose())
    }

    fn save(&mut self, name: String, payload: SymbolPayload) -> Result<Reply, String> {
        save_waypoint(&mut self.sim.kb, &self.sim.world, &name, payload.clone()).map_err(|e| e.to_string())?;
        let kind = payload.kind();
        self.library.insert(name.clone(), TaughtSymbol { name: name.clone(), payload });
        Ok(Reply::Text(format!("saved @{name} ({kind})")))
    }

    /// Runs one command line.
    pub fn execute(&mut self, line: &str) -> Result<Reply, String> {
        let line = line.trim();
        let mut words = line.split_whitespace();
        let Some(cmd) = words.next() else { return Ok(Reply::Text(String::new())) };
        match cmd {
            "help" => Ok(Reply::Text(HELP.into())),
            "done" => Ok(Reply::Done),
            "list" => Ok(Reply::Text(library_to_json(&self.library))),
            "goto" => {
                let x = number(words.next(), "x")?;
                let y = number(words.next(), "y")?;
                let z = number(words.next(), "z")?;
                let yaw = number(words.next(), "yaw")?;
                let q = JointConfig::new(x, y, z, yaw).map_err(|e| e.to_string())?;
                if check_collision(&self.sim.world, &q) {
                    return Err("that configuration is in collision".into());
                }
                self.sim.world.set_robot(q);
                Ok(Reply::Text(format!("at ({x}, {y}, {z}, {yaw})")))
            }
            "detect" => {
                let mut kb = std::mem::take(&mut self.sim.kb);
                let mut world = self.sim.world.clone();
                detect_objects(&mut world, &mut kb, self.sim.rng());
                world.drain_log();
                self.sim.world = world;
                self.sim.kb = kb;
                let ids: Vec<&str> = self.sim.kb.detected.keys().map(String::as_str).collect();
                Ok(Reply::Text(format!("detected {}", ids.join(", "))))
            }
            "grip" => {
                let target = match words.next() {
                    Some("open") => GripperTarget::Open,
                    Some("close") => GripperTarget::Closed,
                    other => return Err(format!("grip takes open or close, got {other:?}")),
                };
                let cfg = self.sim.config.clone();
                set_gripper(&mut self.sim.world, target, None, &cfg);
                let held = self.sim.world.held_id().map_or("nothing".to_string(), str::to_string);
                Ok(Reply::Text(format!("holding {held}")))
            }
            "save-waypoint" => {
                let n = name(words.next())?;
                let q = self.sim.world.robot;
                self.save(n, SymbolPayload::Joint(q))
            }
            "save-relative" => {
                let n = name(words.next())?;
                let (frame, category) = self.object_frame(words.next())?;
                let transform = self.in_frame(&frame);
                self.save(n, SymbolPayload::Relative { category, transform })
            }
            "save-grasp" => {
                let n = name(words.next())?;
                let (frame, _) = self.object_frame(words.next())?;
                let backoff = match words.next() {
                    Some(b) => number(Some(b), "backoff")?,
                    None => DEFAULT_BACKOFF,
                };
                let taught_grasp = self.in_frame(&frame);
                self.save(n, SymbolPayload::Grasp(GraspSpec { taught_grasp, backoff }))
            }
            "save-release" => {
                let n = name(words.next())?;
                let spec = match words.next() {
                    None => ReleaseSpec {
                        taught_release: ReleaseTarget::World(self.sim.world.gripper_pose()),
                        backoff: DEFAULT_BACKOFF,
                        query: None,
                    },
                    Some(id) => {
                        let (frame, category) = self.object_frame(Some(id))?;
                        let rest: Vec<&str> = words.collect();
                        let text = if rest.is_empty() { format!("(is {category})") } else { rest.join(" ") };
                        let query = parse_predicate(&text).map_err(|e| format_errors(&e).trim_end().to_string())?;
                        ReleaseSpec {
                            taught_release: ReleaseTarget::Relative(self.in_frame(&frame)),
                            backoff: DEFAULT_BACKOFF,
                            query: Some(query),
                        }
                    }
                };
                self.save(n, SymbolPayload::Release(spec))
            }
            other => Err(format!("unknown command `{other}`; try `help`")),
        }
    }
}
