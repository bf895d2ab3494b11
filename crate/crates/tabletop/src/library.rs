//! Taught-symbol library files: a JSON object mapping names to symbols.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use tabletop_core::dsl::{format_errors, parse_predicate, serialize_predicate};
use tabletop_core::predicator::{save_waypoint, SymbolError, SymbolPayload};
use tabletop_core::smartmove::{GraspSpec, ReleaseSpec, ReleaseTarget};
use tabletop_core::{KnowledgeBase, TaughtSymbol, WorldState};

use crate::formats::{category_from, invalid, joint_from, joint_to, FormatError, PoseJson};

pub type Library = BTreeMap<String, TaughtSymbol>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReleaseFrame {
    #[default]
    World,
    Object,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolJson {
    JointWaypoint {
        joint: [f64; 4],
    },
    RelativeWaypoint {
        category: String,
        transform: PoseJson,
    },
    GraspSpec {
        grasp: PoseJson,
        backoff: f64,
    },
    ReleaseSpec {
        #[serde(default)]
        frame: ReleaseFrame,
        pose: PoseJson,
        backoff: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        query: Option<String>,
    },
}

impl SymbolJson {
    pub fn to_payload(&self) -> Result<SymbolPayload, FormatError> {
        Ok(match self {
            SymbolJson::JointWaypoint { joint } => SymbolPayload::Joint(joint_from(*joint)?),
            SymbolJson::RelativeWaypoint { category, transform } => {
                SymbolPayload::Relative { category: category_from(category)?, transform: transform.to_pose()? }
            }
            SymbolJson::GraspSpec { grasp, backoff } => {
                SymbolPayload::Grasp(GraspSpec { taught_grasp: grasp.to_pose()?, backoff: *backoff })
            }
            SymbolJson::ReleaseSpec { frame, pose, backoff, query } => {
                let pose = pose.to_pose()?;
                let query = match query {
                    Some(q) => Some(
                        parse_predicate(q)
                            .map_err(|e| invalid(format!("query `{q}`: {}", format_errors(&e).trim_end())))?,
                    ),
                    None => None,
                };
                let taught_release = match frame {
                    ReleaseFrame::World => ReleaseTarget::World(pose),
                    ReleaseFrame::Object => ReleaseTarget::Relative(pose),
                };
                SymbolPayload::Release(ReleaseSpec { taught_release, backoff: *backoff, query })
            }
        })
    }

    pub fn from_payload(p: &SymbolPayload) -> Self {
        match p {
            SymbolPayload::Joint(q) => SymbolJson::JointWaypoint { joint: joint_to(q) },
            SymbolPayload::Relative { category, transform } => {
                SymbolJson::RelativeWaypoint { category: category.as_str().into(), transform: transform.into() }
            }
            SymbolPayload::Grasp(g) => SymbolJson::GraspSpec { grasp: (&g.taught_grasp).into(), backoff: g.backoff },
            SymbolPayload::Release(r) => {
                let (frame, pose) = match &r.taught_release {
                    ReleaseTarget::World(p) => (ReleaseFrame::World, p),
                    ReleaseTarget::Relative(p) => (ReleaseFrame::Object, p),
                };
                SymbolJson::ReleaseSpec {
                    frame,
                    pose: pose.into(),
                    backoff: r.backoff,
                    query: r.query.as_ref().map(serialize_predicate),
                }
            }
        }
    }
}

pub fn parse_library(text: &str) -> Result<Library, FormatError> {
    let raw: BTreeMap<String, SymbolJson> = serde_json::from_str(text)?;
    raw.into_iter()
        .map(|(name, s)| {
            let payload = s.to_payload().map_err(|e| invalid(format!("symbol `{name}`: {e}")))?;
            Ok((name.clone(), TaughtSymbol { name, payload }))
        })
        .collect()
}

pub fn library_to_json(lib: &Library) -> String {
    let raw: BTreeMap<&str, SymbolJson> =
        lib.iter().map(|(k, v)| (k.as_str(), SymbolJson::from_payload(&v.payload))).collect();
    let mut s = serde_json::to_string_pretty(&raw).expect("library serializes");
    s.push('\n');
    s
}

/// Checks every symbol against `world` and stores it in `kb`.
pub fn install(kb: &mut KnowledgeBase, world: &WorldState, lib: &Library) -> Result<(), (String, SymbolError)> {
    for (name, sym) in lib {
        save_waypoint(kb, world, name, sym.payload.clone()).map_err(|e| (name.clone(), e))?;
    }
    Ok(())
}
