//! User-defined capability profiles.

use std::path::Path;

use serde::{Deserialize, Serialize};
use tabletop_core::bt::OpKind;
use tabletop_core::{CapabilityProfile, SymbolKind};

use crate::formats::{invalid, FormatError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileJson {
    pub name: String,
    pub allowed_ops: Vec<String>,
    #[serde(default)]
    pub allowed_symbol_kinds: Vec<String>,
}

impl ProfileJson {
    pub fn to_profile(&self) -> Result<CapabilityProfile, FormatError> {
        let ops = self
            .allowed_ops
            .iter()
            .map(|o| OpKind::parse(o).ok_or_else(|| invalid(format!("unknown op `{o}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let kinds = self
            .allowed_symbol_kinds
            .iter()
            .map(|k| SymbolKind::parse(k).ok_or_else(|| invalid(format!("unknown symbol kind `{k}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        CapabilityProfile::new(self.name.clone(), ops, kinds).map_err(|e| invalid(e.to_string()))
    }

    pub fn from_profile(p: &CapabilityProfile) -> Self {
        ProfileJson {
            name: p.name.clone(),
            allowed_ops: p.allowed_ops.iter().map(|o| o.name().to_string()).collect(),
            allowed_symbol_kinds: p.allowed_symbol_kinds.iter().map(|k| k.as_str().to_string()).collect(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProfileLoadError {
    #[error("unknown profile `{0}`; built-in profiles are simple, motion, relative, smartmove")]
    Unknown(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("profile {path}: {source}")]
    Format { path: String, source: FormatError },
}

/// A built-in profile name, or the path of a profile JSON file.
pub fn load_profile(name_or_path: &str) -> Result<CapabilityProfile, ProfileLoadError> {
    if let Some(p) = CapabilityProfile::by_name(name_or_path) {
        return Ok(p);
    }
    let path = Path::new(name_or_path);
    if !path.exists() && path.extension().is_none() {
        return Err(ProfileLoadError::Unknown(name_or_path.to_string()));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|source| ProfileLoadError::Io { path: name_or_path.to_string(), source })?;
    let format = |source| ProfileLoadError::Format { path: name_or_path.to_string(), source };
    let raw: ProfileJson = serde_json::from_str(&text).map_err(|e| format(e.into()))?;
    raw.to_profile().map_err(format)
}
