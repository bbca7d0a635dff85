use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;

/// Option values read from a TOML file. Keys are the long flag names;
/// command-line flags override them.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub seed: Option<u64>,
    pub param: Option<String>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
    pub gamma_t: Option<f64>,
    pub shots: Option<u64>,
    pub netlist: Option<PathBuf>,
    pub builtin: Option<String>,
    pub state: Option<String>,
    pub input: Option<String>,
    /// Template values for `{name}` placeholders.
    #[serde(default)]
    pub set: BTreeMap<String, toml::Value>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}
