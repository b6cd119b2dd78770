//! Layered configuration: built-in defaults, then a JSON config file, then
//! command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args, Serialize)]
pub struct CommonFlags {
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Worker threads for parallel sections; results do not depend on it.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// JSON object whose keys are flag names (with underscores).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Common {
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for Common {
    fn default() -> Self {
        Self { out: None, format: None, seed: 1, threads: None }
    }
}

/// A command's parameter block.
pub trait CommandConfig: Default + Serialize + DeserializeOwned {
    /// Output format when neither a flag nor the config file sets one.
    const FORMAT: Format;

    /// Checks every precondition before any computation starts.
    fn validate(&self) -> Result<(), CliError>;
}

pub fn read_config_file(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::Config("config file must hold a JSON object".into())),
        Err(e) => Err(CliError::Config(format!("config file {} is not valid JSON: {e}", path.display()))),
    }
}

fn object<T: Serialize>(value: &T) -> Map<String, Value> {
    match serde_json::to_value(value) {
        Ok(Value::Object(map)) => map,
        _ => Map::new(),
    }
}

fn overlay(base: &mut Map<String, Value>, layer: Map<String, Value>) {
    for (k, v) in layer {
        base.insert(k, v);
    }
}

/// Merges defaults, file and flags into the common block and the command's
/// block. Unknown file keys are rejected.
pub fn resolve<C: CommandConfig>(
    file: Option<Map<String, Value>>,
    common_flags: &CommonFlags,
    command_flags: &impl Serialize,
) -> Result<(Common, C), CliError> {
    let mut common = object(&Common::default());
    common.insert("out".into(), Value::Null);
    let mut command = object(&C::default());
    for (k, v) in file.unwrap_or_default() {
        if common.contains_key(&k) {
            common.insert(k, v);
        } else if command.contains_key(&k) {
            command.insert(k, v);
        } else {
            return Err(CliError::Config(format!("unknown config key \"{k}\"")));
        }
    }
    overlay(&mut common, object(common_flags));
    overlay(&mut command, object(command_flags));
    let common: Common = serde_json::from_value(Value::Object(common))
        .map_err(|e| CliError::Config(format!("invalid common option: {e}")))?;
    let command: C =
        serde_json::from_value(Value::Object(command)).map_err(|e| CliError::Config(format!("invalid option: {e}")))?;
    if common.threads == Some(0) {
        return Err(CliError::Config("threads must be >= 1".into()));
    }
    command.validate()?;
    let mut common = common;
    common.format.get_or_insert(C::FORMAT);
    Ok((common, command))
}

/// The effective configuration echoed into every output.
pub fn echo<C: Serialize>(command: &str, common: &Common, config: &C) -> Value {
    let mut map = Map::new();
    map.insert("command".into(), Value::String(command.into()));
    overlay(&mut map, object(common));
    overlay(&mut map, object(config));
    Value::Object(map)
}
