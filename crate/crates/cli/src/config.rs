//! Merging of the optional JSON config file with command-line flags.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::{Cli, Command, GlobalArgs};

#[derive(Debug)]
pub enum ConfigError {
    /// Invalid parameter values; reported like a command-line usage error.
    Usage(String),
    Io(String),
}

#[derive(Debug)]
pub struct Resolved {
    pub global: GlobalArgs,
    pub command: Command,
}

fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: &Map<String, Value>) -> Result<T, ConfigError> {
    let mut merged = file.clone();
    let flags = serde_json::to_value(flags).map_err(|e| ConfigError::Io(e.to_string()))?;
    if let Value::Object(m) = flags {
        for (k, v) in m {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| ConfigError::Usage(format!("config: {e}")))
}

fn check_even(n: Option<u32>) -> Result<(), ConfigError> {
    match n {
        Some(n) if n % 2 != 0 => Err(ConfigError::Usage(format!("atom number must be even, got {n}"))),
        _ => Ok(()),
    }
}

fn load(path: &str) -> Result<Map<String, Value>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("cannot read config {path}: {e}")))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(ConfigError::Usage(format!("config {path} must contain a JSON object"))),
        Err(e) => Err(ConfigError::Usage(format!("config {path}: {e}"))),
    }
}

pub fn resolve(cli: &Cli) -> Result<Resolved, ConfigError> {
    let file = match &cli.global.config {
        Some(path) => load(path)?,
        None => Map::new(),
    };
    let mut global: GlobalArgs = merge(&cli.global, &file)?;
    global.config = cli.global.config.clone();
    let command = match &cli.command {
        Command::Basis(a) => Command::Basis(merge(a, &file)?),
        Command::Spectrum(a) => Command::Spectrum(merge(a, &file)?),
        Command::Sweep(a) => Command::Sweep(merge(a, &file)?),
        Command::Meanfield(a) => Command::Meanfield(merge(a, &file)?),
        Command::Geophase(a) => Command::Geophase(merge(a, &file)?),
        Command::Trajectory(a) => Command::Trajectory(merge(a, &file)?),
        Command::GapMin(a) => Command::GapMin(merge(a, &file)?),
        Command::Scaling(a) => Command::Scaling(merge(a, &file)?),
        Command::Fidelity(a) => Command::Fidelity(merge(a, &file)?),
    };
    match &command {
        Command::Basis(a) => check_even(a.n)?,
        Command::Spectrum(a) => check_even(a.n)?,
        Command::Sweep(a) => check_even(a.n)?,
        Command::GapMin(a) => check_even(a.n)?,
        Command::Fidelity(a) => check_even(a.n)?,
        Command::Scaling(a) => {
            for &n in a.n_list.iter().flatten() {
                check_even(Some(n))?;
            }
        }
        _ => {}
    }
    if global.threads == Some(0) {
        return Err(ConfigError::Usage("--threads must be at least 1".into()));
    }
    Ok(Resolved { global, command })
}
