//! Flat key=value configuration files mirroring the physics flags.
//!
//! Lines are `key = value`; `#` starts a comment. Explicit command-line
//! flags always win over file values, which win over built-in defaults.

use std::collections::HashMap;
use std::path::Path;

const KNOWN_KEYS: &[&str] = &[
    "t-hot",
    "t-cold",
    "omega-high",
    "omega-low",
    "gamma",
    "scaling-mode",
    "rel-tol",
    "omega",
    "temperature",
    "beta",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value, got '{line}'", i + 1))?;
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(format!("line {}: unknown key '{key}'", i + 1));
            }
            if values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(format!("line {}: duplicate key '{key}'", i + 1));
            }
        }
        Ok(Self { values })
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, String> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|e| format!("config key {key} = '{v}': {e}")),
        }
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// flag > config > default
pub fn resolve_f64(
    flag: Option<f64>,
    config: &ConfigFile,
    key: &str,
    default: f64,
) -> Result<f64, String> {
    match flag {
        Some(v) => Ok(v),
        None => Ok(config.get_f64(key)?.unwrap_or(default)),
    }
}
