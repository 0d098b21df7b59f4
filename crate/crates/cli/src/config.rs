//! Flat `key = value` configuration, one entry per line. Blank lines and
//! lines starting with `#` are ignored. Keys are flag names without the
//! leading dashes.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

pub const KEYS: [&str; 13] = [
    "output",
    "format",
    "x",
    "eps",
    "trace",
    "min",
    "max",
    "step",
    "iteration-cap",
    "digits",
    "suite",
    "samples",
    "seed",
];

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Config {
    entries: HashMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Config::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Config, String> {
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(format!("line {}: unknown key {key:?}", i + 1));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(format!("line {}: duplicate key {key:?}", i + 1));
            }
        }
        Ok(Config { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}
