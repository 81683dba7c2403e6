//! Flat `key = value` configuration files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::{Error, Result};

pub const KEYS: [&str; 16] = [
    "matrix",
    "rhs",
    "function",
    "radius",
    "pole",
    "coeffs",
    "beta",
    "epsilon",
    "nodes",
    "order",
    "hhl_error",
    "seed",
    "normalize",
    "out",
    "epsilon_list",
    "nodes_list",
];

/// Parsed configuration file. Relative paths resolve against the file's
/// directory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
    base: PathBuf,
}

impl ConfigFile {
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lno, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (key, value) = t.split_once('=').ok_or_else(|| {
                Error::Parse(format!("config line {}: expected `key = value`", lno + 1))
            })?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::Parse(format!(
                    "config line {}: unknown key {key:?}",
                    lno + 1
                )));
            }
            let value = value.trim().trim_matches('"').to_string();
            if values.insert(key.clone(), value).is_some() {
                return Err(Error::Parse(format!(
                    "config line {}: duplicate key {key:?}",
                    lno + 1
                )));
            }
        }
        Ok(Self {
            values,
            base: base.to_path_buf(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::Parse(format!("config key {key}: bad value {v:?}")))
            })
            .transpose()
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.values.get(key).map(|v| {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                self.base.join(p)
            }
        })
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        match self.values.get(key).map(|s| s.as_str()) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(v) => Err(Error::Parse(format!(
                "config key {key}: expected true or false, got {v:?}"
            ))),
        }
    }

    /// Comma-separated list; an empty value is an error.
    pub fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.values.get(key).map(|v| parse_list(v, key)).transpose()
    }
}

pub fn parse_list<T: std::str::FromStr>(v: &str, key: &str) -> Result<Vec<T>> {
    let items: Vec<&str> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(Error::Parse(format!("{key}: empty list")));
    }
    items
        .iter()
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::Parse(format!("{key}: bad entry {s:?}")))
        })
        .collect()
}
