//! Flat `key = value` configuration with layered overrides.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::ExperimentError;

/// Resolved string-valued parameters, ordered by key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        Self {
            values: pairs.into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }

    /// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ExperimentError::Usage(format!("config line {}: expected `key = value`", lineno + 1)));
            };
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.values.insert(key.into(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// `self` with every key of `top` taking precedence.
    pub fn overlay(&self, top: &Config) -> Config {
        let mut values = self.values.clone();
        values.extend(top.values.iter().map(|(k, v)| (k.clone(), v.clone())));
        Config { values }
    }

    /// Fails on keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), ExperimentError> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(ExperimentError::Usage(format!("unknown parameter `{k}`"))),
            None => Ok(()),
        }
    }

    pub fn value<T: FromStr>(&self, key: &str) -> Result<T, ExperimentError> {
        let raw = self
            .get(key)
            .ok_or_else(|| ExperimentError::Usage(format!("missing parameter `{key}`")))?;
        raw.parse()
            .map_err(|_| ExperimentError::Usage(format!("cannot parse `{key}` = `{raw}`")))
    }

    /// Comma-separated list; must be non-empty.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, ExperimentError> {
        let raw = self
            .get(key)
            .ok_or_else(|| ExperimentError::Usage(format!("missing parameter `{key}`")))?;
        let items = raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| ExperimentError::Usage(format!("cannot parse `{s}` in `{key}`")))
            })
            .collect::<Result<Vec<T>, _>>()?;
        if items.is_empty() {
            return Err(ExperimentError::Usage(format!("`{key}` must list at least one value")));
        }
        Ok(items)
    }

    /// Serialises back to the file format accepted by [`Config::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.values {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}
