//! Flat `key = value` config files. Flags win over file values.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

fn norm_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

fn flatten(key: &str, v: &toml::Value) -> CliResult<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(a) => a.iter().map(|x| flatten(key, x)).collect::<CliResult<Vec<_>>>()?.join(","),
        _ => return Err(CliError::Config(format!("key '{key}': nested tables are not supported"))),
    })
}

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))?;
        let mut values = BTreeMap::new();
        for (k, v) in &table {
            values.insert(norm_key(k), flatten(k, v)?);
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(&norm_key(key)).map(String::as_str)
    }

    /// `flag`, else the file value under `key`, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        Ok(self.pick_opt(flag, key)?.unwrap_or(default))
    }

    pub fn pick_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("config key '{key}': cannot parse '{s}'"))),
        }
    }

    /// Comma-separated list.
    pub fn pick_list(&self, flag: Option<Vec<f64>>, key: &str) -> CliResult<Option<Vec<f64>>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key).map(parse_list).transpose()
    }
}

pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    let s = s.trim();
    let s = s.strip_prefix("eps=").unwrap_or(s);
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("'{t}' is not a number")))
        })
        .collect()
}
