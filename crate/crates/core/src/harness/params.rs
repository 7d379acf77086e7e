use std::collections::BTreeMap;
use std::str::FromStr;

use serde_json::Value;

use super::ExperimentInfo;
use crate::error::{invalid, Result};

/// Defaults overlaid with `key=value` overrides. Keys outside the
/// registry defaults are rejected.
#[derive(Clone, Debug)]
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    pub fn resolve(info: &ExperimentInfo, overrides: &BTreeMap<String, String>) -> Result<Self> {
        let mut values: BTreeMap<String, String> = info
            .defaults
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        for (k, v) in overrides {
            if !values.contains_key(k) {
                let known: Vec<&str> = info.defaults.iter().map(|d| d.0).collect();
                return invalid(format!(
                    "experiment {} has no parameter `{k}` (known: {})",
                    info.name,
                    known.join(", ")
                ));
            }
            values.insert(k.clone(), v.clone());
        }
        Ok(Params { values })
    }

    fn raw(&self, key: &str) -> Result<&str> {
        match self.values.get(key) {
            Some(v) => Ok(v),
            None => invalid(format!("missing parameter `{key}`")),
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.raw(key)?;
        raw.trim()
            .parse()
            .or_else(|_| invalid(format!("cannot parse parameter {key}={raw}")))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let raw = self.raw(key)?;
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .or_else(|_| invalid(format!("cannot parse parameter {key}={raw}")))
            })
            .collect()
    }

    pub fn text(&self, key: &str) -> Result<String> {
        self.raw(key).map(str::to_string)
    }

    /// Numbers as JSON numbers, lists as arrays, anything else as text.
    pub fn to_json(&self) -> BTreeMap<String, Value> {
        self.values
            .iter()
            .map(|(k, v)| {
                let parse = |s: &str| -> Option<Value> {
                    let s = s.trim();
                    if let Ok(i) = s.parse::<i64>() {
                        Some(Value::from(i))
                    } else {
                        s.parse::<f64>().ok().map(Value::from)
                    }
                };
                let value = if v.contains(',') {
                    let items: Option<Vec<Value>> = v.split(',').map(parse).collect();
                    items
                        .map(Value::Array)
                        .unwrap_or_else(|| Value::from(v.clone()))
                } else {
                    parse(v).unwrap_or_else(|| Value::from(v.clone()))
                };
                (k.clone(), value)
            })
            .collect()
    }
}
