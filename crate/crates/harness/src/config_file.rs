//! Human-readable TOML configuration.
//!
//! The file mirrors [`SystemConfig`] field by field; every key is optional
//! and defaults to the 8-UE reference scenario ([`SystemConfig::reference`]).
//! Per-UE keys (`energy_j`, `cycles_per_bit`, `kappa`) take either one
//! number, applied to every UE, or an array of length `n_ue`. When omitted
//! they are filled from the default for however many UEs are configured.
//! Unknown keys are rejected so typos do not silently fall back to a
//! default.

use std::path::Path;

use ris_mec_core::SystemConfig;
use toml::{Table, Value};

use crate::error::{HarnessError, Result};

const PER_UE: [&str; 3] = ["energy_j", "cycles_per_bit", "kappa"];

pub fn load_config(path: &Path) -> Result<SystemConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_config(&text).map_err(|e| match e {
        HarnessError::Invalid(msg) => HarnessError::ConfigFile {
            path: path.to_path_buf(),
            msg,
        },
        other => other,
    })
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<SystemConfig> {
    let mut user: Table = text.parse().map_err(|e: toml::de::Error| HarnessError::Invalid(e.to_string()))?;
    let defaults = SystemConfig::reference();
    let mut merged = Table::try_from(&defaults).map_err(|e| HarnessError::Invalid(e.to_string()))?;

    let n_ue = match user.get("n_ue") {
        Some(v) => v
            .as_integer()
            .filter(|n| *n >= 0)
            .ok_or_else(|| HarnessError::Invalid("n_ue must be a non-negative integer".into()))? as usize,
        None => defaults.n_ue,
    };
    for key in PER_UE {
        let value = match user.remove(key) {
            Some(v @ (Value::Float(_) | Value::Integer(_))) => Value::Array(vec![v; n_ue]),
            Some(v) => v,
            None => Value::Array(vec![merged[key].as_array().and_then(|a| a.first()).cloned().unwrap(); n_ue]),
        };
        user.insert(key.to_string(), value);
    }
    merge(&mut merged, user, "")?;
    let config: SystemConfig = merged.try_into().map_err(|e: toml::de::Error| HarnessError::Invalid(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Render a configuration in the same schema (all keys explicit).
pub fn to_toml_string(config: &SystemConfig) -> Result<String> {
    toml::to_string(config).map_err(|e| HarnessError::Invalid(e.to_string()))
}

fn merge(base: &mut Table, user: Table, prefix: &str) -> Result<()> {
    for (key, value) in user {
        let path = format!("{prefix}{key}");
        let Some(slot) = base.get_mut(&key) else {
            return Err(HarnessError::Invalid(format!("unknown key `{path}`")));
        };
        match (slot, value) {
            (Value::Table(inner), Value::Table(v)) => merge(inner, v, &format!("{path}."))?,
            (slot, value) => {
                let value = coerce(slot, value).ok_or_else(|| HarnessError::Invalid(format!("`{path}` has the wrong type")))?;
                *slot = value;
            }
        }
    }
    Ok(())
}

/// Integers are accepted where the default is a float; shapes must agree.
fn coerce(template: &Value, value: Value) -> Option<Value> {
    match (template, value) {
        (Value::Float(_), Value::Integer(i)) => Some(Value::Float(i as f64)),
        (Value::Array(t), Value::Array(items)) => {
            let elem = t.first().cloned().unwrap_or(Value::Float(0.0));
            items.into_iter().map(|v| coerce(&elem, v)).collect::<Option<Vec<_>>>().map(Value::Array)
        }
        (t, v) if t.same_type(&v) => Some(v),
        _ => None,
    }
}
