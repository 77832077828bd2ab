//! TOML configuration files and `key=value` overrides.
//!
//! A configuration is resolved in three layers: a base (the built-in defaults or
//! a figure preset), an optional TOML file, and command-line overrides. Tables
//! are merged key by key, arrays and scalars are replaced.

use std::path::Path;

use dsmimo_core::{Error, ExperimentConfig, Result};
use toml::{Table, Value};

/// Resolves a configuration from `base`, an optional TOML `file` and a list
/// of `key=value` overrides with dotted keys (`network.antennas=32`).
pub fn parse_config(
    base: &ExperimentConfig,
    file: Option<&Path>,
    overrides: &[String],
) -> Result<ExperimentConfig> {
    let text = match file {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?),
        None => None,
    };
    parse_config_str(base, text.as_deref(), overrides)
}

/// [`parse_config`] on an in-memory document.
pub fn parse_config_str(
    base: &ExperimentConfig,
    text: Option<&str>,
    overrides: &[String],
) -> Result<ExperimentConfig> {
    let mut table = to_table(base)?;
    if let Some(text) = text {
        let file: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("config", e.message().to_string()))?;
        merge(&mut table, file);
    }
    for assignment in overrides {
        apply_override(&mut table, assignment)?;
    }
    let config = from_table(table)?;
    config.validate()?;
    Ok(config)
}

/// Serializes a configuration to TOML. Parsing the result with
/// [`parse_config_str`] gives back the same configuration.
pub fn to_toml(config: &ExperimentConfig) -> Result<String> {
    check_seed(config.sampling.seed)?;
    toml::to_string(config).map_err(|e| Error::config("config", e.to_string()))
}

/// TOML integers are signed 64-bit, so larger seeds cannot be echoed in a manifest.
pub fn check_seed(seed: u64) -> Result<()> {
    if seed > i64::MAX as u64 {
        return Err(Error::config(
            "sampling.seed",
            format!("must not exceed {}", i64::MAX),
        ));
    }
    Ok(())
}

fn to_table(config: &ExperimentConfig) -> Result<Table> {
    check_seed(config.sampling.seed)?;
    Table::try_from(config).map_err(|e| Error::config("config", e.to_string()))
}

fn from_table(table: Table) -> Result<ExperimentConfig> {
    let probe = table.clone();
    Value::Table(table).try_into().map_err(|e: toml::de::Error| {
        let message = e.message().to_string();
        let key = unknown_field(&message)
            .and_then(|field| find_key(&probe, field, ""))
            .unwrap_or_else(|| "config".to_string());
        Error::config(key, message)
    })
}

/// Name of the offending field in a serde "unknown field" message.
fn unknown_field(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("unknown field `")?;
    rest.split('`').next()
}

/// Dotted path of the first key named `field`, searching tables depth first.
fn find_key(table: &Table, field: &str, prefix: &str) -> Option<String> {
    for (key, value) in table {
        let path = if prefix.is_empty() {
            key.clone()
        } else {
            format!("{prefix}.{key}")
        };
        if key == field {
            return Some(path);
        }
        let found = match value {
            Value::Table(inner) => find_key(inner, field, &path),
            Value::Array(items) => items.iter().find_map(|item| match item {
                Value::Table(inner) => find_key(inner, field, &path),
                _ => None,
            }),
            _ => None,
        };
        if found.is_some() {
            return found;
        }
    }
    None
}

fn merge(base: &mut Table, over: Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}

/// Applies one `dotted.key=value` assignment. The value is read as a TOML
/// value; anything that does not parse is taken as a bare string.
fn apply_override(table: &mut Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::config(assignment, "override must have the form key=value"))?;
    let key = key.trim();
    let raw = raw.trim();
    if key.is_empty() {
        return Err(Error::config(assignment, "override has an empty key"));
    }
    let value = match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => Value::String(raw.to_string()),
    };

    let parts: Vec<&str> = key.split('.').collect();
    let (last, parents) = parts.split_last().expect("nonempty key");
    let mut current = table;
    for (depth, part) in parents.iter().enumerate() {
        let entry = current
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        current = match entry {
            Value::Table(t) => t,
            _ => {
                return Err(Error::config(
                    parts[..=depth].join("."),
                    "is not a table and has no sub-keys",
                ))
            }
        };
    }
    current.insert(last.to_string(), value);
    Ok(())
}
