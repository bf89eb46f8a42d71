//! Config files become flags placed before the user's own, so explicit
//! flags win (every subcommand lets a later occurrence override).
//!
//! Accepted forms: a manifest written by a previous run, a flat JSON
//! object, or `key = value` lines. Keys are flag names with `-` or `_`.
//! A `true` boolean becomes a bare flag and `false` is dropped.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

pub const TOOL: &str = "ctrw";

/// Finds `--config PATH` or `--config=PATH` in raw arguments.
pub fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Index of the subcommand in raw arguments: the first one that is not a
/// flag. Global flags other than help/version do not exist, so this is
/// the second argument in practice.
pub fn subcommand_index(args: &[OsString]) -> Option<usize> {
    args.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')).map(|i| i + 1)
}

pub fn load(path: &Path, command: &str) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let entries = if text.trim_start().starts_with('{') {
        from_json(&text, command)?
    } else {
        from_key_values(&text)?
    };
    let mut out = Vec::new();
    for (key, value) in entries {
        let flag = format!("--{}", key.trim().replace('_', "-"));
        if flag == "--config" {
            continue;
        }
        match value {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => {
                out.push(flag.into());
                out.push(s.into());
            }
            Value::Number(n) => {
                out.push(flag.into());
                out.push(n.to_string().into());
            }
            other => bail!("config key {key}: unsupported value {other}"),
        }
    }
    Ok(out)
}

fn from_json(text: &str, command: &str) -> Result<Vec<(String, Value)>> {
    let root: Map<String, Value> = serde_json::from_str(text).context("config is not a JSON object")?;
    let map = match (root.get("tool"), root.get("config")) {
        (Some(_), Some(Value::Object(cfg))) => {
            if let Some(Value::String(c)) = root.get("command") {
                if c != command {
                    bail!("manifest was written by `{c}`, not `{command}`");
                }
            }
            cfg.clone()
        }
        _ => root,
    };
    Ok(map.into_iter().collect())
}

fn from_key_values(text: &str) -> Result<Vec<(String, Value)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key=value", i + 1);
        };
        let v = v.trim();
        let value = match v {
            "true" => Value::Bool(true),
            "false" => Value::Bool(false),
            _ => Value::String(v.to_string()),
        };
        out.push((k.trim().to_string(), value));
    }
    Ok(out)
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    tool: &'a str,
    version: &'a str,
    command: &'a str,
    config: &'a C,
}

pub fn write_manifest<C: Serialize>(dir: &Path, command: &str, config: &C) -> Result<()> {
    let m = Manifest {
        tool: TOOL,
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
    };
    let mut text = serde_json::to_string_pretty(&m)?;
    text.push('\n');
    std::fs::write(dir.join("manifest.json"), text).context("writing manifest.json")
}
