//! `--config FILE`: a JSON object keyed by long option name. Its entries are
//! spliced in right after the subcommand, ahead of the real arguments, and
//! since every option overrides itself the command line wins on conflicts.

use std::ffi::OsString;
use std::fs;

use anyhow::{bail, Context, Result};
use serde_json::Value;

fn config_path(argv: &mut Vec<OsString>) -> Result<Option<OsString>> {
    let Some(i) = argv.iter().position(|a| a == "--config" || a.to_string_lossy().starts_with("--config=")) else {
        return Ok(None);
    };
    let flag = argv.remove(i).to_string_lossy().into_owned();
    if let Some(path) = flag.strip_prefix("--config=") {
        return Ok(Some(path.into()));
    }
    if i >= argv.len() {
        bail!("--config needs a file path");
    }
    Ok(Some(argv.remove(i)))
}

fn tokens(key: &str, value: &Value) -> Result<Vec<String>> {
    let flag = format!("--{}", key.replace('_', "-"));
    let scalar = |v: &Value| -> Result<String> {
        match v {
            Value::Number(n) => Ok(n.to_string()),
            Value::String(s) => Ok(s.clone()),
            other => bail!("config key '{key}': unsupported value {other}"),
        }
    };
    Ok(match value {
        Value::Null | Value::Bool(false) => Vec::new(),
        Value::Bool(true) => vec![flag],
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect::<Result<_>>()?;
            vec![format!("{flag}={}", parts.join(","))]
        }
        v => vec![format!("{flag}={}", scalar(v)?)],
    })
}

/// Returns `argv` with the config entries merged in, or unchanged when no
/// `--config` is given.
pub fn expand(mut argv: Vec<OsString>, subcommands: &[&str]) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&mut argv)? else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading config {}", path.to_string_lossy()))?;
    let Value::Object(map) = serde_json::from_str(&text).context("config is not valid JSON")? else {
        bail!("config must be a JSON object keyed by option name");
    };
    let Some(at) = argv.iter().skip(1).position(|a| subcommands.iter().any(|s| a == s)) else {
        bail!("--config given without a subcommand");
    };
    let mut extra = Vec::new();
    for (key, value) in &map {
        extra.extend(tokens(key, value)?.into_iter().map(OsString::from));
    }
    let at = at + 2;
    argv.splice(at..at, extra);
    Ok(argv)
}
