//! JSON config files mirrored onto command-line flags.
//!
//! A config is a JSON object. Top-level scalar keys apply to whichever
//! subcommand declares a flag of that name; a key named after a subcommand
//! holds an object of settings for that subcommand only. Keys use the flag
//! names with `-` or `_`. Flags given on the command line always win.

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::parser::ValueSource;
use clap::{ArgAction, ArgMatches, Command};
use serde_json::{Map, Value};

fn arg_id(key: &str) -> String {
    key.replace('-', "_")
}

fn scalar(v: &Value, key: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => bail!("config key {key:?}: expected a string, number or boolean"),
    }
}

fn flags_for(sub: &Command, sub_m: &ArgMatches, key: &str, value: &Value, out: &mut Vec<OsString>) -> Result<()> {
    let id = arg_id(key);
    let arg = sub
        .get_arguments()
        .find(|a| a.get_id().as_str() == id)
        .ok_or_else(|| anyhow!("config key {key:?} is not an option of `{}`", sub.get_name()))?;
    if sub_m.value_source(&id) == Some(ValueSource::CommandLine) {
        return Ok(());
    }
    let long = arg
        .get_long()
        .ok_or_else(|| anyhow!("config key {key:?} cannot be set from a config file"))?;
    match arg.get_action() {
        ArgAction::SetTrue => match value {
            Value::Bool(true) => out.push(format!("--{long}").into()),
            Value::Bool(false) => {}
            _ => bail!("config key {key:?}: expected a boolean"),
        },
        ArgAction::Append => {
            let items = match value {
                Value::Array(items) => items.clone(),
                other => vec![other.clone()],
            };
            for item in items {
                out.push(format!("--{long}={}", scalar(&item, key)?).into());
            }
        }
        _ => out.push(format!("--{long}={}", scalar(value, key)?).into()),
    }
    Ok(())
}

/// Returns `argv` extended with the flags a `--config` file contributes, or
/// `argv` unchanged when no config is given.
pub fn apply(cmd: &Command, matches: &ArgMatches, mut argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some((name, sub_m)) = matches.subcommand() else {
        return Ok(argv);
    };
    let Some(path) = sub_m.get_one::<PathBuf>("config").or_else(|| matches.get_one::<PathBuf>("config")) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let root: Map<String, Value> = serde_json::from_str(&text)
        .with_context(|| format!("config {} must be a JSON object", path.display()))?;
    let sub = cmd.find_subcommand(name).expect("matched subcommand exists");
    let mut extra = Vec::new();
    for (key, value) in &root {
        if let Some(other) = cmd.find_subcommand(key) {
            if other.get_name() != name {
                continue;
            }
            let Value::Object(section) = value else {
                bail!("config section {key:?} must be an object");
            };
            for (k, v) in section {
                flags_for(sub, sub_m, k, v, &mut extra)?;
            }
        } else if sub.get_arguments().any(|a| a.get_id().as_str() == arg_id(key)) {
            flags_for(sub, sub_m, key, value, &mut extra)?;
        } else if !cmd
            .get_subcommands()
            .any(|s| s.get_arguments().any(|a| a.get_id().as_str() == arg_id(key)))
        {
            bail!("unknown config key {key:?}");
        }
    }
    argv.extend(extra);
    Ok(argv)
}
