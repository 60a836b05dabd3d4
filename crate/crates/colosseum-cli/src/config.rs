//! JSON configs: `{"schema": 1, "command": "<subcommand>", <flag>: <value>, ...}`.
//! Keys are flag names (snake or kebab case); `true` enables a switch and
//! `false` or `null` leaves it out. The flags then go through the normal
//! argument parser, so defaults and validation match the command line.

use anyhow::{bail, Context};
use clap::Parser;
use serde_json::Value;

use crate::{Cli, Command};

pub const SCHEMA_VERSION: u64 = 1;

pub fn load(path: &std::path::Path) -> anyhow::Result<Command> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).context("config is not valid JSON")?;
    parse(&value)
}

pub fn parse(value: &Value) -> anyhow::Result<Command> {
    let obj = value.as_object().context("config must be a JSON object")?;
    match obj.get("schema").and_then(Value::as_u64) {
        Some(SCHEMA_VERSION) => {}
        Some(v) => bail!("unsupported schema version {v}, expected {SCHEMA_VERSION}"),
        None => bail!("missing integer field \"schema\""),
    }
    let command = obj.get("command").and_then(Value::as_str).context("missing string field \"command\"")?;
    if command == "run" {
        bail!("a config cannot run another config");
    }
    let mut argv = vec!["colosseum".to_string(), command.to_string()];
    for (key, v) in obj {
        if key == "schema" || key == "command" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Bool(true) => argv.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Number(x) => argv.extend([flag, x.to_string()]),
            Value::String(s) => argv.extend([flag, s.clone()]),
            Value::Array(items) => {
                let parts: Vec<String> = items
                    .iter()
                    .map(|i| match i {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                argv.extend([flag, parts.join(",")]);
            }
            Value::Object(_) => bail!("field {key:?} must not be an object"),
        }
    }
    Ok(Cli::try_parse_from(argv).map_err(|e| anyhow::anyhow!("{}", e.render()))?.command)
}
