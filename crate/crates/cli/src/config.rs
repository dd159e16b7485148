use std::fs;

use serde_json::{Map, Value};

use nrbattery::figures::preset;
use nrbattery::params::{ConfigFile, CONFIG_KEYS};
use nrbattery::SystemConfig;

use crate::error::CliError;
use crate::ConfigArgs;

fn apply_override(doc: &mut Map<String, Value>, spec: &str) -> Result<(), CliError> {
    let (key, value) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{spec}' is not KEY=VALUE")))?;
    let key = key.trim();
    if !CONFIG_KEYS.contains(&key) {
        return Err(CliError::Config(format!(
            "unknown config key '{key}' (known: {})",
            CONFIG_KEYS.join(", ")
        )));
    }
    let number: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("value for '{key}' is not a number: '{value}'")))?;
    let number = serde_json::Number::from_f64(number)
        .ok_or_else(|| CliError::Config(format!("value for '{key}' is not finite")))?;
    doc.insert(key.to_string(), Value::Number(number));
    Ok(())
}

fn base_document(args: &ConfigArgs) -> Result<Map<String, Value>, CliError> {
    let value = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        (None, Some(id)) => {
            let c = preset(id).ok_or_else(|| {
                CliError::Config(format!("unknown preset '{id}' (fig2, fig3, fig4, fig5)"))
            })?;
            serde_json::to_value(ConfigFile::from(&c)).expect("config serializes")
        }
        (None, None) => {
            return Err(CliError::Config("no configuration: pass --config or --preset".into()))
        }
    };
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(CliError::Config("config must be a JSON object".into())),
    }
}

/// Reads the config, applies `--set` overrides in order and validates.
pub fn load(args: &ConfigArgs) -> Result<SystemConfig, CliError> {
    let mut doc = base_document(args)?;
    for spec in &args.overrides {
        apply_override(&mut doc, spec)?;
    }
    let text = serde_json::to_string(&Value::Object(doc)).expect("map serializes");
    Ok(SystemConfig::from_json(&text)?)
}
