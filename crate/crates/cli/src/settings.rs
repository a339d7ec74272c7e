//! JSON settings files. Each subcommand reads the object stored under its
//! name; keys are the long flag names.

use std::path::Path;

use anyhow::{bail, Context};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::Failure;

pub fn load(path: &Path) -> anyhow::Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading settings {}", path.display()))?;
    match serde_json::from_str(&text).with_context(|| format!("parsing settings {}", path.display()))? {
        Value::Object(m) => Ok(m),
        _ => bail!("settings {} must hold a JSON object", path.display()),
    }
}

/// Overlays the flags given on the command line onto the settings section.
pub fn merge<T: Serialize + DeserializeOwned>(cli: T, section: Option<Value>) -> Result<T, Failure> {
    let Some(section) = section else {
        return Ok(cli);
    };
    let Value::Object(mut base) = section else {
        return Err(Failure::usage("each settings section must be a JSON object"));
    };
    let Value::Object(flags) = serde_json::to_value(&cli).map_err(|e| Failure::usage(e.to_string()))? else {
        unreachable!("argument structs serialize to objects");
    };
    base.extend(flags);
    serde_json::from_value(Value::Object(base)).map_err(|e| Failure::usage(format!("invalid settings: {e}")))
}
