//! Run configuration: input document, overrides and seed.

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub overrides: Vec<(String, Value)>,
    pub seed: Option<u64>,
}

/// `key=value`, where `key` may be a dotted path and `value` is parsed as
/// JSON when possible and taken as a string otherwise.
pub fn parse_override(raw: &str) -> Result<(String, Value)> {
    let (key, value) = raw
        .split_once('=')
        .ok_or_else(|| anyhow!("override `{raw}` is not of the form key=value"))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        bail!("override `{raw}` has an empty key");
    }
    let value = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
    Ok((key.to_string(), value))
}

fn apply(doc: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut node = doc;
    let mut parts = key.split('.').peekable();
    while let Some(part) = parts.next() {
        let map = node
            .as_object_mut()
            .ok_or_else(|| anyhow!("override `{key}`: `{part}` is not inside an object"))?;
        if parts.peek().is_none() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map.entry(part).or_insert_with(|| Value::Object(Map::new()));
    }
    unreachable!("keys are nonempty")
}

impl RunConfig {
    /// The input document with overrides applied.
    ///
    /// Without an input file the document starts empty, so every field must
    /// have a default unless `required` is set.
    pub fn document(&self, required: bool) -> Result<Value> {
        let mut doc = match &self.input {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("cannot read config file {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("{} is not valid JSON", path.display()))?
            }
            None if required => bail!("{} needs an input document (--config FILE)", self.subcommand),
            None => Value::Object(Map::new()),
        };
        if !doc.is_object() {
            bail!("the input document must be a JSON object");
        }
        for (key, value) in &self.overrides {
            apply(&mut doc, key, value.clone())?;
        }
        Ok(doc)
    }

    /// Typed view of [`Self::document`]; unknown keys are rejected by the
    /// target type.
    pub fn load<T: DeserializeOwned>(&self, required: bool) -> Result<T> {
        let doc = self.document(required)?;
        serde_json::from_value(doc).with_context(|| format!("invalid {} configuration", self.subcommand))
    }
}
