//! Loading scenario configs from TOML with environment overrides.
//!
//! Every key `section.key` can be overridden by `RML_<SECTION>_<KEY>`, e.g.
//! `RML_SCENARIO_N_VEHICLES=30`. Values are parsed as the key's type.

use std::path::Path;

use toml::{Table, Value};

use crate::engine::ScenarioConfig;
use crate::error::{Error, Result};

pub const ENV_PREFIX: &str = "RML_";

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn key_in(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

fn parse_error(src: &str, err: toml::de::Error) -> Error {
    let message = err.message().trim().to_string();
    Error::Parse {
        line: err.span().map(|s| line_of(src, s.start)),
        key: key_in(&message),
        message,
    }
}

/// Parse a config document and apply `overrides` (pairs of env-style names
/// and raw values). The result is validated.
pub fn parse_config_with<I, K, V>(src: &str, overrides: I) -> Result<ScenarioConfig>
where
    I: IntoIterator<Item = (K, V)>,
    K: AsRef<str>,
    V: AsRef<str>,
{
    let mut table: Table = src.parse().map_err(|e| parse_error(src, e))?;
    apply_overrides(&mut table, overrides)?;
    let text = toml::to_string(&table).map_err(|e| Error::Config(e.to_string()))?;
    let cfg: ScenarioConfig = toml::from_str(&text).map_err(|e| {
        // Offsets in the re-serialized text are meaningless to the user; keep
        // the key, and recover the line from the original only when possible.
        match parse_error(&text, e) {
            Error::Parse { key, message, .. } => Error::Parse {
                line: key.as_deref().and_then(|k| find_key_line(src, k)),
                key,
                message,
            },
            other => other,
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn find_key_line(src: &str, key: &str) -> Option<usize> {
    src.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}

/// Parse a config document without environment overrides.
pub fn parse_config_str(src: &str) -> Result<ScenarioConfig> {
    parse_config_with(src, std::iter::empty::<(String, String)>())
}

/// Read `path` and apply the `RML_*` variables of the current process.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_with(&src, env_overrides())
}

/// `RML_*` variables of the current process, sorted by name.
pub fn env_overrides() -> Vec<(String, String)> {
    let mut vars: Vec<(String, String)> = std::env::vars().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
    vars.sort();
    vars
}

fn typed_value(template: &Value, raw: &str, name: &str) -> Result<Value> {
    let bad = |what: &str| Error::Config(format!("{name}: cannot parse `{raw}` as {what}"));
    Ok(match template {
        Value::Integer(_) => Value::Integer(raw.trim().parse().map_err(|_| bad("an integer"))?),
        Value::Float(_) => Value::Float(raw.trim().parse().map_err(|_| bad("a number"))?),
        Value::Boolean(_) => Value::Boolean(raw.trim().parse().map_err(|_| bad("a boolean"))?),
        _ => Value::String(raw.to_string()),
    })
}

/// Merge env-style overrides into a parsed document. Unknown names are
/// rejected so typos do not pass silently.
pub fn apply_overrides<I, K, V>(table: &mut Table, overrides: I) -> Result<()>
where
    I: IntoIterator<Item = (K, V)>,
    K: AsRef<str>,
    V: AsRef<str>,
{
    let defaults = Table::try_from(ScenarioConfig::default()).map_err(|e| Error::Config(e.to_string()))?;
    for (name, raw) in overrides {
        let name = name.as_ref();
        let Some(rest) = name.strip_prefix(ENV_PREFIX) else {
            continue;
        };
        let lower = rest.to_ascii_lowercase();
        let found = lower.split_once('_').and_then(|(section, key)| {
            let template = defaults.get(section)?.as_table()?.get(key)?;
            Some((section, key, template))
        });
        let Some((section, key, template)) = found else {
            return Err(Error::Config(format!("{name} does not name a config key")));
        };
        let value = typed_value(template, raw.as_ref(), name)?;
        let entry = table
            .entry(section.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        let Value::Table(sec) = entry else {
            return Err(Error::Config(format!("`{section}` must be a table")));
        };
        sec.insert(key.to_string(), value);
    }
    Ok(())
}

/// The resolved config as a TOML document.
pub fn to_toml(cfg: &ScenarioConfig) -> String {
    toml::to_string(cfg).expect("config always serializes")
}
