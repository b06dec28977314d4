//! Run configuration: two profiles and a few knobs.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use taf_core::autgroup::SearchBounds;
use taf_core::supernat::SequenceProfile;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub r: SequenceProfile,
    pub s: SequenceProfile,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    pub level: usize,
    pub samples: usize,
    pub seed: u64,
    pub search: SearchOptions,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            level: 2,
            samples: 50,
            seed: 7,
            search: SearchOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchOptions {
    pub max_depth: usize,
    pub max_k: u64,
    pub max_m: i64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        let b = SearchBounds::default();
        Self {
            max_depth: b.max_depth,
            max_k: b.max_k,
            max_m: b.max_m,
        }
    }
}

impl From<SearchOptions> for SearchBounds {
    fn from(o: SearchOptions) -> Self {
        SearchBounds {
            max_depth: o.max_depth,
            max_k: o.max_k,
            max_m: o.max_m,
        }
    }
}

#[derive(Deserialize)]
struct LooseProfile {
    #[serde(default)]
    preamble: Vec<i64>,
    cycle: Vec<i64>,
}

fn field_error(field: &str, e: impl ToString) -> CliError {
    CliError::Field {
        field: field.into(),
        message: e.to_string(),
    }
}

fn profile(
    root: &serde_json::Map<String, Value>,
    field: &str,
) -> Result<SequenceProfile, CliError> {
    let value = root
        .get(field)
        .ok_or_else(|| field_error(field, "missing"))?;
    let loose: LooseProfile =
        serde_json::from_value(value.clone()).map_err(|e| field_error(field, e))?;
    let invalid = |message: String| CliError::InvalidProfile {
        field: field.into(),
        message,
    };
    let entries = |v: Vec<i64>| {
        v.into_iter()
            .map(|t| u64::try_from(t).map_err(|_| invalid(format!("entry {t} is below 1"))))
            .collect::<Result<Vec<u64>, _>>()
    };
    SequenceProfile::new(entries(loose.preamble)?, entries(loose.cycle)?).map_err(|e| match e {
        taf_core::Error::InvalidProfile(message) => invalid(message),
        other => invalid(other.to_string()),
    })
}

/// Parses and validates a JSON configuration.
pub fn parse_config(text: &str) -> Result<Config, CliError> {
    let root: Value = serde_json::from_str(text).map_err(|e| CliError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Object(root) = root else {
        return Err(field_error("<root>", "expected an object"));
    };
    if let Some(extra) = root
        .keys()
        .find(|k| !["r", "s", "options"].contains(&k.as_str()))
    {
        return Err(field_error(extra, "unknown field"));
    }
    let r = profile(&root, "r")?;
    let s = profile(&root, "s")?;
    let options: Options = match root.get("options") {
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| field_error("options", e))?,
        None => Options::default(),
    };
    if options.level < 1 {
        return Err(field_error("options.level", "levels start at 1"));
    }
    Ok(Config { r, s, options })
}

/// The JSON form read back by [`parse_config`].
pub fn config_to_json(config: &Config) -> String {
    serde_json::to_string_pretty(config).expect("config serializes")
}

/// Applies `TAF_SEARCH_BOUND`: either one number for both `k` and `m`, or
/// `depth,k,m`.
pub fn search_bounds_override(
    base: SearchBounds,
    var: Option<&str>,
) -> Result<SearchBounds, CliError> {
    let Some(text) = var.map(str::trim).filter(|t| !t.is_empty()) else {
        return Ok(base);
    };
    let bad = || {
        CliError::InvalidArgument(format!(
            "TAF_SEARCH_BOUND={text:?}: expected N or depth,k,m"
        ))
    };
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [n] => {
            let n: u64 = n.parse().map_err(|_| bad())?;
            Ok(SearchBounds {
                max_k: n,
                max_m: i64::try_from(n).map_err(|_| bad())?,
                ..base
            })
        }
        [depth, k, m] => Ok(SearchBounds {
            max_depth: depth.parse().map_err(|_| bad())?,
            max_k: k.parse().map_err(|_| bad())?,
            max_m: m.parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}
