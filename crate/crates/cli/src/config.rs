//! Settings resolved from flags, an optional config file, and defaults.

use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{bail, Context, Result};
use toml::{Table, Value};

/// Keys any subcommand may read from a config file.
const KNOWN_KEYS: &[&str] = &[
    "command", "version", "timestamp", "note", "T", "K", "Kprime", "alpha", "h", "C", "W", "X",
    "Y", "LM", "seed", "n", "format", "points", "trunc_T", "k_max", "a", "b", "cols_a", "cols_b",
    "gaussian", "threshold", "directions", "offsets", "hinges", "Ts",
];

/// A bad flag, config entry or combination of settings.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Reads a TOML config file, or the provenance header of a previous output
/// (its leading `# key = value` lines, or the `provenance` object of JSON).
pub fn read_config(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let parsed = if text.trim_start().starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let prov = v
            .get("provenance")
            .cloned()
            .ok_or_else(|| usage(format!("{}: no provenance object", path.display())))?;
        serde_json::from_value::<Table>(prov).map_err(|e| usage(format!("{}: {e}", path.display())))
    } else if text.starts_with("# ") {
        let header: String = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .map(|l| format!("{}\n", l.trim_start_matches('#').trim_start()))
            .collect();
        header.parse::<Table>().map_err(|e| usage(format!("{}: {e}", path.display())))
    } else {
        text.parse::<Table>().map_err(|e| usage(format!("{}: {e}", path.display())))
    }?;
    for key in parsed.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            bail!(usage(format!("{}: unknown key {key:?}", path.display())));
        }
    }
    Ok(parsed)
}

/// Resolves settings in precedence order and records what was used.
pub struct Resolver {
    file: Table,
    pub provenance: Vec<(String, Value)>,
    seen: BTreeSet<String>,
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        Value::String(s) => s.parse().map_err(|_| usage(format!("config key {key}: not a number: {s:?}"))),
        _ => Err(usage(format!("config key {key}: expected a number"))),
    }
}

/// Counts may be written as `100000` or `1e5`.
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a count: {s:?}"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(format!("not a non-negative integer: {s:?}"))
    }
}

fn as_u64(key: &str, v: &Value) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        Value::Float(x) => parse_count(&x.to_string()).map_err(|e| usage(format!("config key {key}: {e}"))),
        Value::String(s) => parse_count(s).map_err(|e| usage(format!("config key {key}: {e}"))),
        _ => Err(usage(format!("config key {key}: expected a non-negative integer"))),
    }
}

fn u64_value(x: u64) -> Value {
    match i64::try_from(x) {
        Ok(i) => Value::Integer(i),
        Err(_) => Value::String(x.to_string()),
    }
}

impl Resolver {
    pub fn new(file: Option<Table>) -> Self {
        Self {
            file: file.unwrap_or_default(),
            provenance: Vec::new(),
            seen: BTreeSet::new(),
        }
    }

    fn record(&mut self, key: &str, v: Value) {
        if self.seen.insert(key.to_string()) {
            self.provenance.push((key.to_string(), v));
        }
    }

    pub fn opt_f64(&mut self, key: &str, flag: Option<f64>) -> Result<Option<f64>> {
        let v = match flag {
            Some(x) => Some(x),
            None => self.file.get(key).map(|v| as_f64(key, v)).transpose()?,
        };
        if let Some(x) = v {
            if !x.is_finite() {
                bail!(usage(format!("{key} must be finite")));
            }
            self.record(key, Value::Float(x));
        }
        Ok(v)
    }

    pub fn f64(&mut self, key: &str, flag: Option<f64>, default: f64) -> Result<f64> {
        let v = self.opt_f64(key, flag)?.unwrap_or(default);
        self.record(key, Value::Float(v));
        Ok(v)
    }

    pub fn opt_u64(&mut self, key: &str, flag: Option<u64>) -> Result<Option<u64>> {
        let v = match flag {
            Some(x) => Some(x),
            None => self.file.get(key).map(|v| as_u64(key, v)).transpose()?,
        };
        if let Some(x) = v {
            self.record(key, u64_value(x));
        }
        Ok(v)
    }

    pub fn u64(&mut self, key: &str, flag: Option<u64>, default: u64) -> Result<u64> {
        let v = self.opt_u64(key, flag)?.unwrap_or(default);
        self.record(key, u64_value(v));
        Ok(v)
    }

    pub fn opt_string(&mut self, key: &str, flag: Option<String>) -> Result<Option<String>> {
        let v = match flag {
            Some(x) => Some(x),
            None => match self.file.get(key) {
                None => None,
                Some(Value::String(s)) => Some(s.clone()),
                Some(_) => bail!(usage(format!("config key {key}: expected a string"))),
            },
        };
        if let Some(s) = &v {
            self.record(key, Value::String(s.clone()));
        }
        Ok(v)
    }

    pub fn string(&mut self, key: &str, flag: Option<String>, default: &str) -> Result<String> {
        let v = self.opt_string(key, flag)?.unwrap_or_else(|| default.to_string());
        self.record(key, Value::String(v.clone()));
        Ok(v)
    }

    /// A list of reals given as `1e5,1e6` on the command line or an array in
    /// the file.
    pub fn f64_list(&mut self, key: &str, flag: Option<String>, default: &[f64]) -> Result<Vec<f64>> {
        let v: Vec<f64> = match flag {
            Some(s) => s
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| usage(format!("{key}: not a number: {x:?}"))))
                .collect::<Result<_>>()?,
            None => match self.file.get(key) {
                None => default.to_vec(),
                Some(Value::Array(a)) => a.iter().map(|x| as_f64(key, x)).collect::<Result<_>>()?,
                Some(_) => bail!(usage(format!("config key {key}: expected an array"))),
            },
        };
        if v.iter().any(|x| !x.is_finite()) {
            bail!(usage(format!("{key} must be finite")));
        }
        self.record(key, Value::Array(v.iter().map(|&x| Value::Float(x)).collect()));
        Ok(v)
    }

    /// Adds a fixed entry, such as a note about the output's columns.
    pub fn note(&mut self, key: &str, value: &str) {
        self.record(key, Value::String(value.to_string()));
    }
}
