//! Tables with a provenance header, written as CSV or JSON.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use toml::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(crate::config::usage(format!("unknown format {s:?} (csv or json)"))),
        }
    }

    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    U(u64),
    S(String),
    B(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits round-trip every f64.
            Cell::F(x) => format!("{x:.16e}"),
            Cell::U(x) => x.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::F(x) => serde_json::Number::from_f64(*x).map_or(serde_json::Value::Null, Into::into),
            Cell::U(x) => (*x).into(),
            Cell::S(s) => s.clone().into(),
            Cell::B(b) => (*b).into(),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn timestamp() -> String {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs().to_string())
        .unwrap_or_default()
}

/// The header block: command, version, timestamp, then every resolved setting.
pub fn provenance(command: &str, settings: &[(String, Value)]) -> Vec<(String, Value)> {
    let mut v = vec![
        ("command".to_string(), Value::String(command.to_string())),
        ("version".to_string(), Value::String(env!("CARGO_PKG_VERSION").to_string())),
        ("timestamp".to_string(), Value::String(timestamp())),
    ];
    v.extend(settings.iter().cloned());
    v
}

fn render(prov: &[(String, Value)], table: &Table, format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut out = String::new();
            for (k, v) in prov {
                out.push_str(&format!("# {k} = {v}\n"));
            }
            let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv))?;
            }
            out.push_str(std::str::from_utf8(&w.into_inner()?)?);
            Ok(out)
        }
        Format::Json => {
            let mut p = serde_json::Map::new();
            for (k, v) in prov {
                p.insert(k.clone(), serde_json::to_value(v)?);
            }
            let rows: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|r| {
                    serde_json::Value::Object(
                        table
                            .columns
                            .iter()
                            .zip(r)
                            .map(|(c, x)| (c.to_string(), x.json()))
                            .collect(),
                    )
                })
                .collect();
            let doc = serde_json::json!({ "provenance": p, "rows": rows });
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
    }
}

/// Writes `<dir>/<command>.<ext>` and returns its path.
pub fn write(dir: &Path, command: &str, prov: &[(String, Value)], table: &Table, format: Format) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(format!("{command}.{}", format.ext()));
    let text = render(prov, table, format)?;
    let mut f = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    f.write_all(text.as_bytes())?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Vec<(String, Value)>, Table) {
        let prov = vec![("T".to_string(), Value::Float(1e5)), ("seed".to_string(), Value::Integer(4))];
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::F(0.1), Cell::S("x,y".into())]);
        t.push(vec![Cell::U(3), Cell::Empty]);
        (prov, t)
    }

    #[test]
    fn csv_layout() {
        let (prov, t) = sample();
        let s = render(&prov, &t, Format::Csv).unwrap();
        assert_eq!(s, "# T = 100000.0\n# seed = 4\na,b\n1.0000000000000001e-1,\"x,y\"\n3,\n");
    }

    #[test]
    fn csv_reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5] {
            let s = Cell::F(x).csv();
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_layout() {
        let (prov, t) = sample();
        let v: serde_json::Value = serde_json::from_str(&render(&prov, &t, Format::Json).unwrap()).unwrap();
        assert_eq!(v["provenance"]["seed"], 4);
        assert_eq!(v["rows"][0]["a"], 0.1);
        assert!(v["rows"][1]["b"].is_null());
    }
}
