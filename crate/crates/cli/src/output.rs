use std::io::{self, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde::Deserialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Writes documents to standard output as JSON or CSV rows.
pub struct Emitter {
    format: Format,
    timestamp: bool,
    csv_header: Option<Vec<String>>,
}

impl Emitter {
    pub fn new(format: Format, timestamp: bool) -> Self {
        Emitter {
            format,
            timestamp,
            csv_header: None,
        }
    }

    fn stamped(&self, v: &Value) -> Value {
        let mut v = v.clone();
        if let (true, Value::Object(m)) = (self.timestamp, &mut v) {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs());
            m.insert("timestamp".into(), Value::from(secs));
        }
        v
    }

    /// A complete single document.
    pub fn document(&mut self, v: &Value) -> anyhow::Result<()> {
        let v = self.stamped(v);
        match self.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&v)?;
                s.push('\n');
                io::stdout().write_all(s.as_bytes())?;
            }
            Format::Csv => {
                let rows = table_rows(&v);
                self.write_csv(&rows, true)?;
            }
        }
        Ok(())
    }

    /// One line of a record stream.
    pub fn record(&mut self, v: &Value) -> anyhow::Result<()> {
        match self.format {
            Format::Json => {
                let mut s = serde_json::to_string(v)?;
                s.push('\n');
                io::stdout().write_all(s.as_bytes())?;
            }
            Format::Csv => self.write_csv(&[flatten(v)], false)?,
        }
        Ok(())
    }

    /// Closing line of a record stream. In CSV mode it goes to standard
    /// error so the rows stay rectangular.
    pub fn summary(&mut self, v: &Value) -> anyhow::Result<()> {
        let v = self.stamped(v);
        let s = serde_json::to_string(&v)?;
        match self.format {
            Format::Json => println!("{s}"),
            Format::Csv => eprintln!("{s}"),
        }
        Ok(())
    }

    fn write_csv(&mut self, rows: &[Vec<(String, String)>], fresh: bool) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_writer(io::stdout());
        if fresh {
            self.csv_header = None;
        }
        for row in rows {
            let header: Vec<String> = row.iter().map(|(k, _)| k.clone()).collect();
            if self.csv_header.as_ref() != Some(&header) {
                w.write_record(&header)?;
                self.csv_header = Some(header);
            }
            w.write_record(row.iter().map(|(_, v)| v))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        // Rational functions carry a readable form.
        Value::Object(m) if m.get("text").is_some_and(Value::is_string) => cell(&m["text"]),
        other => other.to_string(),
    }
}

fn is_plain_object(v: &Value) -> bool {
    v.as_object().is_some_and(|m| !m.contains_key("text"))
}

/// Nested plain objects become dotted column names.
fn flatten(v: &Value) -> Vec<(String, String)> {
    fn go(prefix: &str, m: &Map<String, Value>, out: &mut Vec<(String, String)>) {
        for (k, x) in m {
            let key = if prefix.is_empty() {
                k.clone()
            } else {
                format!("{prefix}.{k}")
            };
            match x {
                Value::Object(inner) if is_plain_object(x) => go(&key, inner, out),
                _ => out.push((key, cell(x))),
            }
        }
    }
    match v {
        Value::Object(m) => {
            let mut out = Vec::new();
            go("", m, &mut out);
            out
        }
        other => vec![("value".into(), cell(other))],
    }
}

/// Rows for a document: the first array of objects becomes one row per
/// element, with the document's scalar fields repeated; otherwise one row.
fn table_rows(v: &Value) -> Vec<Vec<(String, String)>> {
    let Value::Object(m) = v else {
        return vec![flatten(v)];
    };
    let table = m.iter().find_map(|(k, x)| match x {
        Value::Array(a) if !a.is_empty() && a.iter().all(Value::is_object) => Some((k, a)),
        _ => None,
    });
    let Some((key, items)) = table else {
        return vec![flatten(v)];
    };
    let shared: Map<String, Value> = m
        .iter()
        .filter(|(k, x)| *k != key && !x.is_array())
        .map(|(k, x)| (k.clone(), x.clone()))
        .collect();
    items
        .iter()
        .map(|item| {
            let mut row = flatten(&Value::Object(shared.clone()));
            row.extend(
                flatten(item)
                    .into_iter()
                    .map(|(k, x)| (format!("{key}.{k}"), x)),
            );
            row
        })
        .collect()
}
