//! Report emission. JSON is pretty-printed with sorted keys; CSV uses the
//! same float formatting.

use crate::{Format, Global};
use serde_json::Value;
use wbm::io::{fmt_f64, to_json_string};

pub struct Report {
    pub json: Value,
    /// Header and rows for CSV output; commands without a natural table
    /// fall back to `key,value` lines of the scalar fields.
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
}

impl Report {
    pub fn json(json: Value) -> Report {
        Report { json, table: None }
    }

    pub fn with_table(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Report {
        self.table = Some((header.iter().map(|s| s.to_string()).collect(), rows));
        self
    }
}

pub fn cell(v: &Value) -> String {
    let raw = match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => fmt_f64(x),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

fn scalar_rows(v: &Value, prefix: &str, out: &mut Vec<Vec<String>>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                scalar_rows(x, &key, out);
            }
        }
        Value::Array(_) => {}
        _ => out.push(vec![prefix.to_string(), cell(v)]),
    }
}

fn render_csv(r: &Report) -> String {
    let (header, rows) = match &r.table {
        Some((h, rows)) => (h.clone(), rows.clone()),
        None => {
            let mut rows = Vec::new();
            scalar_rows(&r.json, "", &mut rows);
            (vec!["key".to_string(), "value".to_string()], rows)
        }
    };
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn emit(r: &Report, g: &Global) -> anyhow::Result<()> {
    let text = match g.format {
        Format::Json => to_json_string(&r.json),
        Format::Csv => render_csv(r),
    };
    match &g.out {
        Some(p) => std::fs::write(p, text).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
