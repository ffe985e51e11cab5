//! Plain-text rendering of JSON reports. Matrices (arrays of arrays of
//! scalars) become aligned tables.

use std::fmt::Write;

use serde_json::Value;

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn scalar_row(v: &Value) -> Option<Vec<String>> {
    v.as_array()?.iter().map(scalar).collect()
}

fn table(rows: &[Vec<String>], indent: usize, out: &mut String) {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0))
        .collect();
    for row in rows {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
        let _ = writeln!(out, "{:indent$}{}", "", cells.join("  "));
    }
}

fn value(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if let Some(s) = scalar(x) {
                    let _ = writeln!(out, "{:indent$}{k}: {s}", "");
                } else if let Some(row) = scalar_row(x) {
                    let _ = writeln!(out, "{:indent$}{k}: [{}]", "", row.join(", "));
                } else {
                    let _ = writeln!(out, "{:indent$}{k}:", "");
                    value(x, indent + 2, out);
                }
            }
        }
        Value::Array(items) => {
            let rows: Option<Vec<Vec<String>>> = items.iter().map(scalar_row).collect();
            match rows {
                Some(rows) => table(&rows, indent, out),
                None => {
                    for (i, x) in items.iter().enumerate() {
                        let _ = writeln!(out, "{:indent$}[{i}]", "");
                        value(x, indent + 2, out);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{:indent$}{}", "", scalar(other).unwrap_or_default());
        }
    }
}

pub fn render(report: &Value) -> String {
    let mut out = String::new();
    value(report, 0, &mut out);
    out
}
