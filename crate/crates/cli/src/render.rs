//! Text rendering of result tables.

use gqlengine::{ResultTable, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Padded columns; timestamps as DD/MM/YYYY HH:MM:SS, null as `-`.
    #[default]
    Aligned,
    /// Tab-separated; ISO-8601 timestamps, null as an empty field.
    Tsv,
}

fn aligned_cell(v: &Value) -> String {
    match v {
        Value::Null => "-".to_string(),
        Value::Timestamp(t) => t.format("%d/%m/%Y %H:%M:%S").to_string(),
        Value::Array(items) => {
            let inner: Vec<String> = items.iter().map(aligned_cell).collect();
            format!("[{}]", inner.join(", "))
        }
        other => other.to_string(),
    }
}

fn tsv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Array(items) => {
            let inner: Vec<String> = items.iter().map(tsv_cell).collect();
            format!("[{}]", inner.join(", "))
        }
        other => other.to_iso_string(),
    }
    .replace(['\t', '\n'], " ")
}

/// Header line plus one line per row, each ending in a newline.
pub fn render_table(table: &ResultTable, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Tsv => {
            out.push_str(&table.columns.join("\t"));
            out.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(tsv_cell).collect();
                out.push_str(&cells.join("\t"));
                out.push('\n');
            }
        }
        Format::Aligned => {
            let cells: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|r| r.iter().map(aligned_cell).collect())
                .collect();
            let mut widths: Vec<usize> = table.columns.iter().map(|c| c.chars().count()).collect();
            for row in &cells {
                for (w, c) in widths.iter_mut().zip(row) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let mut line = |items: &[String]| {
                let mut s = String::new();
                for (i, (item, w)) in items.iter().zip(&widths).enumerate() {
                    if i > 0 {
                        s.push_str("  ");
                    }
                    s.push_str(item);
                    s.extend(std::iter::repeat_n(' ', w - item.chars().count()));
                }
                out.push_str(s.trim_end());
                out.push('\n');
            };
            line(&table.columns);
            for row in &cells {
                line(row);
            }
        }
    }
    out
}
