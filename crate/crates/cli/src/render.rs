use serde_json::{json, Value};

use crate::args::Format;
use crate::commands::{Output, Table};
use crate::failure::Failure;

pub fn document(out: &Output) -> Value {
    json!({
        "tool": "freeent",
        "version": env!("CARGO_PKG_VERSION"),
        "command": out.command,
        "inputs": out.inputs,
        "outputs": out.outputs,
        "provenance": out.provenance,
    })
}

pub fn render(out: &Output, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&document(out)).expect("documents are plain JSON values");
            s.push('\n');
            Ok(s)
        }
        Format::Text => {
            let mut lines = vec![format!("command: {}", out.command)];
            flatten("", &out.outputs, &mut lines);
            Ok(lines.join("\n") + "\n")
        }
        Format::Csv => match &out.table {
            Some(t) => csv_table(t),
            None => Err(Failure::usage(format!("--format csv is not available for {}", out.command))),
        },
    }
}

fn csv_table(table: &Table) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::usage(format!("csv: {e}"));
    w.write_record(&table.header).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|x| x.to_string())).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Dotted `key: value` lines; long numeric arrays are summarised by length.
fn flatten(prefix: &str, v: &Value, lines: &mut Vec<String>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, lines);
            }
        }
        Value::Array(items) if items.len() > 12 && items.iter().all(Value::is_number) => {
            lines.push(format!("{prefix}: [{} values]", items.len()));
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            lines.push(format!("{prefix}: [{}]", parts.join(", ")));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, lines);
            }
        }
        other => lines.push(format!("{prefix}: {}", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
