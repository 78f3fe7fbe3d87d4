//! Report envelope and rendering.
//!
//! Reports carry no timestamp, so identical inputs and seeds give
//! byte-identical output.

use std::io::{ErrorKind, Write};

use qregion_core::{Ensemble, EnsembleKind, Error, Tolerances};
use serde::Serialize;
use serde_json::Value;

use crate::args::{Format, GlobalArgs};

#[derive(Debug, Serialize)]
pub struct InputInfo {
    pub label: String,
    pub kind: EnsembleKind,
    pub dim: usize,
    pub n: usize,
}

impl InputInfo {
    pub fn of(e: &Ensemble) -> Self {
        Self {
            label: e.label().to_string(),
            kind: e.kind(),
            dim: e.dim(),
            n: e.len(),
        }
    }
}

#[derive(Debug, Serialize)]
struct Report<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    input: Option<InputInfo>,
    tolerances: Tolerances,
    seed: u64,
    result: &'a T,
}

pub fn emit<T: Serialize>(g: &GlobalArgs, command: &'static str, input: Option<InputInfo>, result: &T) -> Result<(), Error> {
    let report = Report {
        tool: "qregion",
        version: env!("CARGO_PKG_VERSION"),
        command,
        input,
        tolerances: g.tolerances(),
        seed: g.seed(),
        result,
    };
    match g.format {
        Format::Json => print_stdout(&serde_json::to_string_pretty(&report)?),
        Format::Text => {
            let value = serde_json::to_value(&report)?;
            let mut lines = Vec::new();
            flatten("", &value, &mut lines);
            print_stdout(&lines.join("\n"))
        }
    }
}

/// Prints a line; a reader that closed the pipe early is not an error.
pub fn print_stdout(text: &str) -> Result<(), Error> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// `key: value` lines; nested objects join their keys with dots and arrays
/// stay inline.
fn flatten(prefix: &str, value: &Value, out: &mut Vec<String>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.replace('_', " ")
                } else {
                    format!("{prefix}.{}", k.replace('_', " "))
                };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) if items.iter().any(Value::is_object) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, out);
            }
        }
        Value::String(s) => out.push(format!("{prefix}: {s}")),
        other => out.push(format!("{prefix}: {other}")),
    }
}
