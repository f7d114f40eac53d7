use std::io::Write;

use anyhow::{Context, Result};
use serde_json::Value;

use crate::settings::{invalid, Settings};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Result of a subcommand: JSON always, CSV when the data is tabular.
pub struct Artifact {
    pub json: Value,
    pub csv: Option<String>,
    pub default_format: Format,
    pub summary: String,
}

/// Plain CSV builder with `.` decimals and `\n` terminators.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn comment(&mut self, line: &str) {
        self.text.push_str("# ");
        self.text.push_str(line);
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Shortest round-trip rendering of a float.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn emit(command: &str, settings: &Settings, artifact: Artifact) -> Result<()> {
    let format = match settings.text("format") {
        None => artifact.default_format,
        Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some(other) => return invalid(format!("unknown --format {other:?}; use csv or json")),
    };
    let body = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&artifact.json)?;
            s.push('\n');
            s
        }
        Format::Csv => match artifact.csv {
            Some(c) => c,
            None => return invalid(format!("{command} has no CSV form; use --format json")),
        },
    };
    match settings.output() {
        Some(path) => {
            std::fs::write(&path, body)
                .with_context(|| format!("cannot write {}", path.display()))?;
            println!("{command}: {}", artifact.summary);
        }
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            eprintln!("{command}: {}", artifact.summary);
        }
    }
    Ok(())
}
