use crate::args::Format;
use crate::error::CliError;
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Settings shared by every command after merging flags and config file.
pub struct Context {
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub tolerance: Option<f64>,
    pub reproducible: bool,
    pub started: Instant,
}

#[derive(Serialize)]
struct Metadata {
    version: &'static str,
    elapsed_seconds: f64,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
    #[serde(skip_serializing_if = "Option::is_none")]
    metadata: Option<Metadata>,
}

impl Context {
    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    pub fn json<T: Serialize>(&self, command: &str, body: &T) -> Result<String, CliError> {
        let metadata = (!self.reproducible).then(|| Metadata {
            version: env!("CARGO_PKG_VERSION"),
            elapsed_seconds: self.started.elapsed().as_secs_f64(),
        });
        let mut text = serde_json::to_string_pretty(&Document { command, body, metadata })?;
        text.push('\n');
        Ok(text)
    }

    pub fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.output {
            Some(path) => write_file(path, text),
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }

    /// Rejects formats a command cannot produce.
    pub fn require_json(&self, command: &str) -> Result<(), CliError> {
        match self.format {
            Some(Format::Csv) => Err(CliError::Domain(format!("`{command}` only writes json"))),
            _ => Ok(()),
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))
}

pub fn csv<R: Serialize>(rows: &[R]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Domain(format!("csv error: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Domain(format!("csv error: {e}")))
}
