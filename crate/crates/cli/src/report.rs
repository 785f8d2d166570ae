//! Report emission: one JSON document plus optional CSV tables.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::args::Arithmetic;
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Budgets {
    pub intersection_depth: u32,
    pub pairs: usize,
    pub search_seeds: usize,
}

/// Everything that determines a run; embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<String>,
    pub radii: Vec<f64>,
    pub seed: u64,
    pub budgets: Budgets,
    pub arithmetic: Arithmetic,
}

#[derive(Serialize)]
struct Document<'a, T> {
    schema: u32,
    config: &'a RunConfig,
    result: &'a T,
}

pub struct Output {
    pub out: Option<PathBuf>,
}

impl Output {
    fn table_path(out: &Path, name: &str) -> PathBuf {
        let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
        out.with_file_name(format!("{stem}.{name}.csv"))
    }

    fn write(path: &Path, text: &str) -> Result<(), CliError> {
        std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    /// Writes the report (stdout without `--out`) and, with `--out`, the tables.
    pub fn emit<T: Serialize>(&self, config: &RunConfig, result: &T, tables: &[(&str, String)], summary: &str) -> Result<(), CliError> {
        let doc = Document { schema: 1, config, result };
        let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Data(e.to_string()))? + "\n";
        match &self.out {
            Some(path) => {
                Self::write(path, &text)?;
                for (name, csv) in tables {
                    Self::write(&Self::table_path(path, name), csv)?;
                }
                println!("{summary}");
            }
            None => print!("{text}"),
        }
        Ok(())
    }

    /// Writes a spec file verbatim (stdout without `--out`).
    pub fn emit_file<T: Serialize>(&self, value: &T) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))? + "\n";
        match &self.out {
            Some(path) => Self::write(path, &text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}
