//! Batch driver for the heatindex verification suites.

pub mod config;
pub mod suites;

use std::fs;
use std::path::{Path, PathBuf};

use heatindex_core::VerificationReport;

pub use config::{RunConfig, Suite};
pub use suites::run_suite;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("serializing report: {0}")]
    Json(#[from] serde_json::Error),
}

/// Process exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const CHECK_FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
}

/// Writes `report.json` and one CSV per table into `dir`, returning the paths.
pub fn emit_report(report: &VerificationReport, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_owned(),
        source,
    })?;
    let mut written = Vec::new();
    let json_path = dir.join("report.json");
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    fs::write(&json_path, json).map_err(|source| CliError::Io {
        path: json_path.clone(),
        source,
    })?;
    written.push(json_path);
    for table in &report.tables {
        let path = dir.join(format!("{}.csv", table.name));
        let csv_err = |source| CliError::Csv {
            path: path.clone(),
            source,
        };
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(&table.header).map_err(csv_err)?;
        for row in &table.rows {
            w.write_record(row.iter().map(|v| format!("{v:e}")))
                .map_err(csv_err)?;
        }
        w.flush().map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
