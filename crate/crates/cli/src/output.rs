//! Report assembly and output: JSON/CSV rendering and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Mirror of the run configuration, embedded in every JSON report so runs
/// are reproducible from their outputs alone.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub input: Option<PathBuf>,
    pub mean: Option<f64>,
    pub t_grid: Vec<f64>,
    pub c: Vec<f64>,
    pub seed: u64,
    pub samples: usize,
    pub format: String,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn name(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Serializes `rows` (one struct per record) to CSV with headers.
pub fn rows_to_csv<S: Serialize>(rows: &[S]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().context("finishing csv")?;
    Ok(String::from_utf8(bytes)?)
}

/// CSV from an explicit header and preformatted records (for tables whose
/// column set depends on the run, like the comparison command).
pub fn table_to_csv(header: &[String], records: &[Vec<String>]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for record in records {
        writer.write_record(record)?;
    }
    let bytes = writer.into_inner().context("finishing csv")?;
    Ok(String::from_utf8(bytes)?)
}

/// Formats an f64 exactly as serde_json does (shortest round-trip form),
/// keeping CSV and JSON value texts identical.
pub fn fmt_f64(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}

/// Writes the report to `output`, atomically (temp file in the same
/// directory, then rename) when a path is given; stdout otherwise.
pub fn write_output(output: Option<&Path>, content: &str) -> Result<()> {
    match output {
        None => {
            println!("{content}");
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                _ => PathBuf::from("."),
            };
            fs::create_dir_all(&dir)
                .with_context(|| format!("creating output directory {}", dir.display()))?;
            let mut tmp = tempfile::NamedTempFile::new_in(&dir)
                .with_context(|| format!("creating temp file in {}", dir.display()))?;
            tmp.write_all(content.as_bytes())?;
            tmp.write_all(b"\n")?;
            tmp.persist(path)
                .with_context(|| format!("renaming into {}", path.display()))?;
            log::info!("wrote {}", path.display());
            Ok(())
        }
    }
}
