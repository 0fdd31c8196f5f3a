//! Output directory bookkeeping and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Serialize)]
struct FileEntry {
    path: String,
    sha256: String,
    bytes: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    subcommand: &'a str,
    version: &'a str,
    config_sha256: String,
    files: &'a [FileEntry],
    timings_s: &'a BTreeMap<String, f64>,
    warnings: &'a [String],
}

/// Every file written goes through here so the manifest lists it.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<FileEntry>,
    timings: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    verbose: bool,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl Outputs {
    pub fn create(dir: &Path, verbose: bool) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            timings: BTreeMap::new(),
            warnings: Vec::new(),
            verbose,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("[wingmass] {}", msg.as_ref());
        }
    }

    pub fn warn(&mut self, msg: String) {
        eprintln!("warning: {msg}");
        self.warnings.push(msg);
    }

    /// Runs `f` and records its wall time under `label`.
    pub fn timed<T>(&mut self, label: &str, f: impl FnOnce(&mut Self) -> T) -> T {
        let start = Instant::now();
        let out = f(self);
        *self.timings.entry(label.to_string()).or_insert(0.0) += start.elapsed().as_secs_f64();
        out
    }

    pub fn write_bytes(&mut self, rel: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        self.files.push(FileEntry {
            path: rel.to_string(),
            sha256: hex(&Sha256::digest(bytes)),
            bytes: bytes.len(),
        });
        self.log(format!("wrote {rel}"));
        Ok(())
    }

    pub fn write_csv<T: Serialize>(&mut self, rel: &str, rows: &[T]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Output(e.to_string()))?;
        self.write_bytes(rel, &bytes)
    }

    /// As [`Outputs::write_csv`], but an empty table still gets `header`.
    pub fn write_table<T: Serialize>(
        &mut self,
        rel: &str,
        rows: &[T],
        header: &[&str],
    ) -> Result<(), CliError> {
        if !rows.is_empty() {
            return self.write_csv(rel, rows);
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Output(e.to_string()))?;
        self.write_bytes(rel, &bytes)
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write_bytes(rel, &bytes)
    }

    pub fn finish(self, subcommand: &str, config: &[u8]) -> Result<(), CliError> {
        let manifest = Manifest {
            subcommand,
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: hex(&Sha256::digest(config)),
            files: &self.files,
            timings_s: &self.timings,
            warnings: &self.warnings,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        fs::write(self.dir.join("manifest.json"), bytes)?;
        Ok(())
    }
}
