//! Output directories, versioned CSV files and the run manifest.

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: &str = "# hypwave-csv v1";
pub const MANIFEST: &str = "manifest.json";

/// Shortest round-trip decimal form.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Assertion {
        Assertion { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpaceInfo {
    pub label: String,
    pub dim: u32,
    pub homogeneous_dim: f64,
    pub rho: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    pub inversion_constant: f64,
    pub c0_star: f64,
    pub c_beta: f64,
    pub c_beta_calibrated: Option<f64>,
    pub isometry_radius: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config_digest: String,
    pub config: RunConfig,
    pub space: SpaceInfo,
    pub calibration: Calibration,
    pub tol: f64,
    pub seed: u64,
    pub threads: usize,
    pub parallel: bool,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

/// A directory holding the outputs of exactly one run.
pub struct OutputDir {
    path: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    /// Create the directory, removing the files of an earlier run recorded in
    /// its manifest. Any other file present is an error.
    pub fn prepare(path: &Path) -> CliResult<OutputDir> {
        fs::create_dir_all(path)?;
        let manifest = path.join(MANIFEST);
        if manifest.exists() {
            let text = fs::read_to_string(&manifest)?;
            let old: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("unreadable manifest in {}: {e}", path.display())))?;
            if let Some(list) = old.get("outputs").and_then(|v| v.as_array()) {
                for name in list.iter().filter_map(|v| v.as_str()) {
                    let p = path.join(name);
                    if p.parent() == Some(path) && p.is_file() {
                        fs::remove_file(p)?;
                    }
                }
            }
            fs::remove_file(&manifest)?;
        }
        let leftover: Vec<String> = fs::read_dir(path)?.filter_map(|e| e.ok()).map(|e| e.file_name().to_string_lossy().into_owned()).collect();
        if !leftover.is_empty() {
            return Err(CliError::Config(format!(
                "output directory {} contains files from elsewhere: {}",
                path.display(),
                leftover.join(", ")
            )));
        }
        Ok(OutputDir { path: path.to_path_buf(), files: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn write_csv(&mut self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        let mut buf = Vec::new();
        buf.extend_from_slice(CSV_HEADER.as_bytes());
        buf.push(b'\n');
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(columns)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        self.write_bytes(name, &buf)
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        fs::write(self.path.join(name), bytes)?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Write the manifest and confirm the directory holds nothing else.
    pub fn finish(self, manifest: &Manifest) -> CliResult<()> {
        let json = serde_json::to_string_pretty(manifest).map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
        fs::write(self.path.join(MANIFEST), json + "\n")?;
        let mut present: Vec<String> =
            fs::read_dir(&self.path)?.filter_map(|e| e.ok()).map(|e| e.file_name().to_string_lossy().into_owned()).collect();
        present.sort();
        let mut expected = self.files.clone();
        expected.push(MANIFEST.to_string());
        expected.sort();
        if present != expected {
            return Err(CliError::Assertion(vec![format!("orphan outputs in {}", self.path.display())]));
        }
        Ok(())
    }
}

/// Default output directory: `--out`, then the configuration, then
/// `HYPWAVE_OUT`, then `hypwave-out/<command>`.
pub fn resolve_out(config: &RunConfig, command: &str) -> PathBuf {
    if let Some(p) = &config.run.out {
        return p.clone();
    }
    if let Ok(p) = std::env::var("HYPWAVE_OUT") {
        if !p.is_empty() {
            return PathBuf::from(p).join(command);
        }
    }
    PathBuf::from("hypwave-out").join(command)
}
