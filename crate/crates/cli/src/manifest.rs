//! Run manifests written next to every command's outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};
use spectralforge::io::write_json;
use spectralforge::scenarios::Tolerances;
use spectralforge::Result;

#[derive(Serialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command_line: Vec<String>,
    pub seed: u64,
    pub jobs: usize,
    pub inputs: Vec<FileHash>,
    pub tolerances: Tolerances,
    pub outputs: Vec<FileHash>,
    pub wall_time_s: f64,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn hashes(paths: &[PathBuf]) -> Result<Vec<FileHash>> {
    paths
        .iter()
        .map(|p| {
            Ok(FileHash {
                path: p.display().to_string(),
                sha256: sha256_file(p)?,
            })
        })
        .collect()
}

/// Collects inputs and outputs of one run.
pub struct Run {
    started: Instant,
    pub seed: u64,
    pub jobs: usize,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
}

impl Run {
    pub fn new(seed: u64, jobs: usize) -> Self {
        Run {
            started: Instant::now(),
            seed,
            jobs,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn input(&mut self, p: &Path) {
        self.inputs.push(p.to_path_buf());
    }

    pub fn output(&mut self, p: &Path) {
        self.outputs.push(p.to_path_buf());
    }

    /// Writes the manifest to `path` and returns it.
    pub fn finish(self, path: &Path) -> Result<PathBuf> {
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: crate::version_string(),
            command_line: std::env::args().collect(),
            seed: self.seed,
            jobs: self.jobs,
            inputs: hashes(&self.inputs)?,
            tolerances: Tolerances::default(),
            outputs: hashes(&self.outputs)?,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        write_json(path, &manifest)?;
        Ok(path.to_path_buf())
    }
}

/// `<out>.manifest.json` next to a single output file.
pub fn manifest_path_for(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}
