//! Atomic output files and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

/// Everything needed to re-run a command: no timestamps, no host details.
#[derive(Serialize)]
pub struct RunManifest {
    command: String,
    version: &'static str,
    params: serde_json::Value,
    seeds: Vec<u64>,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, params: &impl Serialize) -> Result<Self> {
        Ok(RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            params: serde_json::to_value(params)?,
            seeds: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    pub fn seed(&mut self, seed: u64) {
        self.seeds.push(seed);
    }

    /// Records the SHA-256 of an input file.
    pub fn input(&mut self, path: &Path) -> Result<()> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(InputDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) });
        Ok(())
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Writes via a temporary file in the target directory and a rename.
fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// A set of payloads written together, each followed by its sidecar.
pub struct Outputs {
    files: Vec<(PathBuf, String)>,
    stdout: Vec<String>,
}

impl Outputs {
    pub fn new() -> Self {
        Outputs { files: Vec::new(), stdout: Vec::new() }
    }

    /// Queues `text` for `path`, or for stdout when `path` is `None`.
    pub fn add(&mut self, path: Option<&Path>, mut text: String) {
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match path {
            Some(p) => self.files.push((p.to_path_buf(), text)),
            None => self.stdout.push(text),
        }
    }

    pub fn finish(self, mut manifest: RunManifest) -> Result<()> {
        manifest.outputs = self.files.iter().map(|(p, _)| p.display().to_string()).collect();
        let sidecar = serde_json::to_string_pretty(&manifest)? + "\n";
        for (path, text) in &self.files {
            write_atomic(path, text)?;
            write_atomic(&manifest_path(path), &sidecar)?;
        }
        for text in self.stdout {
            print!("{text}");
        }
        Ok(())
    }
}
