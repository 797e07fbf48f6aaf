//! Run manifests written next to every output file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "assouad-kit manifest v1";

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema: &'static str,
    pub command_line: Vec<String>,
    /// SHA-256 of every input file, keyed by the path as given.
    pub input_hashes: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    pub tool_version: &'static str,
    pub wall_time_seconds: f64,
    pub output: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Sidecar path: `out.csv` gets `out.csv.manifest.json`.
pub fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Collects inputs and seeds while a command runs.
pub struct Recorder {
    started: Instant,
    inputs: BTreeMap<String, String>,
    seeds: Vec<u64>,
}

impl Recorder {
    pub fn start() -> Self {
        Self {
            started: Instant::now(),
            inputs: BTreeMap::new(),
            seeds: Vec::new(),
        }
    }

    /// Reads an input file and records its hash.
    pub fn read_input(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.insert(path.display().to_string(), sha256_hex(&bytes));
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    pub fn seed(&mut self, seed: u64) {
        self.seeds.push(seed);
    }

    pub fn finish(self, output: &Path) -> RunManifest {
        RunManifest {
            schema: SCHEMA,
            command_line: std::env::args().collect(),
            input_hashes: self.inputs,
            seeds: self.seeds,
            tool_version: env!("CARGO_PKG_VERSION"),
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
            output: output.display().to_string(),
        }
    }
}

/// Writes `contents` to `path` (or stdout when `None`), plus the manifest
/// sidecar for files.
pub fn emit(path: Option<&Path>, contents: &str, recorder: Recorder) -> Result<()> {
    match path {
        None => match std::io::stdout().lock().write_all(contents.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
        Some(path) => {
            std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
            let manifest = serde_json::to_string_pretty(&recorder.finish(path))?;
            let side = sidecar(path);
            std::fs::write(&side, manifest + "\n").with_context(|| format!("writing {}", side.display()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn sidecar_appends_suffix() {
        assert_eq!(sidecar(Path::new("a/b.svg")), PathBuf::from("a/b.svg.manifest.json"));
    }
}
