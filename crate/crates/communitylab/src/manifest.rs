//! Run manifests: a JSON record of what a command did, with enough
//! detail (parameters, seeds, file digests) to reproduce the outputs
//! byte for byte.

use crate::error::Result;
use crate::{Frac, SFrac};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::io::Read;
use std::path::Path;
use std::time::Instant;

/// Accumulates one run's metadata; `finish` produces the JSON document.
#[derive(Debug)]
pub struct RunManifest {
    subcommand: String,
    params: Map<String, Value>,
    seed: Option<u64>,
    inputs: Vec<Value>,
    outputs: Vec<Value>,
    started: Instant,
}

impl RunManifest {
    pub fn new(subcommand: impl Into<String>) -> Self {
        RunManifest {
            subcommand: subcommand.into(),
            params: Map::new(),
            seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    /// Digest a file this run read.
    pub fn record_input(&mut self, path: &Path) -> Result<()> {
        let digest = sha256_hex(path)?;
        self.inputs.push(json!({
            "path": path.display().to_string(),
            "sha256": digest,
        }));
        Ok(())
    }

    /// Digest a file this run wrote; call after the write completes.
    pub fn record_output(&mut self, path: &Path) -> Result<()> {
        let digest = sha256_hex(path)?;
        self.outputs.push(json!({
            "path": path.display().to_string(),
            "sha256": digest,
        }));
        Ok(())
    }

    /// The complete manifest document.
    pub fn finish(self, summary: Value) -> Value {
        json!({
            "subcommand": self.subcommand,
            "params": Value::Object(self.params),
            "seed": self.seed,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "wall_ms": self.started.elapsed().as_millis() as u64,
            "summary": summary,
        })
    }

    /// Write the manifest JSON next to the run's outputs.
    pub fn write(self, path: &Path, summary: Value) -> Result<()> {
        let doc = self.finish(summary);
        std::fs::write(path, format!("{:#}\n", doc))?;
        Ok(())
    }
}

/// Hex SHA-256 of a file's contents.
pub fn sha256_hex(path: &Path) -> Result<String> {
    let mut file = std::fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 8192];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hasher
        .finalize()
        .iter()
        .map(|b| format!("{:02x}", b))
        .collect())
}

/// Exact rational as JSON, with a decimal approximation alongside for
/// readability. The approximation is never used for computation.
pub fn frac_json(f: Frac) -> Value {
    json!({
        "num": *f.numer(),
        "den": *f.denom(),
        "approx": *f.numer() as f64 / *f.denom() as f64,
    })
}

/// Signed variant of [`frac_json`].
pub fn sfrac_json(f: SFrac) -> Value {
    json!({
        "num": *f.numer(),
        "den": *f.denom(),
        "approx": *f.numer() as f64 / *f.denom() as f64,
    })
}
