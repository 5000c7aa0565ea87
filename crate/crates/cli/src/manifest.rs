//! Run manifests embedded in every report.

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// A file read for this run, kept in memory so the bytes that are hashed are
/// the bytes that are parsed.
pub struct InputFile {
    pub path: String,
    pub bytes: Vec<u8>,
}

impl InputFile {
    pub fn read(path: &Path) -> std::io::Result<Self> {
        Ok(Self {
            path: path.display().to_string(),
            bytes: std::fs::read(path)?,
        })
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(&self.bytes))
    }
}

pub struct RunManifest {
    command: String,
    inputs: Vec<Value>,
    config: Value,
    seed: Option<u64>,
    clock: Option<(SystemTime, Instant)>,
}

impl RunManifest {
    /// Wall-clock fields stay null unless `record_time` is set, so reruns
    /// produce identical bytes.
    pub fn new(command: &str, config: Value, seed: Option<u64>, record_time: bool) -> Self {
        Self {
            command: command.to_owned(),
            inputs: Vec::new(),
            config,
            seed,
            clock: record_time.then(|| (SystemTime::now(), Instant::now())),
        }
    }

    pub fn add_input(&mut self, role: &str, f: &InputFile) {
        self.inputs.push(json!({ "role": role, "path": f.path, "sha256": f.sha256() }));
    }

    pub fn to_value(&self) -> Value {
        let wall_clock = match self.clock {
            Some((start, t0)) => json!({
                "started_unix_seconds": start.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
                "elapsed_seconds": t0.elapsed().as_secs_f64(),
            }),
            None => Value::Null,
        };
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "config": self.config,
            "seed": self.seed,
            "tool": { "name": "netfiber", "version": env!("CARGO_PKG_VERSION") },
            "wall_clock": wall_clock,
        })
    }
}
