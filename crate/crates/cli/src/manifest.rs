//! Run manifests: what went in, with which parameters, and what came out.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use embeval_core::digest::file_sha256_hex;
use embeval_core::io::write_atomic;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub inputs: Vec<InputDigest>,
    pub params: BTreeMap<String, Value>,
    /// Counts reported by the run, such as skipped pairs.
    pub summary: BTreeMap<String, Value>,
    pub outputs: Vec<String>,
    pub duration_ms: u64,
    #[serde(skip)]
    started: Option<Instant>,
}

pub fn utf8_path(path: &Path) -> CliResult<&str> {
    path.to_str()
        .ok_or_else(|| CliError::Usage(format!("path is not valid UTF-8: {}", path.display())))
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: Vec::new(),
            params: BTreeMap::new(),
            summary: BTreeMap::new(),
            outputs: Vec::new(),
            duration_ms: 0,
            started: Some(Instant::now()),
        }
    }

    /// Hashes `path` and records it; returns the digest.
    pub fn add_input(&mut self, path: &Path) -> CliResult<String> {
        let sha256 = file_sha256_hex(path)?;
        self.inputs.push(InputDigest {
            path: utf8_path(path)?.to_string(),
            sha256: sha256.clone(),
        });
        Ok(sha256)
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn summary(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn to_json_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("manifest values are plain JSON");
        s.push('\n');
        s
    }

    /// Stamps the duration and writes `<dir>/<command>.manifest.json`.
    pub fn finish(mut self, dir: &Path) -> CliResult<()> {
        if let Some(t) = self.started {
            self.duration_ms = t.elapsed().as_millis() as u64;
        }
        let path = dir.join(format!("{}.manifest.json", self.command));
        write_atomic(&path, self.to_json_line().as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_json_record_with_digests() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.txt");
        std::fs::write(&input, "abc").unwrap();
        let mut m = RunManifest::new("coverage");
        let d = m.add_input(&input).unwrap();
        assert_eq!(d, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        m.param("s", vec![0.9, 1.0]);
        m.outputs.push("coverage.csv".into());
        m.finish(dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("coverage.manifest.json")).unwrap();
        assert_eq!(text.lines().count(), 1);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["command"], "coverage");
        assert_eq!(v["inputs"][0]["sha256"], d);
        assert_eq!(v["params"]["s"][1], 1.0);
    }
}
