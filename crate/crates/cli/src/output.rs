use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Writes `rows` as a CSV table with a header taken from the row type.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

/// Hex SHA-256 of the resolved config in its JSON form.
pub fn config_hash<C: Serialize>(config: &C) -> Result<String> {
    let text = serde_json::to_string(config)?;
    Ok(Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Serialize)]
pub struct Sidecar<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config_sha256: String,
    pub config_path: Option<String>,
    pub seed: u64,
    pub instance_seeds: Vec<u64>,
    pub jobs: usize,
    pub outputs: Vec<String>,
    pub wall_seconds: f64,
    pub timings: BTreeMap<String, f64>,
    pub config: &'a C,
}

impl<'a, C: Serialize> Sidecar<'a, C> {
    pub fn new(command: &'a str, common: &crate::Common, seed: u64, config: &'a C) -> Result<Self> {
        Ok(Self {
            tool: "csqaoa",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config_sha256: config_hash(config)?,
            config_path: common.config.as_ref().map(|p| p.display().to_string()),
            seed,
            instance_seeds: Vec::new(),
            jobs: common.jobs.unwrap_or(1),
            outputs: Vec::new(),
            wall_seconds: 0.0,
            timings: BTreeMap::new(),
            config,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")
            .with_context(|| format!("writing {}", path.display()))
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}
