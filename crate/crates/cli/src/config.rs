use std::path::{Path, PathBuf};

use csqaoa::compression::{AnsatzKind, CTrainConfig, ConstraintKind, DTrainConfig};
use csqaoa::experiment::{FluctuationConfig, NoiseConfig, Problem, SuiteConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{Common, Failure};

/// Parses the config file, or an empty document when no file is given.
pub fn load<T: DeserializeOwned + Serialize>(common: &Common) -> Result<T, Failure> {
    let text = match &common.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let cfg: T = toml::from_str(&text).map_err(|e| Failure::Config(e.to_string()))?;
    // serde ignores deny_unknown_fields inside internally tagged enums, so
    // compare the raw keys against what the parsed value serializes back to.
    let raw: toml::Value = toml::from_str(&text).map_err(|e| Failure::Config(e.to_string()))?;
    let parsed = toml::Value::try_from(&cfg).map_err(|e| Failure::Config(e.to_string()))?;
    unknown_keys(&raw, &parsed, "")
        .map_or(Ok(cfg), |key| Err(Failure::Config(format!("unknown field `{key}`"))))
}

fn unknown_keys(raw: &toml::Value, parsed: &toml::Value, path: &str) -> Option<String> {
    match (raw, parsed) {
        (toml::Value::Table(r), toml::Value::Table(p)) => r.iter().find_map(|(k, v)| {
            let here = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
            match p.get(k) {
                Some(pv) => unknown_keys(v, pv, &here),
                None => Some(here),
            }
        }),
        (toml::Value::Array(r), toml::Value::Array(p)) => {
            r.iter().zip(p).enumerate().find_map(|(i, (a, b))| unknown_keys(a, b, &format!("{path}[{i}]")))
        }
        _ => None,
    }
}

pub fn resolve_seed(common: &Common, file: Option<u64>) -> u64 {
    common.seed.or(file).unwrap_or(0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub problem: Problem,
    /// Problem sizes to sweep; empty runs the size in `problem`.
    #[serde(default)]
    pub sizes: Vec<usize>,
    /// Layer counts to sweep; empty runs `suite.p`.
    #[serde(default)]
    pub layers: Vec<usize>,
    #[serde(default)]
    pub suite: SuiteConfig,
    /// Optional energy-fluctuation study on Max-k cut ensembles.
    pub fluctuation: Option<FluctuationConfig>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseFile {
    pub seed: Option<u64>,
    #[serde(default)]
    pub noise: NoiseConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompressorRequest {
    pub kind: ConstraintKind,
    /// Integer coefficients; the register width is their count.
    pub a: Vec<i64>,
    pub lower: Option<i64>,
    pub upper: Option<i64>,
    pub ansatz: AnsatzKind,
    /// Target width; defaults to `ceil(log2 |F|)`.
    pub m: Option<usize>,
    /// Training seeds per request.
    #[serde(default = "one")]
    pub samples: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainFile {
    pub seed: Option<u64>,
    #[serde(default)]
    pub compressor: Vec<CompressorRequest>,
    #[serde(default)]
    pub d_ansatz: DTrainConfig,
    #[serde(default)]
    pub c_ansatz: CTrainConfig,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    /// Result directories to merge; defaults to the output directory.
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenFile {
    pub seed: Option<u64>,
    pub problem: Problem,
    #[serde(default = "ten")]
    pub count: usize,
}

fn ten() -> usize {
    10
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceFormat {
    /// `{vertices, edges}` JSON; needs `k`.
    Graph,
    /// `{f, d}` JSON.
    Qap,
    /// Benchmark text file; needs `items`.
    Qkp,
    /// Serialized instance JSON as written by `gen-instances`.
    Instance,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub path: PathBuf,
    pub format: InstanceFormat,
    pub k: Option<usize>,
    pub items: Option<usize>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleFile {
    pub seed: Option<u64>,
    /// Generated ensemble to solve.
    pub problem: Option<Problem>,
    #[serde(default = "ten")]
    pub count: usize,
    #[serde(default)]
    pub instance: Vec<InstanceFile>,
}

/// Resolves `path` against the config file's directory.
pub fn relative_to_config(common: &Common, path: &Path) -> PathBuf {
    match common.config.as_ref().and_then(|c| c.parent()) {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}
