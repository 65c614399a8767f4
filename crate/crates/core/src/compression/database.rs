use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ansatz::{ansatz_compressor, AnsatzKind, Attempt, CAnsatz, DAnsatz, Trained};
use super::compressor::Compressor;
use super::energy::pulled_back;
use super::spec::{ConstraintFunction, ConstraintKind, ConstraintSpec};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintRecord {
    pub kind: ConstraintKind,
    pub a: Vec<i64>,
    pub lower: Option<i64>,
    pub upper: Option<i64>,
}

/// One trained compressor for a constraint on its own `n`-qubit register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressorRecord {
    pub constraint: ConstraintRecord,
    pub n: usize,
    pub m: usize,
    pub layers: usize,
    pub ansatz: AnsatzKind,
    pub params: Vec<f64>,
    /// Most likely original basis state of each compressed basis state.
    pub label: Vec<usize>,
    pub p_sur: f64,
    pub energy: f64,
    pub fs_ratio_original: f64,
    pub fs_ratio_compressed: f64,
    pub passed: bool,
    pub attempts: Vec<Attempt>,
    pub seed: u64,
}

impl ConstraintRecord {
    pub fn of(c: &ConstraintSpec) -> Result<Self> {
        let a = match &c.function {
            ConstraintFunction::Linear { coeffs, constant: 0 } => coeffs.clone(),
            _ => return Err(Error::InvalidArgument("only linear constraints without offset are recorded".into())),
        };
        Ok(Self {
            kind: c.kind,
            a,
            lower: (c.lower != i64::MIN).then_some(c.lower),
            upper: (c.upper != i64::MAX).then_some(c.upper),
        })
    }

    /// The constraint on qubits `0..n`.
    pub fn to_spec(&self) -> ConstraintSpec {
        let q: Vec<usize> = (0..self.a.len()).collect();
        let mut c = ConstraintSpec::range(&q, self.a.clone(), self.lower.unwrap_or(i64::MIN), self.upper.unwrap_or(i64::MAX));
        c.kind = self.kind;
        c
    }
}

fn most_likely_label(u: &Compressor) -> Result<Vec<usize>> {
    (0..1usize << u.m())
        .map(|q| {
            let d = pulled_back(u, q)?;
            Ok(d.iter().max_by(|a, b| a.1.total_cmp(&b.1)).map(|p| p.0).unwrap_or(0))
        })
        .collect()
}

impl CompressorRecord {
    /// Record for a compressor trained from the identity on the constraint's register.
    pub fn from_trained(c: &ConstraintSpec, t: &Trained, seed: u64) -> Result<Self> {
        let n = t.compressor.n_qubits();
        let n_feasible = c.feasible_local().len();
        Ok(Self {
            constraint: ConstraintRecord::of(c)?,
            n,
            m: t.compressor.m(),
            layers: t.layers,
            ansatz: t.ansatz,
            params: t.params.clone(),
            label: most_likely_label(&t.compressor)?,
            p_sur: t.p_sur,
            energy: t.energy,
            fs_ratio_original: n_feasible as f64 / (1u64 << n) as f64,
            fs_ratio_compressed: n_feasible as f64 / (1u64 << t.compressor.m()) as f64,
            passed: t.passed,
            attempts: t.attempts.clone(),
            seed,
        })
    }

    /// Rebuilds the compressor on qubits `0..n`.
    pub fn compressor(&self) -> Result<Compressor> {
        let base = Compressor::identity(self.n);
        let udag = match self.ansatz {
            AnsatzKind::Continuous => CAnsatz { n: self.n, m: self.m, layers: self.layers }.circuit(&self.params)?,
            AnsatzKind::Discrete => {
                let bits: Vec<bool> = self.params.iter().map(|&p| p != 0.0).collect();
                DAnsatz { n: self.n, m: self.m, layers: self.layers }.decode(&bits)?
            }
        };
        ansatz_compressor(&base, &udag, self.m)
    }

    /// Whether this record compresses the given constraint.
    pub fn matches(&self, c: &ConstraintSpec) -> bool {
        ConstraintRecord::of(c).is_ok_and(|r| r == self.constraint)
    }
}

pub fn save_database(path: &Path, records: &[CompressorRecord]) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(records)?)?;
    Ok(())
}

pub fn load_database(path: &Path) -> Result<Vec<CompressorRecord>> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
