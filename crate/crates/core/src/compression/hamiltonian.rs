use rand::Rng;
use serde::{Deserialize, Serialize};

use super::spec::{ConstraintKind, ConstraintSpec};
use crate::error::{Error, Result};

/// Diagonal operator over the constraint's variables whose feasible
/// eigenvalues lie strictly below the infeasible ones, split by a small
/// per-qubit tilt `sum_i eps_i sigma^z_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressedHamiltonian {
    /// Variable set; local index bit `k` is `qubits[k]`.
    pub qubits: Vec<usize>,
    pub epsilon: Vec<f64>,
    /// Eigenvalue of each local basis state.
    pub diag: Vec<f64>,
    pub feasible: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HcsAudit {
    pub max_feasible: f64,
    pub min_infeasible: f64,
    pub min_gap: f64,
}

pub const MAX_REDRAWS: usize = 10;
pub const DEGENERACY_GAP: f64 = 1e-12;

/// Untilted value of a local basis state.
fn base_value(c: &ConstraintSpec, s: usize) -> f64 {
    match c.kind {
        ConstraintKind::Range | ConstraintKind::OneHot => {
            let g = c.g_local(s).unwrap();
            ((g - c.lower) * (g - c.upper)) as f64
        }
        ConstraintKind::LowerOnly => -((c.g_local(s).unwrap() - c.lower) as f64),
        ConstraintKind::UpperOnly => (c.g_local(s).unwrap() - c.upper) as f64,
        ConstraintKind::ParityEven | ConstraintKind::ParityOdd | ConstraintKind::General => {
            if c.satisfied_local(s) {
                0.0
            } else {
                1.0
            }
        }
    }
}

impl CompressedHamiltonian {
    pub fn with_epsilon(c: &ConstraintSpec, epsilon: Vec<f64>) -> Result<Self> {
        c.validate()?;
        let k = c.width();
        if epsilon.len() != k {
            return Err(Error::LengthMismatch { expected: k, got: epsilon.len() });
        }
        let diag = (0..1usize << k)
            .map(|s| {
                let tilt: f64 = epsilon
                    .iter()
                    .enumerate()
                    .map(|(i, e)| if (s >> i) & 1 == 1 { *e } else { -*e })
                    .sum();
                base_value(c, s) + tilt
            })
            .collect();
        let feasible = (0..1usize << k).map(|s| c.satisfied_local(s)).collect();
        Ok(Self { qubits: c.qubits.clone(), epsilon, diag, feasible })
    }

    /// Draws `eps_i` uniformly from `[-0.05, 0.05)`, rescaled below `1/(2N)`
    /// when needed, and redraws up to [`MAX_REDRAWS`] times while the
    /// spectrum has a gap below [`DEGENERACY_GAP`] or misorders feasibility.
    pub fn build<R: Rng + ?Sized>(c: &ConstraintSpec, rng: &mut R) -> Result<Self> {
        let k = c.width();
        let bound = 1.0 / (2.0 * k as f64);
        for _ in 0..=MAX_REDRAWS {
            let mut eps: Vec<f64> = (0..k).map(|_| rng.gen_range(-0.05..0.05)).collect();
            let max = eps.iter().fold(0.0f64, |m, e| m.max(e.abs()));
            if max >= bound {
                let s = 0.99 * bound / max;
                eps.iter_mut().for_each(|e| *e *= s);
            }
            let h = Self::with_epsilon(c, eps)?;
            if h.audit().is_ok() {
                return Ok(h);
            }
        }
        Err(Error::DegenerateSpectrum(MAX_REDRAWS))
    }

    pub fn width(&self) -> usize {
        self.qubits.len()
    }

    pub fn local_index(&self, x: usize) -> usize {
        self.qubits.iter().enumerate().filter(|(_, &q)| (x >> q) & 1 == 1).map(|(k, _)| 1 << k).sum()
    }

    /// Eigenvalue of a register basis state.
    pub fn value(&self, x: usize) -> f64 {
        self.diag[self.local_index(x)]
    }

    pub fn n_feasible(&self) -> usize {
        self.feasible.iter().filter(|&&f| f).count()
    }

    /// Mean of the `2^m` smallest eigenvalues, the minimum compression energy
    /// over all unitaries.
    pub fn energy_lower_bound(&self, m: usize) -> f64 {
        let mut d = self.diag.clone();
        d.sort_by(f64::total_cmp);
        let take = (1usize << m).min(d.len());
        d[..take].iter().sum::<f64>() / take as f64
    }

    /// Checks the tilt bound and the feasible/infeasible ordering exhaustively; diagonality holds by construction.
    pub fn audit(&self) -> Result<HcsAudit> {
        let mut max_f = f64::NEG_INFINITY;
        let mut min_if = f64::INFINITY;
        for (v, &f) in self.diag.iter().zip(&self.feasible) {
            if f {
                max_f = max_f.max(*v);
            } else {
                min_if = min_if.min(*v);
            }
        }
        let mut sorted = self.diag.clone();
        sorted.sort_by(f64::total_cmp);
        let min_gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let a = HcsAudit { max_feasible: max_f, min_infeasible: min_if, min_gap };
        if max_f >= min_if || min_gap <= DEGENERACY_GAP {
            return Err(Error::InvalidArgument(format!("compressed-space Hamiltonian fails audit: {a:?}")));
        }
        Ok(a)
    }
}
