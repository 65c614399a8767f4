use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::LinearConstraint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    OneHot,
    ParityEven,
    ParityOdd,
    Range,
    LowerOnly,
    UpperOnly,
    General,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ConstraintFunction {
    /// `g = sum_k a_k x_k + constant`.
    Linear { coeffs: Vec<i64>, constant: i64 },
    /// Feasibility indicator over the local index of the variable set.
    Table { feasible: Vec<bool> },
}

/// A single constraint `lower <= g(x_V) <= upper` over the variable set `V`.
///
/// Local index bit `k` is the value of `qubits[k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSpec {
    pub kind: ConstraintKind,
    pub qubits: Vec<usize>,
    pub function: ConstraintFunction,
    pub lower: i64,
    pub upper: i64,
}

impl ConstraintSpec {
    fn linear(kind: ConstraintKind, qubits: &[usize], coeffs: Vec<i64>, lower: i64, upper: i64) -> Self {
        Self {
            kind,
            qubits: qubits.to_vec(),
            function: ConstraintFunction::Linear { coeffs, constant: 0 },
            lower,
            upper,
        }
    }

    pub fn one_hot(qubits: &[usize]) -> Self {
        Self::linear(ConstraintKind::OneHot, qubits, vec![1; qubits.len()], 1, 1)
    }

    pub fn parity(qubits: &[usize], odd: bool) -> Self {
        let kind = if odd { ConstraintKind::ParityOdd } else { ConstraintKind::ParityEven };
        let bound = odd as i64;
        Self::linear(kind, qubits, vec![1; qubits.len()], bound, bound)
    }

    /// `lower <= sum_k a_k x_k <= upper`.
    pub fn range(qubits: &[usize], coeffs: Vec<i64>, lower: i64, upper: i64) -> Self {
        Self::linear(ConstraintKind::Range, qubits, coeffs, lower, upper)
    }

    /// `0 <= sum x_k <= upper`.
    pub fn at_most(qubits: &[usize], upper: i64) -> Self {
        Self::range(qubits, vec![1; qubits.len()], 0, upper)
    }

    /// `sum_k a_k x_k <= upper`.
    pub fn upper_only(qubits: &[usize], coeffs: Vec<i64>, upper: i64) -> Self {
        Self::linear(ConstraintKind::UpperOnly, qubits, coeffs, i64::MIN, upper)
    }

    /// `sum_k a_k x_k >= lower`.
    pub fn lower_only(qubits: &[usize], coeffs: Vec<i64>, lower: i64) -> Self {
        Self::linear(ConstraintKind::LowerOnly, qubits, coeffs, lower, i64::MAX)
    }

    pub fn general(qubits: &[usize], feasible: Vec<bool>) -> Self {
        Self {
            kind: ConstraintKind::General,
            qubits: qubits.to_vec(),
            function: ConstraintFunction::Table { feasible },
            lower: 0,
            upper: 0,
        }
    }

    pub fn from_linear(c: &LinearConstraint) -> Self {
        let qubits = c.qubits();
        let coeffs = c.terms.iter().map(|t| t.1).collect();
        let all_unit = c.terms.iter().all(|t| t.1 == 1);
        let kind = if all_unit && c.constant == 0 && c.lower == 1 && c.upper == 1 {
            ConstraintKind::OneHot
        } else {
            ConstraintKind::Range
        };
        Self {
            kind,
            qubits,
            function: ConstraintFunction::Linear { coeffs, constant: c.constant },
            lower: c.lower,
            upper: c.upper,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.qubits.len();
        if k == 0 {
            return Err(Error::InvalidArgument("constraint over an empty variable set".into()));
        }
        for (i, q) in self.qubits.iter().enumerate() {
            if self.qubits[..i].contains(q) {
                return Err(Error::DuplicateQubit(*q));
            }
        }
        if self.lower > self.upper {
            return Err(Error::InvalidArgument(format!("lower bound {} > upper bound {}", self.lower, self.upper)));
        }
        match &self.function {
            ConstraintFunction::Linear { coeffs, .. } => {
                if coeffs.len() != k {
                    return Err(Error::LengthMismatch { expected: k, got: coeffs.len() });
                }
                if self.kind == ConstraintKind::OneHot
                    && (self.lower != 1 || self.upper != 1 || coeffs.iter().any(|&a| a != 1))
                {
                    return Err(Error::InvalidArgument("one-hot constraint must be sum x = 1".into()));
                }
            }
            ConstraintFunction::Table { feasible } => {
                if feasible.len() != 1 << k {
                    return Err(Error::LengthMismatch { expected: 1 << k, got: feasible.len() });
                }
                if self.kind != ConstraintKind::General {
                    return Err(Error::InvalidArgument("tabulated constraints must have general kind".into()));
                }
            }
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.qubits.len()
    }

    /// `g` at a local index, for linear constraints.
    pub fn g_local(&self, s: usize) -> Option<i64> {
        match &self.function {
            ConstraintFunction::Linear { coeffs, constant } => Some(
                constant + coeffs.iter().enumerate().filter(|(k, _)| (s >> k) & 1 == 1).map(|(_, a)| a).sum::<i64>(),
            ),
            ConstraintFunction::Table { .. } => None,
        }
    }

    pub fn satisfied_local(&self, s: usize) -> bool {
        match (&self.function, self.kind) {
            (ConstraintFunction::Table { feasible }, _) => feasible[s],
            (_, ConstraintKind::ParityEven) => self.g_local(s).unwrap().rem_euclid(2) == 0,
            (_, ConstraintKind::ParityOdd) => self.g_local(s).unwrap().rem_euclid(2) == 1,
            _ => (self.lower..=self.upper).contains(&self.g_local(s).unwrap()),
        }
    }

    /// Local index of a register index.
    pub fn local_index(&self, x: usize) -> usize {
        self.qubits.iter().enumerate().filter(|(_, &q)| (x >> q) & 1 == 1).map(|(k, _)| 1 << k).sum()
    }

    pub fn satisfied(&self, x: usize) -> bool {
        self.satisfied_local(self.local_index(x))
    }

    /// Feasible local indices.
    pub fn feasible_local(&self) -> Vec<usize> {
        (0..1usize << self.width()).filter(|&s| self.satisfied_local(s)).collect()
    }

    pub fn fs_ratio(&self) -> f64 {
        self.feasible_local().len() as f64 / (1u64 << self.width()) as f64
    }

    /// Same constraint with variables relabelled `q -> map[q]`.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> Self {
        let mut c = self.clone();
        c.qubits = self.qubits.iter().map(|&q| map(q)).collect();
        c
    }
}

/// Smallest `m` with `2^m >= count` (and `m >= 1`).
pub fn width_for(count: usize) -> usize {
    let mut m = 0;
    while (1usize << m) < count {
        m += 1;
    }
    m.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_and_feasibility() {
        let oh = ConstraintSpec::one_hot(&[0, 1, 2]);
        oh.validate().unwrap();
        assert_eq!(oh.feasible_local(), vec![1, 2, 4]);
        let am = ConstraintSpec::at_most(&[0, 1, 2], 1);
        assert_eq!(am.feasible_local(), vec![0, 1, 2, 4]);
        assert_eq!(am.fs_ratio(), 0.5);
        let even = ConstraintSpec::parity(&[0, 1, 2, 3], false);
        assert_eq!(even.feasible_local().len(), 8);
        assert!(even.satisfied_local(0b0011));
        let odd = ConstraintSpec::parity(&[0, 1], true);
        assert_eq!(odd.feasible_local(), vec![1, 2]);
        let up = ConstraintSpec::upper_only(&[0, 1], vec![3, 4], 4);
        assert_eq!(up.feasible_local(), vec![0, 1, 2]);
        let lo = ConstraintSpec::lower_only(&[0, 1], vec![3, 4], 4);
        assert_eq!(lo.feasible_local(), vec![2, 3]);
        let gen = ConstraintSpec::general(&[0, 1], vec![true, false, false, true]);
        assert_eq!(gen.feasible_local(), vec![0, 3]);
    }

    #[test]
    fn malformed_rejected() {
        assert!(ConstraintSpec::range(&[0, 1], vec![1, 1], 2, 1).validate().is_err());
        assert!(ConstraintSpec::range(&[0, 0], vec![1, 1], 0, 1).validate().is_err());
        assert!(ConstraintSpec::range(&[0, 1], vec![1], 0, 1).validate().is_err());
        let mut bad = ConstraintSpec::one_hot(&[0, 1]);
        bad.upper = 2;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn register_indexing() {
        let c = ConstraintSpec::one_hot(&[4, 1]);
        assert_eq!(c.local_index(0b10000), 1);
        assert_eq!(c.local_index(0b00010), 2);
        assert!(c.satisfied(0b10001));
        assert!(!c.satisfied(0b10010));
        assert_eq!(width_for(1), 1);
        assert_eq!(width_for(4), 2);
        assert_eq!(width_for(5), 3);
    }
}
