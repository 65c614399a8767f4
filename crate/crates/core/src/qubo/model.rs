use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quadratic binary polynomial `sum_{i<=j} Q_ij x_i x_j + Q_0`, stored upper-triangular.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Qubo {
    n: usize,
    coeffs: Vec<f64>,
    offset: f64,
}

/// Interchange form shared by QUBO and Ising exports. For an Ising model the
/// diagonal entries `[i, i, v]` are the biases `h_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticJson {
    pub n: usize,
    pub entries: Vec<(usize, usize, f64)>,
    pub offset: f64,
}

impl Qubo {
    pub fn new(n: usize) -> Self {
        Self { n, coeffs: vec![0.0; n * n], offset: 0.0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Adds `v x_i x_j`; `(i, j)` and `(j, i)` fold onto the same coefficient.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.coeffs[a * self.n + b] += v;
    }

    pub fn add_offset(&mut self, v: f64) {
        self.offset += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.coeffs[a * self.n + b]
    }

    /// Adds `(sum_k a_k x_k + c)^2` using `x^2 = x`.
    pub fn add_squared_linear(&mut self, terms: &[(usize, f64)], c: f64, weight: f64) {
        for (k, &(i, a)) in terms.iter().enumerate() {
            self.add(i, i, weight * (a * a + 2.0 * a * c));
            for &(j, b) in &terms[k + 1..] {
                self.add(i, j, weight * 2.0 * a * b);
            }
        }
        self.offset += weight * c * c;
    }

    /// Nonzero coefficients as `(i, j, Q_ij)` with `i <= j`.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i..self.n {
                let v = self.coeffs[i * self.n + j];
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// Value at the bitstring encoded by `x` (bit `i` is `x_i`).
    pub fn evaluate(&self, x: usize) -> f64 {
        let mut e = self.offset;
        for i in 0..self.n {
            if (x >> i) & 1 == 0 {
                continue;
            }
            let row = &self.coeffs[i * self.n..(i + 1) * self.n];
            for (j, &v) in row.iter().enumerate().skip(i) {
                if (x >> j) & 1 == 1 {
                    e += v;
                }
            }
        }
        e
    }

    pub fn evaluate_bits(&self, bits: &[bool]) -> Result<f64> {
        if bits.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: bits.len() });
        }
        Ok(self.evaluate(bits_to_index(bits)))
    }

    /// `self + s * other`.
    pub fn plus_scaled(&self, other: &Qubo, s: f64) -> Result<Qubo> {
        if other.n != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: other.n });
        }
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
        out.offset += s * other.offset;
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> Qubo {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|v| *v *= s);
        out.offset *= s;
        out
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Spin form via `x_i = (s_i + 1) / 2`.
    pub fn to_ising(&self) -> IsingModel {
        let mut ising = IsingModel::new(self.n);
        ising.h0 = self.offset;
        for (i, j, q) in self.entries() {
            if i == j {
                ising.h[i] += q / 2.0;
                ising.h0 += q / 2.0;
            } else {
                ising.add_coupling(i, j, q / 4.0);
                ising.h[i] += q / 4.0;
                ising.h[j] += q / 4.0;
                ising.h0 += q / 4.0;
            }
        }
        ising
    }

    pub fn to_json(&self) -> QuadraticJson {
        QuadraticJson { n: self.n, entries: self.entries(), offset: self.offset }
    }

    pub fn from_json(j: &QuadraticJson) -> Result<Qubo> {
        let mut q = Qubo::new(j.n);
        for &(a, b, v) in &j.entries {
            if a >= j.n || b >= j.n {
                return Err(Error::QubitOutOfRange { index: a.max(b), n_qubits: j.n });
            }
            q.add(a, b, v);
        }
        q.offset = j.offset;
        Ok(q)
    }
}

/// `sum_{i<j} J_ij s_i s_j + sum_i h_i s_i + H_0` with `s_i = 2 x_i - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingModel {
    n: usize,
    /// Upper-triangular couplings, row-major `n x n`.
    j: Vec<f64>,
    pub h: Vec<f64>,
    pub h0: f64,
}

impl IsingModel {
    pub fn new(n: usize) -> Self {
        Self { n, j: vec![0.0; n * n], h: vec![0.0; n], h0: 0.0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_coupling(&mut self, a: usize, b: usize, v: f64) {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        assert!(a != b, "self-coupling of spin {a}");
        self.j[a * self.n + b] += v;
    }

    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.j[a * self.n + b]
    }

    /// Nonzero couplings `(i, j, J_ij)` with `i < j`.
    pub fn couplings(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                let v = self.j[a * self.n + b];
                if v != 0.0 {
                    out.push((a, b, v));
                }
            }
        }
        out
    }

    pub fn max_abs_coupling(&self) -> f64 {
        let mj = self.j.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.h.iter().fold(mj, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> IsingModel {
        IsingModel {
            n: self.n,
            j: self.j.iter().map(|v| v * s).collect(),
            h: self.h.iter().map(|v| v * s).collect(),
            h0: self.h0 * s,
        }
    }

    pub fn energy_of(&self, x: usize) -> f64 {
        let spin = |i: usize| if (x >> i) & 1 == 1 { 1.0 } else { -1.0 };
        let mut e = self.h0;
        for a in 0..self.n {
            let sa = spin(a);
            e += self.h[a] * sa;
            for b in a + 1..self.n {
                let v = self.j[a * self.n + b];
                if v != 0.0 {
                    e += v * sa * spin(b);
                }
            }
        }
        e
    }

    pub fn energy_of_bits(&self, bits: &[bool]) -> Result<f64> {
        if bits.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: bits.len() });
        }
        Ok(self.energy_of(bits_to_index(bits)))
    }

    /// Energies of all `2^n` basis states.
    pub fn diagonal(&self) -> Vec<f64> {
        let dim = 1usize << self.n;
        let mut d = vec![self.h0; dim];
        let mut add_term = |mask: usize, v: f64| {
            for (x, e) in d.iter_mut().enumerate() {
                // product of spins on `mask` is +1 for even overlap parity
                if (x & mask).count_ones() % 2 == mask.count_ones() % 2 {
                    *e += v;
                } else {
                    *e -= v;
                }
            }
        };
        for a in 0..self.n {
            if self.h[a] != 0.0 {
                add_term(1 << a, self.h[a]);
            }
        }
        for (a, b, v) in self.couplings() {
            add_term((1 << a) | (1 << b), v);
        }
        d
    }

    pub fn to_json(&self) -> QuadraticJson {
        let mut entries: Vec<(usize, usize, f64)> = (0..self.n)
            .filter(|&i| self.h[i] != 0.0)
            .map(|i| (i, i, self.h[i]))
            .collect();
        entries.extend(self.couplings());
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        QuadraticJson { n: self.n, entries, offset: self.h0 }
    }
}

pub fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| 1 << i).sum()
}

pub fn index_to_bits(x: usize, n: usize) -> Vec<bool> {
    (0..n).map(|i| (x >> i) & 1 == 1).collect()
}

/// Penalized, normalized problem `Q = (Q_obj + A Q_cst) / norm`.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub qubo: Qubo,
    pub ising: IsingModel,
    pub penalty: f64,
    pub norm: f64,
    /// All couplings vanished, so no normalization was possible (`norm = 1`).
    pub zero_couplings: bool,
}

pub fn assemble(obj: &Qubo, cst: &Qubo, penalty: f64) -> Result<Assembled> {
    if !(penalty >= 0.0) {
        return Err(Error::InvalidArgument(format!("penalty coefficient {penalty} must be >= 0")));
    }
    let raw = obj.plus_scaled(cst, penalty)?;
    let ising = raw.to_ising();
    let m = ising.max_abs_coupling();
    let (norm, zero_couplings) = if m > 0.0 { (m, false) } else { (1.0, true) };
    Ok(Assembled {
        qubo: raw.scaled(1.0 / norm),
        ising: ising.scaled(1.0 / norm),
        penalty,
        norm,
        zero_couplings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn toy_penalty_energies() {
        // minimize 2 x_A + x_B subject to x_A + x_B = 1, qubit 0 is x_A
        let mut obj = Qubo::new(2);
        obj.add(0, 0, 2.0);
        obj.add(1, 1, 1.0);
        let mut cst = Qubo::new(2);
        cst.add_squared_linear(&[(0, 1.0), (1, 1.0)], -1.0, 1.0);
        let q = obj.plus_scaled(&cst, 5.0).unwrap();
        let e = |a: usize, b: usize| q.evaluate(a | (b << 1));
        assert_eq!([e(0, 0), e(0, 1), e(1, 0), e(1, 1)], [5.0, 1.0, 2.0, 8.0]);
        let asm = assemble(&obj, &cst, 5.0).unwrap();
        for x in 0..4 {
            assert!((asm.ising.energy_of(x) * asm.norm - q.evaluate(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_penalty_keeps_objective_shape() {
        let mut obj = Qubo::new(3);
        obj.add(0, 1, 2.0);
        obj.add(2, 2, -1.0);
        let mut cst = Qubo::new(3);
        cst.add(1, 2, 7.0);
        let asm = assemble(&obj, &cst, 0.0).unwrap();
        for x in 0..8 {
            assert!((asm.qubo.evaluate(x) * asm.norm - obj.evaluate(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn all_zero_couplings_flagged() {
        let mut obj = Qubo::new(2);
        obj.add_offset(3.0);
        let asm = assemble(&obj, &Qubo::new(2), 1.0).unwrap();
        assert!(asm.zero_couplings);
        assert_eq!(asm.norm, 1.0);
        assert!(assemble(&obj, &Qubo::new(2), -1.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut q = Qubo::new(3);
        q.add(2, 0, 1.5);
        q.add(1, 1, -2.0);
        q.add_offset(0.25);
        let j = q.to_json();
        assert_eq!(j.entries, vec![(0, 2, 1.5), (1, 1, -2.0)]);
        let text = serde_json::to_string(&j).unwrap();
        let back: QuadraticJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Qubo::from_json(&back).unwrap(), q);
    }

    fn random_qubo(n: usize, vals: &[f64]) -> Qubo {
        let mut q = Qubo::new(n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                q.add(i, j, vals[k % vals.len()]);
                k += 1;
            }
        }
        q.add_offset(vals[0]);
        q
    }

    proptest! {
        #[test]
        fn ising_matches_qubo_everywhere(vals in proptest::collection::vec(-5.0f64..5.0, 15)) {
            let q = random_qubo(5, &vals);
            let ising = q.to_ising();
            let diag = ising.diagonal();
            for x in 0..32 {
                prop_assert!((ising.energy_of(x) - q.evaluate(x)).abs() < 1e-10);
                prop_assert!((diag[x] - q.evaluate(x)).abs() < 1e-10);
            }
        }

        #[test]
        fn normalization_hits_one(vals in proptest::collection::vec(-5.0f64..5.0, 10), a in 0.0f64..20.0) {
            let obj = random_qubo(4, &vals);
            let cst = random_qubo(4, &vals[3..]);
            let asm = assemble(&obj, &cst, a).unwrap();
            if !asm.zero_couplings {
                prop_assert!((asm.ising.max_abs_coupling() - 1.0).abs() < 1e-12);
            }
            for x in 0..16 {
                prop_assert!((asm.ising.energy_of(x) - asm.qubo.evaluate(x)).abs() < 1e-10);
            }
        }
    }
}
