use num_complex::Complex64;
use rand::Rng;

use super::circuit::Circuit;
use super::gate::{self, GateOp, Mat2};
use crate::error::{check_qubit, Error, Result};

/// Dense statevector over `2^n` basis states.
///
/// Qubit `i` is bit `i` of the basis index, and `|1>` on a qubit is the
/// `sigma^z = +1` eigenstate, so a bit value `x` has spin `2x - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Outcome of projecting a set of qubits onto `|0...0>`.
#[derive(Clone, Debug)]
pub struct Projection {
    pub prob_zero: f64,
    /// Renormalized projected state; `None` when `prob_zero` is zero.
    pub state: Option<Statevector>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl Statevector {
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// `|+>^n`.
    pub fn uniform(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self { n_qubits, amps: vec![a; dim] }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {dim} is not a power of two"
            )));
        }
        Ok(Self { n_qubits: dim.trailing_zeros() as usize, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let s = 1.0 / n;
            self.amps.iter_mut().for_each(|a| *a *= s);
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Applies a unitary gate. Noise events need a generator and are rejected.
    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.apply_gate_unchecked(gate)
    }

    pub(crate) fn apply_gate_unchecked(&mut self, gate: &GateOp) -> Result<()> {
        match *gate {
            GateOp::PauliX { qubit } => self.apply_x(qubit),
            GateOp::Hadamard { qubit } => self.apply_single(qubit, &gate::hadamard()),
            GateOp::RY { qubit, theta } => self.apply_single(qubit, &gate::ry(theta)),
            GateOp::RZ { qubit, theta } => self.apply_rz(qubit, theta),
            GateOp::XRot { qubit, beta } => self.apply_xrot(qubit, beta),
            GateOp::ControlledRY { control, target, theta } => {
                self.apply_controlled(control, target, &gate::ry(theta))
            }
            GateOp::Cnot { control, target } => self.apply_cnot(control, target),
            GateOp::Cswap { control, a, b } => self.apply_cswap(control, a, b),
            GateOp::Rzz { a, b, theta } => self.apply_rzz(a, b, theta),
            GateOp::BlockXY { ref qubits, beta } => {
                let u = gate::block_xy_unitary(qubits.len(), beta);
                self.apply_dense(qubits, &u)?;
            }
            GateOp::GlobalPhase { theta } => {
                let ph = Complex64::from_polar(1.0, -theta);
                self.amps.iter_mut().for_each(|a| *a *= ph);
            }
            GateOp::NoiseEvent { .. } => return Err(Error::NoiseWithoutRng),
        }
        Ok(())
    }

    /// Applies every gate in order; noise events draw their axes from `rng`.
    pub fn apply_circuit<R: Rng + ?Sized>(&mut self, circuit: &Circuit, rng: &mut R) -> Result<()> {
        if circuit.n_qubits() > self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: circuit.n_qubits() - 1,
                n_qubits: self.n_qubits,
            });
        }
        for g in circuit.gates() {
            match *g {
                GateOp::NoiseEvent { qubit, xi } => self.apply_noise_event(qubit, xi, rng)?,
                _ => self.apply_gate(g)?,
            }
        }
        Ok(())
    }

    /// Applies `exp(i xi sigma . n)` with `n` uniform on the unit sphere.
    /// Averaged over `n` this is a depolarizing channel of strength `sin^2 xi`.
    pub fn apply_noise_event<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        xi: f64,
        rng: &mut R,
    ) -> Result<()> {
        check_qubit(qubit, self.n_qubits)?;
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&xi) {
            return Err(Error::InvalidArgument(format!("noise angle {xi} outside [0, pi/2]")));
        }
        let n = random_unit_vector(rng);
        if xi != 0.0 {
            self.apply_single(qubit, &gate::kick(xi, n));
        }
        Ok(())
    }

    /// `sum_x diag[x] |a_x|^2`.
    pub fn expectation_diagonal(&self, diag: &[f64]) -> Result<f64> {
        if diag.len() != self.amps.len() {
            return Err(Error::LengthMismatch { expected: self.amps.len(), got: diag.len() });
        }
        Ok(self.amps.iter().zip(diag).map(|(a, d)| a.norm_sqr() * d).sum())
    }

    /// Multiplies amplitude `x` by `exp(-i gamma diag[x])`.
    pub fn apply_diagonal_phase(&mut self, diag: &[f64], gamma: f64) -> Result<()> {
        if diag.len() != self.amps.len() {
            return Err(Error::LengthMismatch { expected: self.amps.len(), got: diag.len() });
        }
        for (a, d) in self.amps.iter_mut().zip(diag) {
            *a *= Complex64::from_polar(1.0, -gamma * d);
        }
        Ok(())
    }

    /// Projects `qubits` onto all-zeros and renormalizes the kept component.
    pub fn project_zeros(&self, qubits: &[usize]) -> Result<Projection> {
        let mut out = self.clone();
        let prob_zero = out.project_zeros_in_place(qubits)?;
        Ok(Projection {
            prob_zero,
            state: if prob_zero > 0.0 { Some(out) } else { None },
        })
    }

    /// In-place projection; returns the all-zero probability. When that
    /// probability is zero the state is left as the zero vector.
    pub fn project_zeros_in_place(&mut self, qubits: &[usize]) -> Result<f64> {
        if qubits.is_empty() {
            return Err(Error::InvalidArgument("projection needs at least one qubit".into()));
        }
        let mut mask = 0usize;
        for &q in qubits {
            check_qubit(q, self.n_qubits)?;
            mask |= 1 << q;
        }
        let mut kept = 0.0;
        for (x, a) in self.amps.iter_mut().enumerate() {
            if x & mask == 0 {
                kept += a.norm_sqr();
            } else {
                *a = ZERO;
            }
        }
        if kept > 0.0 {
            let s = 1.0 / kept.sqrt();
            self.amps.iter_mut().for_each(|a| *a *= s);
        }
        Ok(kept.min(1.0))
    }

    /// Draws a basis index with probability `|a_x|^2`.
    pub fn sample_basis<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = self.norm_sqr();
        let mut r = rng.gen::<f64>() * total;
        for (x, a) in self.amps.iter().enumerate() {
            r -= a.norm_sqr();
            if r < 0.0 {
                return x;
            }
        }
        // rounding left r marginally non-negative: take the last populated state
        self.amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0)
    }

    pub fn apply_x(&mut self, q: usize) {
        let bit = 1 << q;
        for x in 0..self.amps.len() {
            if x & bit == 0 {
                self.amps.swap(x, x | bit);
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let c = 1 << control;
        let t = 1 << target;
        for x in 0..self.amps.len() {
            if x & c != 0 && x & t == 0 {
                self.amps.swap(x, x | t);
            }
        }
    }

    pub fn apply_cswap(&mut self, control: usize, a: usize, b: usize) {
        let c = 1 << control;
        let ba = 1 << a;
        let bb = 1 << b;
        for x in 0..self.amps.len() {
            if x & c != 0 && x & ba != 0 && x & bb == 0 {
                self.amps.swap(x, (x & !ba) | bb);
            }
        }
    }

    fn apply_rz(&mut self, q: usize, theta: f64) {
        let bit = 1 << q;
        let p0 = Complex64::from_polar(1.0, -theta);
        let p1 = Complex64::from_polar(1.0, theta);
        for (x, a) in self.amps.iter_mut().enumerate() {
            *a *= if x & bit == 0 { p0 } else { p1 };
        }
    }

    fn apply_rzz(&mut self, qa: usize, qb: usize, theta: f64) {
        let even = Complex64::from_polar(1.0, -theta);
        let odd = Complex64::from_polar(1.0, theta);
        for (x, amp) in self.amps.iter_mut().enumerate() {
            let parity = ((x >> qa) ^ (x >> qb)) & 1;
            *amp *= if parity == 0 { even } else { odd };
        }
    }

    pub fn apply_xrot(&mut self, q: usize, beta: f64) {
        let (s, c) = beta.sin_cos();
        let mis = Complex64::new(0.0, -s);
        let bit = 1 << q;
        for x in 0..self.amps.len() {
            if x & bit == 0 {
                let a0 = self.amps[x];
                let a1 = self.amps[x | bit];
                self.amps[x] = a0 * c + a1 * mis;
                self.amps[x | bit] = a0 * mis + a1 * c;
            }
        }
    }

    pub fn apply_single(&mut self, q: usize, m: &Mat2) {
        let bit = 1 << q;
        for x in 0..self.amps.len() {
            if x & bit == 0 {
                let a0 = self.amps[x];
                let a1 = self.amps[x | bit];
                self.amps[x] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[x | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_controlled(&mut self, control: usize, target: usize, m: &Mat2) {
        let c = 1 << control;
        let bit = 1 << target;
        for x in 0..self.amps.len() {
            if x & c != 0 && x & bit == 0 {
                let a0 = self.amps[x];
                let a1 = self.amps[x | bit];
                self.amps[x] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[x | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Applies a dense `2^k x 2^k` row-major unitary to `qubits`; local bit
    /// `j` of the matrix index is `qubits[j]`.
    pub fn apply_dense(&mut self, qubits: &[usize], u: &[Complex64]) -> Result<()> {
        let k = qubits.len();
        let d = 1usize << k;
        if u.len() != d * d {
            return Err(Error::LengthMismatch { expected: d * d, got: u.len() });
        }
        let mut mask = 0usize;
        for &q in qubits {
            check_qubit(q, self.n_qubits)?;
            if mask & (1 << q) != 0 {
                return Err(Error::DuplicateQubit(q));
            }
            mask |= 1 << q;
        }
        let offsets: Vec<usize> = (0..d)
            .map(|s| {
                qubits
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| (s >> j) & 1 == 1)
                    .map(|(_, &q)| 1 << q)
                    .sum()
            })
            .collect();
        let mut buf = vec![ZERO; d];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (s, off) in offsets.iter().enumerate() {
                buf[s] = self.amps[base + off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let row = &u[r * d..(r + 1) * d];
                self.amps[base + off] = row.iter().zip(&buf).map(|(m, a)| m * a).sum();
            }
        }
        Ok(())
    }
}

pub(crate) fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let z: f64 = 2.0 * rng.gen::<f64>() - 1.0;
    let phi: f64 = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}
