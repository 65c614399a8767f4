//! Gate descriptors.
//!
//! A rotation by `theta` about a Pauli string `P` is `exp(-i theta P)`, with
//! the textbook `Z|0> = |0>`. The spin operator of the Ising model is
//! `sigma^z = -Z` (bit 1 is spin up), so the phase operator
//! `exp(-i gamma H_Ising)` compiles to `Rzz(gamma J_ij)`, `RZ(-gamma h_i)` and
//! `GlobalPhase(gamma H_0)`. `RY(theta)` is the `exp(-i theta sigma^y)`
//! rotation used by the continuous compressor ansatz.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_qubit, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum GateOp {
    PauliX { qubit: usize },
    Hadamard { qubit: usize },
    /// `exp(-i theta sigma^y)`.
    RY { qubit: usize, theta: f64 },
    /// `RY(theta)` on `target` when `control` is 1.
    ControlledRY { control: usize, target: usize, theta: f64 },
    Cnot { control: usize, target: usize },
    /// Fredkin gate: swaps `a` and `b` when `control` is 1.
    Cswap { control: usize, a: usize, b: usize },
    /// `exp(-i theta Z)`, i.e. `exp(+i theta sigma^z)` in spin terms.
    RZ { qubit: usize, theta: f64 },
    /// `exp(-i theta Z_a Z_b)`.
    Rzz { a: usize, b: usize, theta: f64 },
    /// `exp(-i beta sigma^x)`, the single-qubit factor of the X mixer.
    XRot { qubit: usize, beta: f64 },
    /// `exp(-i beta sum_{j<k} (X_j X_k + Y_j Y_k) / 2)` over `qubits`, applied exactly.
    BlockXY { qubits: Vec<usize>, beta: f64 },
    /// Scalar `exp(-i theta)`.
    GlobalPhase { theta: f64 },
    /// Stochastic kick `exp(i xi sigma . n)` with `n` drawn uniformly on the sphere.
    NoiseEvent { qubit: usize, xi: f64 },
}

impl GateOp {
    pub fn name(&self) -> &'static str {
        match self {
            GateOp::PauliX { .. } => "x",
            GateOp::Hadamard { .. } => "h",
            GateOp::RY { .. } => "ry",
            GateOp::ControlledRY { .. } => "cry",
            GateOp::Cnot { .. } => "cx",
            GateOp::Cswap { .. } => "cswap",
            GateOp::RZ { .. } => "rz",
            GateOp::Rzz { .. } => "rzz",
            GateOp::XRot { .. } => "xrot",
            GateOp::BlockXY { .. } => "block_xy",
            GateOp::GlobalPhase { .. } => "global_phase",
            GateOp::NoiseEvent { .. } => "noise",
        }
    }

    /// Qubits the gate acts on, in operand order.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            GateOp::PauliX { qubit }
            | GateOp::Hadamard { qubit }
            | GateOp::RY { qubit, .. }
            | GateOp::RZ { qubit, .. }
            | GateOp::XRot { qubit, .. }
            | GateOp::NoiseEvent { qubit, .. } => vec![qubit],
            GateOp::ControlledRY { control, target, .. } | GateOp::Cnot { control, target } => {
                vec![control, target]
            }
            GateOp::Cswap { control, a, b } => vec![control, a, b],
            GateOp::Rzz { a, b, .. } => vec![a, b],
            GateOp::BlockXY { ref qubits, .. } => qubits.clone(),
            GateOp::GlobalPhase { .. } => Vec::new(),
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qubits = self.qubits();
        for (i, &q) in qubits.iter().enumerate() {
            check_qubit(q, n_qubits)?;
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        if let GateOp::NoiseEvent { xi, .. } = *self {
            if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&xi) {
                return Err(Error::InvalidArgument(format!(
                    "noise angle {xi} outside [0, pi/2]"
                )));
            }
        }
        Ok(())
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(
            self,
            GateOp::ControlledRY { .. } | GateOp::Cnot { .. } | GateOp::Rzz { .. }
        )
    }

    /// Inverse gate; noise events have none.
    pub fn inverse(&self) -> Result<GateOp> {
        let g = match self.clone() {
            g @ (GateOp::PauliX { .. }
            | GateOp::Hadamard { .. }
            | GateOp::Cnot { .. }
            | GateOp::Cswap { .. }) => g,
            GateOp::RY { qubit, theta } => GateOp::RY { qubit, theta: -theta },
            GateOp::ControlledRY { control, target, theta } => GateOp::ControlledRY {
                control,
                target,
                theta: -theta,
            },
            GateOp::RZ { qubit, theta } => GateOp::RZ { qubit, theta: -theta },
            GateOp::Rzz { a, b, theta } => GateOp::Rzz { a, b, theta: -theta },
            GateOp::XRot { qubit, beta } => GateOp::XRot { qubit, beta: -beta },
            GateOp::BlockXY { qubits, beta } => GateOp::BlockXY { qubits, beta: -beta },
            GateOp::GlobalPhase { theta } => GateOp::GlobalPhase { theta: -theta },
            GateOp::NoiseEvent { .. } => return Err(Error::NotInvertible("noise")),
        };
        Ok(g)
    }

    /// Dense unitary on `self.qubits()` (row-major, local bit `k` is operand `k`).
    /// `None` for noise events and global phases.
    pub fn local_matrix(&self) -> Option<Vec<Complex64>> {
        let m = match *self {
            GateOp::PauliX { .. } => single_to_vec(PAULI_X),
            GateOp::Hadamard { .. } => single_to_vec(hadamard()),
            GateOp::RY { theta, .. } => single_to_vec(ry(theta)),
            GateOp::RZ { theta, .. } => single_to_vec(rz(theta)),
            GateOp::XRot { beta, .. } => single_to_vec(xrot(beta)),
            GateOp::ControlledRY { theta, .. } => controlled(ry(theta)),
            GateOp::Cnot { .. } => controlled(PAULI_X),
            GateOp::Rzz { theta, .. } => {
                let mut m = vec![Complex64::new(0.0, 0.0); 16];
                for s in 0..4usize {
                    let parity = ((s & 1) ^ (s >> 1)) as i32;
                    let sign = if parity == 0 { 1.0 } else { -1.0 };
                    m[s * 4 + s] = Complex64::from_polar(1.0, -theta * sign);
                }
                m
            }
            GateOp::Cswap { .. } => {
                let mut m = vec![Complex64::new(0.0, 0.0); 64];
                for s in 0..8usize {
                    let t = if s & 1 == 1 {
                        let a = (s >> 1) & 1;
                        let b = (s >> 2) & 1;
                        1 | (b << 1) | (a << 2)
                    } else {
                        s
                    };
                    m[t * 8 + s] = Complex64::new(1.0, 0.0);
                }
                m
            }
            GateOp::BlockXY { ref qubits, beta } => block_xy_unitary(qubits.len(), beta),
            GateOp::GlobalPhase { .. } | GateOp::NoiseEvent { .. } => return None,
        };
        Some(m)
    }
}

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub const PAULI_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];

pub fn hadamard() -> Mat2 {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[s, s], [s, -s]]
}

pub fn ry(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

pub fn rz(theta: f64) -> Mat2 {
    [
        [Complex64::from_polar(1.0, -theta), ZERO],
        [ZERO, Complex64::from_polar(1.0, theta)],
    ]
}

pub fn xrot(beta: f64) -> Mat2 {
    let (s, c) = beta.sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
        [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
    ]
}

/// `exp(i xi sigma . n)` for a unit vector `n`.
pub fn kick(xi: f64, n: [f64; 3]) -> Mat2 {
    let (s, c) = xi.sin_cos();
    let i_s = Complex64::new(0.0, s);
    [
        [Complex64::new(c, 0.0) + i_s * n[2], i_s * Complex64::new(n[0], -n[1])],
        [i_s * Complex64::new(n[0], n[1]), Complex64::new(c, 0.0) - i_s * n[2]],
    ]
}

fn single_to_vec(m: Mat2) -> Vec<Complex64> {
    vec![m[0][0], m[0][1], m[1][0], m[1][1]]
}

/// Two-qubit controlled gate; local bit 0 is the control.
fn controlled(u: Mat2) -> Vec<Complex64> {
    let mut m = vec![ZERO; 16];
    m[0] = ONE;
    m[2 * 4 + 2] = ONE;
    // control set: local states 1 (target 0) and 3 (target 1)
    m[4 + 1] = u[0][0];
    m[4 + 3] = u[0][1];
    m[3 * 4 + 1] = u[1][0];
    m[3 * 4 + 3] = u[1][1];
    m
}

/// Hopping Hamiltonian `sum_{j<k} (X_j X_k + Y_j Y_k) / 2` on `b` qubits as a
/// dense real symmetric matrix.
pub fn xy_hamiltonian(b: usize) -> nalgebra::DMatrix<f64> {
    let dim = 1usize << b;
    let mut h = nalgebra::DMatrix::<f64>::zeros(dim, dim);
    for s in 0..dim {
        for j in 0..b {
            for k in (j + 1)..b {
                if ((s >> j) & 1) != ((s >> k) & 1) {
                    let t = s ^ (1 << j) ^ (1 << k);
                    h[(t, s)] += 1.0;
                }
            }
        }
    }
    h
}

/// Exact `exp(-i beta H_XY)` on `b` qubits, row-major.
pub fn block_xy_unitary(b: usize, beta: f64) -> Vec<Complex64> {
    XyPropagator::new(b).unitary(beta)
}

/// Cached eigendecomposition of the block XY Hamiltonian.
#[derive(Clone, Debug)]
pub struct XyPropagator {
    dim: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: nalgebra::DMatrix<f64>,
}

impl XyPropagator {
    pub fn new(b: usize) -> Self {
        let h = xy_hamiltonian(b);
        let eig = nalgebra::SymmetricEigen::new(h);
        Self {
            dim: 1 << b,
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
        }
    }

    pub fn unitary(&self, beta: f64) -> Vec<Complex64> {
        let d = self.dim;
        let phases: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -beta * l))
            .collect();
        let v = &self.eigenvectors;
        let mut u = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                let mut acc = ZERO;
                for (k, ph) in phases.iter().enumerate() {
                    acc += ph * (v[(r, k)] * v[(c, k)]);
                }
                u[r * d + c] = acc;
            }
        }
        u
    }
}
