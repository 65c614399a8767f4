use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spec::width_for;
use crate::error::{check_qubit, Error, Result};
use crate::sim::noise::toffoli_network;
use crate::sim::{Circuit, GateOp, Statevector};

/// One factor of a compressor, acting in the forward (compressing) direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum Stage {
    /// Basis permutation on `qubits`; local index bit `k` is `qubits[k]`.
    Permutation { qubits: Vec<usize>, table: Vec<usize> },
    Circuit { circuit: Circuit },
}

impl Stage {
    fn validate(&self, n: usize) -> Result<()> {
        match self {
            Stage::Permutation { qubits, table } => {
                for (i, &q) in qubits.iter().enumerate() {
                    check_qubit(q, n)?;
                    if qubits[..i].contains(&q) {
                        return Err(Error::DuplicateQubit(q));
                    }
                }
                let d = 1usize << qubits.len();
                if table.len() != d {
                    return Err(Error::LengthMismatch { expected: d, got: table.len() });
                }
                let mut seen = vec![false; d];
                for &t in table {
                    if t >= d || seen[t] {
                        return Err(Error::InvalidArgument("permutation table is not a bijection".into()));
                    }
                    seen[t] = true;
                }
                Ok(())
            }
            Stage::Circuit { circuit } => {
                if circuit.n_qubits() > n {
                    return Err(Error::QubitOutOfRange { index: circuit.n_qubits() - 1, n_qubits: n });
                }
                if circuit.gates().iter().any(|g| matches!(g, GateOp::NoiseEvent { .. })) {
                    return Err(Error::InvalidArgument("compressor stages must be noiseless".into()));
                }
                Ok(())
            }
        }
    }

    fn is_classical(&self) -> bool {
        match self {
            Stage::Permutation { .. } => true,
            Stage::Circuit { circuit } => circuit.gates().iter().all(is_classical_gate),
        }
    }

    fn inverse(&self) -> Result<Stage> {
        Ok(match self {
            Stage::Permutation { qubits, table } => {
                let mut inv = vec![0; table.len()];
                for (s, &t) in table.iter().enumerate() {
                    inv[t] = s;
                }
                Stage::Permutation { qubits: qubits.clone(), table: inv }
            }
            Stage::Circuit { circuit } => Stage::Circuit { circuit: circuit.inverse()? },
        })
    }
}

fn is_classical_gate(g: &GateOp) -> bool {
    matches!(g, GateOp::PauliX { .. } | GateOp::Cnot { .. } | GateOp::Cswap { .. })
}

/// Image of a basis index under a classical gate.
pub fn classical_gate_map(g: &GateOp, x: usize) -> Option<usize> {
    let bit = |q: usize| (x >> q) & 1 == 1;
    Some(match *g {
        GateOp::PauliX { qubit } => x ^ (1 << qubit),
        GateOp::Cnot { control, target } => {
            if bit(control) {
                x ^ (1 << target)
            } else {
                x
            }
        }
        GateOp::Cswap { control, a, b } => {
            if bit(control) && bit(a) != bit(b) {
                x ^ (1 << a) ^ (1 << b)
            } else {
                x
            }
        }
        _ => return None,
    })
}

fn gather(qubits: &[usize], x: usize) -> usize {
    qubits.iter().enumerate().filter(|(_, &q)| (x >> q) & 1 == 1).map(|(k, _)| 1 << k).sum()
}

fn scatter(qubits: &[usize], x: usize, local: usize) -> usize {
    let mut y = x;
    for (k, &q) in qubits.iter().enumerate() {
        y = (y & !(1 << q)) | (((local >> k) & 1) << q);
    }
    y
}

fn stage_map(stage: &Stage, x: usize) -> Option<usize> {
    match stage {
        Stage::Permutation { qubits, table } => Some(scatter(qubits, x, table[gather(qubits, x)])),
        Stage::Circuit { circuit } => circuit.gates().iter().try_fold(x, |y, g| classical_gate_map(g, y)),
    }
}

fn apply_stage(stage: &Stage, state: &mut Statevector) -> Result<()> {
    match stage {
        Stage::Permutation { qubits, table } => {
            let amps = state.amplitudes();
            let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
            for (x, a) in amps.iter().enumerate() {
                out[scatter(qubits, x, table[gather(qubits, x)])] = *a;
            }
            state.amplitudes_mut().copy_from_slice(&out);
            Ok(())
        }
        Stage::Circuit { circuit } => {
            for g in circuit.gates() {
                state.apply_gate(g)?;
            }
            Ok(())
        }
    }
}

/// Unitary `U` on an `n`-qubit register, compressing into the `kept` qubits.
///
/// A compressed basis state `q` sits on the register as `|0...0>` on the
/// discarded qubits and bit `j` of `q` on `kept[j]`; `U^dagger` maps it back
/// into the original space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Compressor {
    n: usize,
    kept: Vec<usize>,
    stages: Vec<Stage>,
}

impl Compressor {
    pub fn new(n: usize, kept: Vec<usize>, stages: Vec<Stage>) -> Result<Self> {
        for (i, &q) in kept.iter().enumerate() {
            check_qubit(q, n)?;
            if kept[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        for s in &stages {
            s.validate(n)?;
        }
        Ok(Self { n, kept, stages })
    }

    pub fn identity(n: usize) -> Self {
        Self { n, kept: (0..n).collect(), stages: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Compressed width `m`.
    pub fn m(&self) -> usize {
        self.kept.len()
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn discarded(&self) -> Vec<usize> {
        (0..self.n).filter(|q| !self.kept.contains(q)).collect()
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// Appends a stage applied after the existing ones and updates the kept set.
    pub fn then(mut self, stage: Stage, kept: Vec<usize>) -> Result<Self> {
        stage.validate(self.n)?;
        for &q in &kept {
            if !self.kept.contains(&q) {
                return Err(Error::InvalidArgument(format!("qubit {q} was discarded by an earlier stage")));
            }
        }
        self.stages.push(stage);
        Self::new(self.n, kept, self.stages)
    }

    pub fn is_classical(&self) -> bool {
        self.stages.iter().all(Stage::is_classical)
    }

    /// Register index of compressed basis state `q`.
    pub fn embed(&self, q: usize) -> usize {
        scatter(&self.kept, 0, q)
    }

    /// Compressed index of a register index in the sector, if it is one.
    pub fn extract(&self, x: usize) -> Option<usize> {
        let kept_mask: usize = self.kept.iter().map(|q| 1 << q).sum();
        if x & !kept_mask != 0 {
            None
        } else {
            Some(gather(&self.kept, x))
        }
    }

    /// `U|x>` for classical compressors.
    pub fn map_basis(&self, x: usize) -> Option<usize> {
        self.stages.iter().try_fold(x, |y, s| stage_map(s, y))
    }

    /// `U^dagger |x>` for classical compressors.
    pub fn unmap_basis(&self, x: usize) -> Option<usize> {
        let mut y = x;
        for s in self.stages.iter().rev() {
            y = stage_map(&s.inverse().ok()?, y)?;
        }
        Some(y)
    }

    /// `U` as a full-register index map, for classical compressors.
    pub fn dense_permutation(&self) -> Option<Vec<usize>> {
        (0..1usize << self.n).map(|x| self.map_basis(x)).collect()
    }

    /// Original basis state of each compressed basis state, for classical compressors.
    pub fn label(&self) -> Option<Vec<usize>> {
        (0..1usize << self.m()).map(|q| self.unmap_basis(self.embed(q))).collect()
    }

    pub fn apply(&self, state: &mut Statevector) -> Result<()> {
        self.check_width(state)?;
        for s in &self.stages {
            apply_stage(s, state)?;
        }
        Ok(())
    }

    pub fn apply_inverse(&self, state: &mut Statevector) -> Result<()> {
        self.check_width(state)?;
        for s in self.stages.iter().rev() {
            apply_stage(&s.inverse()?, state)?;
        }
        Ok(())
    }

    fn check_width(&self, state: &Statevector) -> Result<()> {
        if state.n_qubits() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: state.n_qubits() });
        }
        Ok(())
    }

    /// `U|0...0>|q>` pulled back: the original-space state of compressed basis state `q`.
    pub fn decompress_basis(&self, q: usize) -> Result<Statevector> {
        let mut s = Statevector::basis(self.n, self.embed(q));
        self.apply_inverse(&mut s)?;
        Ok(s)
    }

    /// Forward `U` as a gate sequence; permutation stages are synthesized.
    pub fn gate_circuit(&self) -> Result<Circuit> {
        let mut c = Circuit::new(self.n);
        for s in &self.stages {
            match s {
                Stage::Permutation { qubits, table } => {
                    for g in synthesize_permutation(qubits, table)? {
                        c.push(g)?;
                    }
                }
                Stage::Circuit { circuit } => c.extend(circuit)?,
            }
        }
        Ok(c)
    }

    /// Independent compressors on disjoint registers combined as `U_a (x) U_b`,
    /// with `b`'s qubits shifted above `a`'s.
    pub fn tensor(&self, other: &Compressor) -> Result<Self> {
        let off = self.n;
        let n = self.n + other.n;
        let mut stages = self.stages.clone();
        for s in &other.stages {
            stages.push(match s {
                Stage::Permutation { qubits, table } => Stage::Permutation {
                    qubits: qubits.iter().map(|q| q + off).collect(),
                    table: table.clone(),
                },
                Stage::Circuit { circuit } => Stage::Circuit { circuit: shift_circuit(circuit, off, n)? },
            });
        }
        let mut kept = self.kept.clone();
        kept.extend(other.kept.iter().map(|q| q + off));
        Self::new(n, kept, stages)
    }
}

fn shift_gate(g: &GateOp, off: usize) -> GateOp {
    let mut g = g.clone();
    match &mut g {
        GateOp::PauliX { qubit }
        | GateOp::Hadamard { qubit }
        | GateOp::RY { qubit, .. }
        | GateOp::RZ { qubit, .. }
        | GateOp::XRot { qubit, .. }
        | GateOp::NoiseEvent { qubit, .. } => *qubit += off,
        GateOp::ControlledRY { control, target, .. } | GateOp::Cnot { control, target } => {
            *control += off;
            *target += off;
        }
        GateOp::Cswap { control, a, b } => {
            *control += off;
            *a += off;
            *b += off;
        }
        GateOp::Rzz { a, b, .. } => {
            *a += off;
            *b += off;
        }
        GateOp::BlockXY { qubits, .. } => qubits.iter_mut().for_each(|q| *q += off),
        GateOp::GlobalPhase { .. } => {}
    }
    g
}

/// Relabels a circuit's qubits `k -> map[k]` onto an `n`-qubit register.
pub fn remap_circuit(c: &Circuit, map: &[usize], n: usize) -> Result<Circuit> {
    let gates = c
        .gates()
        .iter()
        .map(|g| {
            let mut g = g.clone();
            let f = |q: &mut usize| *q = map[*q];
            match &mut g {
                GateOp::PauliX { qubit }
                | GateOp::Hadamard { qubit }
                | GateOp::RY { qubit, .. }
                | GateOp::RZ { qubit, .. }
                | GateOp::XRot { qubit, .. }
                | GateOp::NoiseEvent { qubit, .. } => f(qubit),
                GateOp::ControlledRY { control, target, .. } | GateOp::Cnot { control, target } => {
                    f(control);
                    f(target);
                }
                GateOp::Cswap { control, a, b } => {
                    f(control);
                    f(a);
                    f(b);
                }
                GateOp::Rzz { a, b, .. } => {
                    f(a);
                    f(b);
                }
                GateOp::BlockXY { qubits, .. } => qubits.iter_mut().for_each(f),
                GateOp::GlobalPhase { .. } => {}
            }
            g
        })
        .collect();
    Circuit::from_gates(n, gates)
}

fn shift_circuit(c: &Circuit, off: usize, n: usize) -> Result<Circuit> {
    Circuit::from_gates(n, c.gates().iter().map(|g| shift_gate(g, off)).collect())
}

/// Multi-controlled X on `target`, conditioned on each `(qubit, value)`.
fn mcx(controls: &[(usize, bool)], target: usize) -> Result<Vec<GateOp>> {
    let flips: Vec<GateOp> = controls.iter().filter(|c| !c.1).map(|c| GateOp::PauliX { qubit: c.0 }).collect();
    let core = match controls {
        [] => vec![GateOp::PauliX { qubit: target }],
        [(c, _)] => vec![GateOp::Cnot { control: *c, target }],
        [(a, _), (b, _)] => toffoli_network(*a, *b, target),
        _ => {
            return Err(Error::GateFormUnavailable(format!(
                "{}-controlled X",
                controls.len()
            )))
        }
    };
    let mut out = flips.clone();
    out.extend(core);
    out.extend(flips);
    Ok(out)
}

/// Cancels adjacent identical self-inverse gates.
fn peephole(gates: Vec<GateOp>) -> Vec<GateOp> {
    let mut out: Vec<GateOp> = Vec::with_capacity(gates.len());
    for g in gates {
        if is_classical_gate(&g) && out.last() == Some(&g) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    out
}

/// Gate form of a basis permutation on at most three qubits, built from
/// transpositions of basis states.
pub fn synthesize_permutation(qubits: &[usize], table: &[usize]) -> Result<Vec<GateOp>> {
    let k = qubits.len();
    if table.iter().enumerate().all(|(s, &t)| s == t) {
        return Ok(Vec::new());
    }
    if k == 4 && table == onehot4_circuit_table().as_slice() {
        return Ok(onehot4_gates(qubits));
    }
    if k > 3 {
        return Err(Error::GateFormUnavailable(format!("{k}-qubit permutation table")));
    }
    // pos[s] is where source s currently sits
    let d = 1usize << k;
    let mut pos: Vec<usize> = (0..d).collect();
    let mut gates = Vec::new();
    for s in 0..d {
        let (a, b) = (pos[s], table[s]);
        if a == b {
            continue;
        }
        let diff = a ^ b;
        let pivot = diff.trailing_zeros() as usize;
        // after the CNOT ladder the state with the pivot set differs from the other only on the pivot
        let low = if (a >> pivot) & 1 == 0 { a } else { b };
        let ladder: Vec<GateOp> = (0..k)
            .filter(|&j| j != pivot && (diff >> j) & 1 == 1)
            .map(|j| GateOp::Cnot { control: qubits[pivot], target: qubits[j] })
            .collect();
        let controls: Vec<(usize, bool)> =
            (0..k).filter(|&j| j != pivot).map(|j| (qubits[j], (low >> j) & 1 == 1)).collect();
        gates.extend(ladder.iter().cloned());
        gates.extend(mcx(&controls, qubits[pivot])?);
        gates.extend(ladder.into_iter().rev());
        for p in pos.iter_mut() {
            if *p == a {
                *p = b;
            } else if *p == b {
                *p = a;
            }
        }
    }
    Ok(peephole(gates))
}

/// Basis permutation for one-hot to binary on `k` variables.
///
/// One-hot position `j` (bit `j` set) goes to binary `j` on the last `m`
/// qubits with the least significant bit on the first kept qubit; every other
/// state fills the remaining images in increasing order.
pub fn onehot_table(k: usize) -> Vec<usize> {
    let m = onehot_width(k);
    let shift = k - m;
    let d = 1usize << k;
    let mut table = vec![usize::MAX; d];
    let mut used = vec![false; d];
    for j in 0..k {
        let t = j << shift;
        table[1 << j] = t;
        used[t] = true;
    }
    let mut free = (0..d).filter(|&t| !used[t]);
    for s in table.iter_mut() {
        if *s == usize::MAX {
            *s = free.next().unwrap();
        }
    }
    table
}

pub fn onehot_width(k: usize) -> usize {
    width_for(k).min(k)
}

/// The four-variable one-hot compressor as gates on `q = [q1, q2, q3, q4]`:
/// `CX(q4,q2) CX(q3,q4) CSWAP(q4; q1,q3) CX(q2,q1) X(q1) SWAP(q2,q3)`.
pub fn onehot4_gates(q: &[usize]) -> Vec<GateOp> {
    let cx = |c: usize, t: usize| GateOp::Cnot { control: q[c], target: q[t] };
    vec![
        cx(3, 1),
        cx(2, 3),
        GateOp::Cswap { control: q[3], a: q[0], b: q[2] },
        cx(1, 0),
        GateOp::PauliX { qubit: q[0] },
        cx(1, 2),
        cx(2, 1),
        cx(1, 2),
    ]
}

/// Full basis map of [`onehot4_gates`].
pub fn onehot4_circuit_table() -> Vec<usize> {
    let gates = onehot4_gates(&[0, 1, 2, 3]);
    (0..16usize)
        .map(|x| gates.iter().try_fold(x, |y, g| classical_gate_map(g, y)).unwrap())
        .collect()
}

/// Stage compressing the one-hot constraint on `group`; returns it with the
/// group's kept qubits.
pub fn onehot_stage(group: &[usize]) -> (Stage, Vec<usize>) {
    let k = group.len();
    let m = onehot_width(k);
    let table = if k == 4 { onehot4_circuit_table() } else { onehot_table(k) };
    (Stage::Permutation { qubits: group.to_vec(), table }, group[k - m..].to_vec())
}

/// Parity compressor on `group`: CNOTs from every other qubit into the first,
/// then X on the first for odd parity. The first qubit is discarded.
pub fn parity_stage(n: usize, group: &[usize], odd: bool) -> Result<(Stage, Vec<usize>)> {
    if group.len() < 2 {
        return Err(Error::InvalidArgument("parity compressor needs at least two qubits".into()));
    }
    let mut c = Circuit::new(n);
    for &q in &group[1..] {
        c.push(GateOp::Cnot { control: q, target: group[0] })?;
    }
    if odd {
        c.push(GateOp::PauliX { qubit: group[0] })?;
    }
    Ok((Stage::Circuit { circuit: c }, group[1..].to_vec()))
}

fn sorted_kept(n: usize, discarded: &[usize]) -> Vec<usize> {
    (0..n).filter(|q| !discarded.contains(q)).collect()
}

/// Product of one-hot compressors on disjoint groups of an `n`-qubit register.
pub fn build_onehot_product(n: usize, groups: &[Vec<usize>]) -> Result<Compressor> {
    let mut stages = Vec::new();
    let mut discarded = Vec::new();
    for g in groups {
        let (s, kept) = onehot_stage(g);
        discarded.extend(g.iter().filter(|q| !kept.contains(q)));
        stages.push(s);
    }
    Compressor::new(n, sorted_kept(n, &discarded), stages)
}

pub fn build_onehot_binary(group: &[usize], n: usize) -> Result<Compressor> {
    build_onehot_product(n, &[group.to_vec()])
}

pub fn build_parity(n: usize, group: &[usize], odd: bool) -> Result<Compressor> {
    let (s, _) = parity_stage(n, group, odd)?;
    Compressor::new(n, sorted_kept(n, &group[..1]), vec![s])
}

/// Compressor for a permutation matrix `x_{i,a}` on qubit `i n_f + a`.
///
/// Each column `{x_{i,a}}_i` is one-hot compressed to `ceil(log2 n_f)` bits.
/// With `parity`, the parity of each bit position summed over columns is fixed
/// by the assignment being a permutation and one more qubit per bit position
/// is discarded.
pub fn build_qap_compressor(n_f: usize, parity: bool) -> Result<Compressor> {
    if n_f < 2 {
        return Err(Error::InvalidArgument("QAP compressor needs n_f >= 2".into()));
    }
    let n = n_f * n_f;
    let columns: Vec<Vec<usize>> = (0..n_f).map(|a| (0..n_f).map(|i| i * n_f + a).collect()).collect();
    let mut c = build_onehot_product(n, &columns)?;
    if !parity {
        return Ok(c);
    }
    let mc = onehot_width(n_f);
    let col_kept: Vec<Vec<usize>> = columns.iter().map(|g| g[n_f - mc..].to_vec()).collect();
    for b in 0..mc {
        let group: Vec<usize> = col_kept.iter().map(|k| k[b]).collect();
        let odd = (0..n_f).map(|i| (i >> b) & 1).sum::<usize>() % 2 == 1;
        let (s, _) = parity_stage(n, &group, odd)?;
        let kept: Vec<usize> = c.kept().iter().copied().filter(|&q| q != group[0]).collect();
        c = c.then(s, kept)?;
    }
    Ok(c)
}
