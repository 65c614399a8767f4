use rand::Rng;

use super::compressor::Compressor;
use super::hamiltonian::CompressedHamiltonian;
use super::spec::{width_for, ConstraintSpec};
use crate::error::{Error, Result};
use crate::sim::{GateOp, Statevector};

/// Original-space distribution `|<x|U^dagger|0 q>|^2` of compressed basis state `q`.
pub fn pulled_back(u: &Compressor, q: usize) -> Result<Vec<(usize, f64)>> {
    if let Some(x) = u.unmap_basis(u.embed(q)) {
        return Ok(vec![(x, 1.0)]);
    }
    let s = u.decompress_basis(q)?;
    Ok(s.probabilities().into_iter().enumerate().filter(|(_, p)| *p > 0.0).collect())
}

/// `E(U, H) = 2^{-m} sum_q <0 q| U H U^dagger |0 q>`.
pub fn e_direct(u: &Compressor, h: &CompressedHamiltonian) -> Result<f64> {
    let dim = 1usize << u.m();
    let mut acc = 0.0;
    for q in 0..dim {
        for (x, p) in pulled_back(u, q)? {
            acc += p * h.value(x);
        }
    }
    Ok(acc / dim as f64)
}

/// How the entangled estimator reads out the register.
pub enum Readout<'a, R: Rng + ?Sized> {
    Exact,
    Shots(usize, &'a mut R),
}

/// Compression energy from one circuit: `m` ancillas (qubits `N..N+m`) in
/// `|+>`, CNOTs onto the kept qubits, then `U^dagger` on the register. The
/// register marginal is the uniform mixture over compressed basis states.
pub fn e_entangled<R: Rng + ?Sized>(
    u: &Compressor,
    h: &CompressedHamiltonian,
    readout: Readout<'_, R>,
) -> Result<f64> {
    let n = u.n_qubits();
    let m = u.m();
    let wide = u.tensor(&Compressor::identity(m))?;
    let mut s = Statevector::zero(n + m);
    for j in 0..m {
        s.apply_gate(&GateOp::Hadamard { qubit: n + j })?;
        s.apply_gate(&GateOp::Cnot { control: n + j, target: u.kept()[j] })?;
    }
    wide.apply_inverse(&mut s)?;
    let mask = (1usize << n) - 1;
    match readout {
        Readout::Exact => Ok(s.probabilities().iter().enumerate().map(|(x, p)| p * h.value(x & mask)).sum()),
        Readout::Shots(0, _) => Err(Error::InvalidArgument("shot count must be positive".into())),
        Readout::Shots(k, rng) => {
            let total: f64 = (0..k).map(|_| h.value(s.sample_basis(rng) & mask)).sum();
            Ok(total / k as f64)
        }
    }
}

/// Probability that `U|x>` lands in the sector of each state.
pub fn sector_probability(u: &Compressor, x: usize) -> Result<f64> {
    if let Some(y) = u.map_basis(x) {
        return Ok(if u.extract(y).is_some() { 1.0 } else { 0.0 });
    }
    let mut s = Statevector::basis(u.n_qubits(), x);
    u.apply(&mut s)?;
    Ok((0..1usize << u.m()).map(|q| s.probability(u.embed(q))).sum())
}

/// Mean survival `|F|^{-1} sum_{x in F} ||<0|U|x>||^2` over the feasible set.
pub fn survival_rate(u: &Compressor, feasible: &[usize]) -> Result<f64> {
    if feasible.is_empty() {
        return Err(Error::InvalidArgument("empty feasible set".into()));
    }
    let mut acc = 0.0;
    for &x in feasible {
        acc += sector_probability(u, x)?;
    }
    Ok(acc / feasible.len() as f64)
}

/// Register states satisfying every constraint.
pub fn feasible_register_states(n: usize, constraints: &[ConstraintSpec]) -> Vec<usize> {
    (0..1usize << n).filter(|&x| constraints.iter().all(|c| c.satisfied(x))).collect()
}

/// Compressed width for the next constraint, from the fraction of sampled
/// decompressed states that satisfy it.
pub fn estimate_compressed_width<R: Rng + ?Sized>(
    u: &Compressor,
    next: &ConstraintSpec,
    samples: usize,
    rng: &mut R,
) -> Result<usize> {
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let dim = 1usize << u.m();
    let mut hits = 0usize;
    for _ in 0..samples {
        let q = rng.gen_range(0..dim);
        let x = match u.unmap_basis(u.embed(q)) {
            Some(x) => x,
            None => u.decompress_basis(q)?.sample_basis(rng),
        };
        hits += next.satisfied(x) as usize;
    }
    let count = (hits as f64 / samples as f64 * dim as f64).round() as usize;
    Ok(width_for(count.max(1)).min(u.m()))
}
