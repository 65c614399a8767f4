use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::compression::Compressor;
use crate::error::{Error, Result};
use crate::qubo::IsingModel;
use crate::sim::{compile_to_noisy, Circuit, GateOp, Statevector, XyPropagator};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Mode {
    /// Transverse-field mixer from `|+>^n`.
    X,
    /// Blockwise XY mixer from a product of W-states, one per group.
    Xy { groups: Vec<Vec<usize>> },
    /// X mixer on the kept qubits of a compressor, with a
    /// projection of the discarded qubits after every layer.
    Cs { compressor: Compressor },
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::X => "x",
            Mode::Xy { .. } => "xy",
            Mode::Cs { .. } => "cs",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaConfig {
    pub p: usize,
    pub mode: Mode,
    pub ising: IsingModel,
    /// Two-qubit gate error rate; 0 for coherent runs.
    #[serde(default)]
    pub noise: f64,
    #[serde(default = "default_trajectories")]
    pub trajectories: usize,
}

fn default_trajectories() -> usize {
    10
}

impl QaoaConfig {
    pub fn new(p: usize, mode: Mode, ising: IsingModel) -> Self {
        Self { p, mode, ising, noise: 0.0, trajectories: default_trajectories() }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ising.n();
        match &self.mode {
            Mode::X => {}
            Mode::Xy { groups } => {
                let mut seen = vec![false; n];
                for g in groups {
                    if g.is_empty() {
                        return Err(Error::InvalidArgument("empty XY group".into()));
                    }
                    for &q in g {
                        if q >= n || seen[q] {
                            return Err(Error::InvalidArgument(format!("XY groups must be disjoint qubits below {n}")));
                        }
                        seen[q] = true;
                    }
                }
            }
            Mode::Cs { compressor } => {
                if compressor.n_qubits() != n || compressor.m() == 0 {
                    return Err(Error::InvalidArgument(format!(
                        "compressor width {}/{} does not fit a {n}-qubit problem",
                        compressor.m(),
                        compressor.n_qubits()
                    )));
                }
            }
        }
        if !(0.0..0.8).contains(&self.noise) {
            return Err(Error::ErrorRateOutOfRange(self.noise));
        }
        if self.noise > 0.0 && self.trajectories == 0 {
            return Err(Error::InvalidArgument("noisy runs need at least one trajectory".into()));
        }
        Ok(())
    }
}

/// Metrics of one variational state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    /// `<H_Ising>` of the kept, renormalized state.
    pub energy: f64,
    /// Optimal-solution mass of the kept, renormalized state.
    pub overlap: f64,
    /// `prod_i (1 - p_dis^(i)) * overlap`.
    pub p_suc: f64,
    /// `1 - prod_i (1 - p_dis^(i))`.
    pub p_dis: f64,
    /// Per-layer discard probabilities.
    pub layer_discard: Vec<f64>,
}

/// Result of [`Engine::build_state`]: the final state in the original
/// frame and the per-layer discard probabilities.
#[derive(Clone, Debug)]
pub struct Built {
    pub state: Statevector,
    pub discard: Vec<f64>,
}

/// Energy assigned to fully discarded runs so that optimizers move away.
pub const DISCARDED_ENERGY: f64 = 1e3;

/// Precomputed data for repeated state builds.
pub struct Engine {
    cfg: QaoaConfig,
    diag: Vec<f64>,
    /// Compressed-frame energies and original states, for classical compressors.
    compressed: Option<(Vec<f64>, Vec<usize>)>,
    discarded: Vec<usize>,
    xy: HashMap<usize, XyPropagator>,
    gate_forms: Option<(Circuit, Circuit)>,
}

impl Engine {
    pub fn new(cfg: QaoaConfig) -> Result<Self> {
        cfg.validate()?;
        let diag = cfg.ising.diagonal();
        let mut compressed = None;
        let mut discarded = Vec::new();
        let mut xy = HashMap::new();
        match &cfg.mode {
            Mode::Cs { compressor } => {
                discarded = compressor.discarded();
                if let Some(label) = compressor.label() {
                    let cdiag = label.iter().map(|&x| diag[x]).collect();
                    compressed = Some((cdiag, label));
                }
            }
            Mode::Xy { groups } => {
                for g in groups {
                    xy.entry(g.len()).or_insert_with(|| XyPropagator::new(g.len()));
                }
            }
            Mode::X => {}
        }
        Ok(Self { cfg, diag, compressed, discarded, xy, gate_forms: None })
    }

    pub fn config(&self) -> &QaoaConfig {
        &self.cfg
    }

    pub fn n_qubits(&self) -> usize {
        self.cfg.ising.n()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn prepare_initial(&self) -> Result<Statevector> {
        let n = self.n_qubits();
        match &self.cfg.mode {
            Mode::X => Ok(Statevector::uniform(n)),
            Mode::Xy { groups } => Ok(w_product(n, groups)),
            Mode::Cs { compressor } => {
                let mut s = Statevector::zero(n);
                for &q in compressor.kept() {
                    s.apply_gate(&GateOp::Hadamard { qubit: q })?;
                }
                compressor.apply_inverse(&mut s)?;
                Ok(s)
            }
        }
    }

    fn check_params(&self, beta: &[f64], gamma: &[f64]) -> Result<()> {
        if beta.len() != self.cfg.p || gamma.len() != self.cfg.p {
            return Err(Error::LengthMismatch { expected: self.cfg.p, got: beta.len().min(gamma.len()) });
        }
        Ok(())
    }

    fn mixer(&self, s: &mut Statevector, beta: f64) -> Result<()> {
        match &self.cfg.mode {
            Mode::X => (0..self.n_qubits()).for_each(|q| s.apply_xrot(q, beta)),
            Mode::Xy { groups } => {
                let mut cache: HashMap<usize, Vec<Complex64>> = HashMap::new();
                for g in groups {
                    let u = cache.entry(g.len()).or_insert_with(|| self.xy[&g.len()].unitary(beta));
                    s.apply_dense(g, u)?;
                }
            }
            Mode::Cs { compressor } => compressor.kept().iter().for_each(|&q| s.apply_xrot(q, beta)),
        }
        Ok(())
    }

    /// Coherent state on the full register, following the circuit literally.
    pub fn build_state(&self, beta: &[f64], gamma: &[f64]) -> Result<Built> {
        self.check_params(beta, gamma)?;
        let mut s = self.prepare_initial()?;
        let mut discard = Vec::new();
        for (&b, &g) in beta.iter().zip(gamma) {
            s.apply_diagonal_phase(&self.diag, g)?;
            if let Mode::Cs { compressor } = &self.cfg.mode {
                compressor.apply(&mut s)?;
                let kept = self.project(&mut s)?;
                discard.push(1.0 - kept);
                if kept == 0.0 {
                    return Err(Error::FullyDiscarded);
                }
                self.mixer(&mut s, b)?;
                compressor.apply_inverse(&mut s)?;
            } else {
                self.mixer(&mut s, b)?;
            }
        }
        Ok(Built { state: s, discard })
    }

    fn project(&self, s: &mut Statevector) -> Result<f64> {
        if self.discarded.is_empty() {
            Ok(1.0)
        } else {
            s.project_zeros_in_place(&self.discarded)
        }
    }

    /// Coherent run inside the `2^m`-dimensional compressed register, valid for
    /// classical compressors where nothing is ever discarded.
    fn run_compressed(&self, beta: &[f64], gamma: &[f64]) -> Option<Result<Statevector>> {
        let (cdiag, _) = self.compressed.as_ref()?;
        let m = cdiag.len().trailing_zeros() as usize;
        let mut s = Statevector::uniform(m);
        for (&b, &g) in beta.iter().zip(gamma) {
            if let Err(e) = s.apply_diagonal_phase(cdiag, g) {
                return Some(Err(e));
            }
            (0..m).for_each(|q| s.apply_xrot(q, b));
        }
        Some(Ok(s))
    }

    fn metrics(&self, probs: impl Iterator<Item = (usize, f64)>, optima: &[usize], discard: Vec<f64>) -> Outcome {
        let mut energy = 0.0;
        let mut overlap = 0.0;
        for (x, p) in probs {
            energy += p * self.diag[x];
            if optima.binary_search(&x).is_ok() {
                overlap += p;
            }
        }
        let kept: f64 = discard.iter().map(|d| 1.0 - d).product();
        Outcome { energy, overlap, p_suc: kept * overlap, p_dis: 1.0 - kept, layer_discard: discard }
    }

    /// Coherent metrics; `optima` must be sorted.
    pub fn evaluate(&self, beta: &[f64], gamma: &[f64], optima: &[usize]) -> Result<Outcome> {
        self.check_params(beta, gamma)?;
        if let Some(run) = self.run_compressed(beta, gamma) {
            let s = run?;
            let label = &self.compressed.as_ref().unwrap().1;
            let probs = s.amplitudes().iter().enumerate().map(|(q, a)| (label[q], a.norm_sqr()));
            return Ok(self.metrics(probs, optima, vec![0.0; self.cfg.p]));
        }
        let b = self.build_state(beta, gamma)?;
        let probs = b.state.amplitudes().iter().map(|a| a.norm_sqr()).enumerate().collect::<Vec<_>>();
        Ok(self.metrics(probs.into_iter(), optima, b.discard))
    }

    /// Energy objective for the optimizer.
    pub fn energy(&self, beta: &[f64], gamma: &[f64]) -> Result<f64> {
        match self.evaluate(beta, gamma, &[]) {
            Ok(o) => Ok(o.energy),
            Err(Error::FullyDiscarded) => Ok(DISCARDED_ENERGY),
            Err(e) => Err(e),
        }
    }

    /// `exp(-i gamma H_Ising)` as gates.
    pub fn phase_circuit(&self, gamma: f64) -> Result<Circuit> {
        let ising = &self.cfg.ising;
        let mut c = Circuit::new(self.n_qubits());
        for (a, b, j) in ising.couplings() {
            c.push(GateOp::Rzz { a, b, theta: gamma * j })?;
        }
        for (q, &h) in ising.h.iter().enumerate() {
            if h != 0.0 {
                c.push(GateOp::RZ { qubit: q, theta: -gamma * h })?;
            }
        }
        c.push(GateOp::GlobalPhase { theta: gamma * ising.h0 })?;
        Ok(c)
    }

    fn mixer_circuit(&self, beta: f64) -> Result<Circuit> {
        let mut c = Circuit::new(self.n_qubits());
        match &self.cfg.mode {
            Mode::X => (0..self.n_qubits()).try_for_each(|q| c.push(GateOp::XRot { qubit: q, beta }))?,
            Mode::Xy { groups } => {
                for g in groups {
                    if g.len() > 1 {
                        c.push(GateOp::BlockXY { qubits: g.clone(), beta })?;
                    }
                }
            }
            Mode::Cs { compressor } => {
                compressor.kept().iter().try_for_each(|&q| c.push(GateOp::XRot { qubit: q, beta }))?
            }
        }
        Ok(c)
    }

    /// Gate forms of `U` and `U^dagger`, built on first use.
    pub fn compressor_gates(&mut self) -> Result<Option<(Circuit, Circuit)>> {
        if let Mode::Cs { compressor } = &self.cfg.mode {
            if self.gate_forms.is_none() {
                let u = compressor.gate_circuit()?;
                let udag = u.inverse()?;
                self.gate_forms = Some((u, udag));
            }
        }
        Ok(self.gate_forms.clone())
    }

    /// One trajectory of the gate-level circuit with two-qubit depolarizing
    /// noise of rate `eps`. The initial W-state of the XY mode is prepared
    /// exactly; every other two-qubit gate is followed by noise.
    pub fn trajectory<R: Rng + ?Sized>(
        &mut self,
        beta: &[f64],
        gamma: &[f64],
        eps: f64,
        rng: &mut R,
    ) -> Result<Built> {
        self.check_params(beta, gamma)?;
        let forms = self.compressor_gates()?;
        let n = self.n_qubits();
        let noisy = |c: &Circuit| compile_to_noisy(c, eps);
        let mut s = match &forms {
            Some((_, udag)) => {
                let mut s = Statevector::zero(n);
                if let Mode::Cs { compressor } = &self.cfg.mode {
                    for &q in compressor.kept() {
                        s.apply_gate(&GateOp::Hadamard { qubit: q })?;
                    }
                }
                s.apply_circuit(&noisy(udag)?, rng)?;
                s
            }
            None => self.prepare_initial()?,
        };
        let (u_noisy, udag_noisy) = match &forms {
            Some((u, udag)) => (Some(noisy(u)?), Some(noisy(udag)?)),
            None => (None, None),
        };
        let mut discard = Vec::new();
        for (&b, &g) in beta.iter().zip(gamma) {
            s.apply_circuit(&noisy(&self.phase_circuit(g)?)?, rng)?;
            if let (Some(u), Some(udag)) = (&u_noisy, &udag_noisy) {
                s.apply_circuit(u, rng)?;
                let kept = self.project(&mut s)?;
                discard.push(1.0 - kept);
                if kept == 0.0 {
                    return Err(Error::FullyDiscarded);
                }
                s.apply_circuit(&noisy(&self.mixer_circuit(b)?)?, rng)?;
                s.apply_circuit(udag, rng)?;
            } else {
                s.apply_circuit(&noisy(&self.mixer_circuit(b)?)?, rng)?;
            }
        }
        Ok(Built { state: s, discard })
    }

    /// Trajectory-averaged metrics under noise. Each trajectory carries the
    /// weight of its kept branch, so discarded weight counts towards `p_dis`
    /// and is excluded from the energy average.
    pub fn evaluate_noisy<R: Rng + ?Sized>(
        &mut self,
        beta: &[f64],
        gamma: &[f64],
        optima: &[usize],
        eps: f64,
        trajectories: usize,
        rng: &mut R,
    ) -> Result<Outcome> {
        if trajectories == 0 {
            return Err(Error::InvalidArgument("need at least one trajectory".into()));
        }
        let p = self.cfg.p;
        let mut layer_kept = vec![0.0; p + 1];
        let mut weighted_energy = 0.0;
        let mut p_suc = 0.0;
        for _ in 0..trajectories {
            let (w_layers, energy, overlap) = match self.trajectory(beta, gamma, eps, rng) {
                Ok(b) => {
                    let mut w = vec![1.0];
                    for d in &b.discard {
                        w.push(w.last().unwrap() * (1.0 - d));
                    }
                    w.resize(p + 1, *w.last().unwrap());
                    let o = self.metrics(b.state.probabilities().into_iter().enumerate(), optima, Vec::new());
                    (w, o.energy, o.overlap)
                }
                Err(Error::FullyDiscarded) => (vec![0.0; p + 1], 0.0, 0.0),
                Err(e) => return Err(e),
            };
            for (acc, w) in layer_kept.iter_mut().zip(&w_layers) {
                *acc += w;
            }
            let w = w_layers[p];
            weighted_energy += w * energy;
            p_suc += w * overlap;
        }
        let t = trajectories as f64;
        let kept = layer_kept[p] / t;
        let layer_discard: Vec<f64> = if matches!(self.cfg.mode, Mode::Cs { .. }) {
            (1..=p).map(|j| if layer_kept[j - 1] > 0.0 { 1.0 - layer_kept[j] / layer_kept[j - 1] } else { 1.0 }).collect()
        } else {
            Vec::new()
        };
        let energy = if kept > 0.0 { weighted_energy / layer_kept[p] } else { DISCARDED_ENERGY };
        Ok(Outcome {
            energy,
            overlap: if kept > 0.0 { p_suc / layer_kept[p] } else { 0.0 },
            p_suc: p_suc / t,
            p_dis: 1.0 - kept,
            layer_discard,
        })
    }
}

/// `prod_i (1 - p_dis^(i)) * sum_{x in S} |<x|psi>|^2`.
pub fn success_probability(state: &Statevector, optima: &[usize], discard: &[f64]) -> Result<f64> {
    if optima.is_empty() {
        return Err(Error::InvalidArgument("no optimal states given".into()));
    }
    let overlap: f64 = optima.iter().map(|&x| state.probability(x)).sum();
    Ok(discard.iter().map(|d| 1.0 - d).product::<f64>() * overlap)
}

/// Product of W-states over `groups`; qubits outside every group start in `|0>`.
pub fn w_product(n: usize, groups: &[Vec<usize>]) -> Statevector {
    let mut support = vec![0usize];
    let mut amp = 1.0;
    for g in groups {
        support = support.iter().flat_map(|&x| g.iter().map(move |&q| x | (1 << q))).collect();
        amp /= (g.len() as f64).sqrt();
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for x in support {
        amps[x] = Complex64::new(amp, 0.0);
    }
    Statevector::from_amplitudes(amps).expect("power-of-two length")
}
