use rand::Rng;
use serde::{Deserialize, Serialize};

use super::compressor::{remap_circuit, Compressor, Stage};
use super::energy::{e_direct, survival_rate};
use super::hamiltonian::CompressedHamiltonian;
use crate::error::{Error, Result};
use crate::optim::{anneal_binary, powell_minimize, PowellConfig, SaConfig};
use crate::sim::{Circuit, GateOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    Continuous,
    Discrete,
}

/// Continuous ansatz on `n` local qubits producing `U^dagger`: an RY column,
/// then per layer a controlled-RY for every ordered pair (controls in
/// increasing order) followed by another RY column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CAnsatz {
    pub n: usize,
    pub m: usize,
    pub layers: usize,
}

impl CAnsatz {
    pub fn n_params(&self) -> usize {
        self.n + self.layers * self.n * self.n
    }

    pub fn circuit(&self, theta: &[f64]) -> Result<Circuit> {
        if theta.len() != self.n_params() {
            return Err(Error::LengthMismatch { expected: self.n_params(), got: theta.len() });
        }
        let mut t = theta.iter().copied();
        let mut c = Circuit::new(self.n);
        for q in 0..self.n {
            c.push(GateOp::RY { qubit: q, theta: t.next().unwrap() })?;
        }
        for _ in 0..self.layers {
            for control in 0..self.n {
                for target in (0..self.n).filter(|&t| t != control) {
                    c.push(GateOp::ControlledRY { control, target, theta: t.next().unwrap() })?;
                }
            }
            for q in 0..self.n {
                c.push(GateOp::RY { qubit: q, theta: t.next().unwrap() })?;
            }
            c.mark_layer();
        }
        Ok(c)
    }
}

/// Discrete ansatz on `n` local qubits producing `U^dagger` from on/off slots:
/// X on each of the `n - m` discarded qubits, then per layer every
/// `CSWAP(i1; i2 < i3)`, every `CX(i1, i2)` and every `X(i)`, with slots
/// enumerated in lexicographic index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DAnsatz {
    pub n: usize,
    pub m: usize,
    pub layers: usize,
}

impl DAnsatz {
    pub fn n_params(&self) -> usize {
        let n = self.n;
        (n - self.m) + self.layers * (n * (n - 1) * n.saturating_sub(2) / 2 + n * (n - 1) + n)
    }

    fn slots(&self) -> Vec<GateOp> {
        let n = self.n;
        let mut s: Vec<GateOp> = (0..n - self.m).map(|q| GateOp::PauliX { qubit: q }).collect();
        for _ in 0..self.layers {
            for i1 in 0..n {
                for i2 in (0..n).filter(|&i| i != i1) {
                    for i3 in (i2 + 1..n).filter(|&i| i != i1) {
                        s.push(GateOp::Cswap { control: i1, a: i2, b: i3 });
                    }
                }
            }
            for i1 in 0..n {
                for i2 in (0..n).filter(|&i| i != i1) {
                    s.push(GateOp::Cnot { control: i1, target: i2 });
                }
            }
            for i in 0..n {
                s.push(GateOp::PauliX { qubit: i });
            }
        }
        s
    }

    pub fn decode(&self, bits: &[bool]) -> Result<Circuit> {
        if bits.len() != self.n_params() {
            return Err(Error::LengthMismatch { expected: self.n_params(), got: bits.len() });
        }
        let gates = self.slots().into_iter().zip(bits).filter(|(_, &b)| b).map(|(g, _)| g).collect();
        Circuit::from_gates(self.n, gates)
    }
}

/// Appends a trained stage: `udag` acts on `base`'s kept qubits, whose first
/// `n_k - m` are discarded.
pub fn ansatz_compressor(base: &Compressor, udag: &Circuit, m: usize) -> Result<Compressor> {
    let frame = base.kept();
    if udag.n_qubits() != frame.len() || m > frame.len() {
        return Err(Error::InvalidArgument(format!(
            "ansatz width {} / m = {m} does not fit {} compressed qubits",
            udag.n_qubits(),
            frame.len()
        )));
    }
    let on_register = remap_circuit(udag, frame, base.n_qubits())?;
    let kept = frame[frame.len() - m..].to_vec();
    base.clone().then(Stage::Circuit { circuit: on_register.inverse()? }, kept)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub layers: usize,
    /// Restarts for the continuous ansatz, outer annealing loops for the discrete one.
    pub budget: usize,
    pub energy: f64,
    pub p_sur: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trained {
    pub compressor: Compressor,
    pub ansatz: AnsatzKind,
    pub layers: usize,
    pub params: Vec<f64>,
    pub energy: f64,
    pub p_sur: f64,
    pub passed: bool,
    pub attempts: Vec<Attempt>,
}

/// Retry policy: the budget is doubled up to `max_doublings` times, then the
/// ansatz gains a layer (budget reset) up to `max_extra_layers` times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Escalation {
    pub threshold: f64,
    pub max_doublings: usize,
    pub max_extra_layers: usize,
}

impl Default for Escalation {
    fn default() -> Self {
        Self { threshold: 0.98, max_doublings: 3, max_extra_layers: 1 }
    }
}

impl Escalation {
    fn schedule(&self, layers: usize, budget: usize) -> Vec<(usize, usize)> {
        let mut s = Vec::new();
        for extra in 0..=self.max_extra_layers {
            for d in 0..=self.max_doublings {
                s.push((layers + extra, budget << d));
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CTrainConfig {
    pub layers: usize,
    pub n_rep: usize,
    pub powell: PowellConfig,
    pub escalation: Escalation,
}

impl Default for CTrainConfig {
    fn default() -> Self {
        Self { layers: 1, n_rep: 10, powell: PowellConfig::default(), escalation: Escalation::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DTrainConfig {
    pub layers: usize,
    pub sa: SaConfig,
    /// Stop annealing once the energy reaches the mean of the lowest `2^m`
    /// reachable eigenvalues, which no unitary can beat.
    pub stop_at_bound: bool,
    pub escalation: Escalation,
}

impl Default for DTrainConfig {
    fn default() -> Self {
        Self { layers: 1, sa: SaConfig::default(), stop_at_bound: true, escalation: Escalation::default() }
    }
}

fn check_training_inputs(base: &Compressor, m: usize, feasible: &[usize]) -> Result<()> {
    if m == 0 || m > base.m() {
        return Err(Error::InvalidArgument(format!("target width {m} outside 1..={}", base.m())));
    }
    if feasible.is_empty() {
        return Err(Error::InvalidArgument("no feasible states to preserve".into()));
    }
    Ok(())
}

fn pick_better(best: &mut Option<Trained>, cand: Trained) {
    let better = match best {
        None => true,
        Some(b) => (cand.p_sur, -cand.energy) > (b.p_sur, -b.energy),
    };
    if better {
        *best = Some(cand);
    }
}

/// Trains the continuous ansatz by Powell from `n_rep` uniform starts in `[0, pi)`.
pub fn train_c_ansatz<R: Rng + ?Sized>(
    base: &Compressor,
    h: &CompressedHamiltonian,
    m: usize,
    feasible: &[usize],
    cfg: &CTrainConfig,
    rng: &mut R,
) -> Result<Trained> {
    check_training_inputs(base, m, feasible)?;
    let n = base.m();
    let mut attempts = Vec::new();
    let mut best: Option<Trained> = None;
    for (layers, n_rep) in cfg.escalation.schedule(cfg.layers, cfg.n_rep) {
        let ans = CAnsatz { n, m, layers };
        let energy = |theta: &[f64]| -> f64 {
            ans.circuit(theta)
                .and_then(|c| ansatz_compressor(base, &c, m))
                .and_then(|u| e_direct(&u, h))
                .unwrap_or(f64::NAN)
        };
        let mut round: Option<(Vec<f64>, f64)> = None;
        for _ in 0..n_rep {
            let x0: Vec<f64> = (0..ans.n_params()).map(|_| rng.gen_range(0.0..std::f64::consts::PI)).collect();
            let r = powell_minimize(energy, &x0, &cfg.powell)?;
            if round.as_ref().is_none_or(|b| r.f < b.1) {
                round = Some((r.x, r.f));
            }
        }
        let (params, e) = round.unwrap();
        let u = ansatz_compressor(base, &ans.circuit(&params)?, m)?;
        let p_sur = survival_rate(&u, feasible)?;
        attempts.push(Attempt { layers, budget: n_rep, energy: e, p_sur });
        let passed = p_sur >= cfg.escalation.threshold;
        pick_better(
            &mut best,
            Trained {
                compressor: u,
                ansatz: AnsatzKind::Continuous,
                layers,
                params,
                energy: e,
                p_sur,
                passed,
                attempts: Vec::new(),
            },
        );
        if passed {
            break;
        }
    }
    let mut t = best.unwrap();
    t.attempts = attempts;
    Ok(t)
}

/// Mean of the lowest `2^m` eigenvalues over the states `base` can reach.
pub fn reachable_energy_bound(base: &Compressor, h: &CompressedHamiltonian, m: usize) -> Option<f64> {
    let mut v: Vec<f64> = (0..1usize << base.m())
        .map(|y| base.unmap_basis(base.embed(y)).map(|x| h.value(x)))
        .collect::<Option<_>>()?;
    v.sort_by(f64::total_cmp);
    let k = 1usize << m;
    Some(v[..k].iter().sum::<f64>() / k as f64)
}

/// Trains the discrete ansatz by simulated annealing over its slots.
pub fn train_d_ansatz<R: Rng + ?Sized>(
    base: &Compressor,
    h: &CompressedHamiltonian,
    m: usize,
    feasible: &[usize],
    cfg: &DTrainConfig,
    rng: &mut R,
) -> Result<Trained> {
    check_training_inputs(base, m, feasible)?;
    let n = base.m();
    let bound = if cfg.stop_at_bound { reachable_energy_bound(base, h, m) } else { None };
    let mut attempts = Vec::new();
    let mut best: Option<Trained> = None;
    for (layers, n_loop) in cfg.escalation.schedule(cfg.layers, cfg.sa.n_loop) {
        let ans = DAnsatz { n, m, layers };
        let sa = SaConfig { n_loop, target: cfg.sa.target.or(bound.map(|b| b + 1e-9)), ..cfg.sa.clone() };
        let energy = |bits: &[bool]| -> f64 {
            ans.decode(bits)
                .and_then(|c| ansatz_compressor(base, &c, m))
                .and_then(|u| e_direct(&u, h))
                .unwrap_or(f64::NAN)
        };
        let r = anneal_binary(energy, ans.n_params(), &sa, rng)?;
        let u = ansatz_compressor(base, &ans.decode(&r.bits)?, m)?;
        let p_sur = survival_rate(&u, feasible)?;
        attempts.push(Attempt { layers, budget: n_loop, energy: r.f, p_sur });
        let passed = p_sur >= cfg.escalation.threshold;
        let params = r.bits.iter().map(|&b| b as u8 as f64).collect();
        pick_better(
            &mut best,
            Trained {
                compressor: u,
                ansatz: AnsatzKind::Discrete,
                layers,
                params,
                energy: r.f,
                p_sur,
                passed,
                attempts: Vec::new(),
            },
        );
        if passed {
            break;
        }
    }
    let mut t = best.unwrap();
    t.attempts = attempts;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::{feasible_register_states, ConstraintSpec};
    use crate::sim::Statevector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bits(v: &[u8]) -> Vec<bool> {
        v.iter().map(|&b| b == 1).collect()
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(DAnsatz { n: 3, m: 2, layers: 1 }.n_params(), 13);
        assert_eq!(DAnsatz { n: 4, m: 3, layers: 1 }.n_params(), 29);
        assert_eq!(CAnsatz { n: 3, m: 2, layers: 1 }.n_params(), 12);
        assert_eq!(CAnsatz { n: 4, m: 2, layers: 2 }.n_params(), 36);
    }

    #[test]
    fn continuous_circuit_structure() {
        let a = CAnsatz { n: 3, m: 2, layers: 1 };
        let c = a.circuit(&vec![0.1; 12]).unwrap();
        assert_eq!(c.count_by_name("ry"), 6);
        assert_eq!(c.count_by_name("cry"), 6);
        assert_eq!(c.gates()[3], GateOp::ControlledRY { control: 0, target: 1, theta: 0.1 });
        assert!(a.circuit(&[0.0; 3]).is_err());
        // all-zero angles give the identity
        let id = a.circuit(&vec![0.0; 12]).unwrap();
        let mut s = Statevector::basis(3, 5);
        s.apply_circuit(&id, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!((s.probability(5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn discrete_slot_order() {
        let a = DAnsatz { n: 3, m: 2, layers: 1 };
        let slots = a.slots();
        assert_eq!(slots[0], GateOp::PauliX { qubit: 0 });
        assert_eq!(slots[1], GateOp::Cswap { control: 0, a: 1, b: 2 });
        assert_eq!(slots[2], GateOp::Cswap { control: 1, a: 0, b: 2 });
        assert_eq!(slots[3], GateOp::Cswap { control: 2, a: 0, b: 1 });
        assert_eq!(slots[4], GateOp::Cnot { control: 0, target: 1 });
        assert_eq!(slots[12], GateOp::PauliX { qubit: 2 });
    }

    /// Original-space states of the compressed inputs, as bit strings
    /// `x_1 x_2 ... x_N` read as binary numbers.
    fn msb_label(u: &Compressor) -> Vec<usize> {
        let n = u.n_qubits();
        u.label()
            .unwrap()
            .into_iter()
            .map(|x| (0..n).fold(0, |acc, q| (acc << 1) | ((x >> q) & 1)))
            .collect()
    }

    fn msb_compressed_order(u: &Compressor) -> Vec<usize> {
        // compressed input |x'_1 ... x'_m> with x'_1 the most significant bit
        let m = u.m();
        let lab = msb_label(u);
        (0..1usize << m)
            .map(|q| {
                let rev = (0..m).fold(0, |acc, j| (acc << 1) | ((q >> j) & 1));
                lab[rev]
            })
            .collect()
    }

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort();
        v
    }

    #[test]
    fn known_three_variable_compressor() {
        let a = DAnsatz { n: 3, m: 2, layers: 1 };
        let c = a.decode(&bits(&[0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 1])).unwrap();
        assert_eq!(c.count_by_name("cswap"), 1);
        assert_eq!(c.count_by_name("cx"), 3);
        assert_eq!(c.count_by_name("x"), 1);
        let u = ansatz_compressor(&Compressor::identity(3), &c, 2).unwrap();
        let f = feasible_register_states(3, &[ConstraintSpec::at_most(&[0, 1, 2], 1)]);
        assert_eq!(survival_rate(&u, &f).unwrap(), 1.0);
        assert_eq!(sorted(msb_label(&u)), vec![0, 1, 2, 4]);
        assert_eq!(sorted(msb_compressed_order(&u)), sorted(vec![4, 2, 0, 1]));
    }

    #[test]
    fn known_four_variable_compressor() {
        let a = DAnsatz { n: 4, m: 3, layers: 1 };
        let p = [0, 0, 1, 1, 1, 1, 0, 0, 0, 1, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 1];
        let c = a.decode(&bits(&p)).unwrap();
        let u = ansatz_compressor(&Compressor::identity(4), &c, 3).unwrap();
        let f = feasible_register_states(4, &[ConstraintSpec::at_most(&[0, 1, 2, 3], 1)]);
        assert_eq!(survival_rate(&u, &f).unwrap(), 1.0);
        let lab = sorted(msb_label(&u));
        lab.windows(2).for_each(|w| assert!(w[0] < w[1]));
        for x in [0, 1, 2, 4, 8] {
            assert!(lab.contains(&x));
        }
    }

    fn three_var_setup() -> (CompressedHamiltonian, Vec<usize>) {
        let c = ConstraintSpec::at_most(&[0, 1, 2], 1);
        let h = CompressedHamiltonian::build(&c, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        (h, feasible_register_states(3, &[c]))
    }

    #[test]
    fn discrete_training_finds_lossless_compressor() {
        let (h, f) = three_var_setup();
        let base = Compressor::identity(3);
        let t = train_d_ansatz(&base, &h, 2, &f, &DTrainConfig::default(), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(t.passed);
        assert_eq!(t.p_sur, 1.0);
        let bound = reachable_energy_bound(&base, &h, 2).unwrap();
        assert!((t.energy - bound).abs() < 1e-9);
        let mut lab = t.compressor.label().unwrap();
        lab.sort();
        assert_eq!(lab, vec![0, 1, 2, 4]);
    }

    #[test]
    fn continuous_training_meets_threshold() {
        let (h, f) = three_var_setup();
        let t = train_c_ansatz(
            &Compressor::identity(3),
            &h,
            2,
            &f,
            &CTrainConfig::default(),
            &mut ChaCha8Rng::seed_from_u64(2),
        )
        .unwrap();
        assert!(t.passed, "p_sur {} after {:?}", t.p_sur, t.attempts);
        assert_eq!(t.ansatz, AnsatzKind::Continuous);
    }

    #[test]
    fn impossible_target_fails_after_escalation() {
        // two feasible states cannot fit into m = 1 without loss when a third is required
        let c = ConstraintSpec::at_most(&[0, 1, 2], 1);
        let h = CompressedHamiltonian::build(&c, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let f = feasible_register_states(3, &[c]);
        let cfg = DTrainConfig {
            sa: SaConfig { n_loop: 20, ..SaConfig::default() },
            escalation: Escalation { threshold: 0.98, max_doublings: 1, max_extra_layers: 1 },
            ..DTrainConfig::default()
        };
        let t = train_d_ansatz(&Compressor::identity(3), &h, 1, &f, &cfg, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert!(!t.passed);
        assert_eq!(t.attempts.len(), 4);
        assert!(t.p_sur <= 0.5);
    }
}
