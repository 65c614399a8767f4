use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ansatz::{train_c_ansatz, train_d_ansatz, Attempt, CTrainConfig, DTrainConfig};
use super::compressor::{onehot_stage, parity_stage, Compressor};
use super::energy::{estimate_compressed_width, feasible_register_states};
use super::hamiltonian::CompressedHamiltonian;
use super::spec::{width_for, ConstraintKind, ConstraintSpec};
use crate::error::{Error, Result};

/// Largest register for which feasible sets are enumerated rather than sampled.
pub const ENUMERATION_CAP: usize = 20;

/// How one constraint is compressed.
///
/// Deterministic strategies refer to qubits of the current compressed frame,
/// which must all still be kept. Trained strategies refer to the original
/// variables and act on every kept qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum Strategy {
    OneHotBinary,
    Parity,
    DAnsatz {
        #[serde(default)]
        config: DTrainConfig,
        #[serde(default)]
        m: Option<usize>,
    },
    CAnsatz {
        #[serde(default)]
        config: CTrainConfig,
        #[serde(default)]
        m: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub stage: usize,
    pub m: usize,
    pub p_sur: Option<f64>,
    pub attempts: Vec<Attempt>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Composed {
    pub compressor: Compressor,
    pub steps: Vec<StepReport>,
}

fn frame_check(u: &Compressor, c: &ConstraintSpec, stage: usize) -> Result<()> {
    if let Some(q) = c.qubits.iter().find(|q| !u.kept().contains(q)) {
        return Err(Error::Training { stage, msg: format!("qubit {q} is no longer in the compressed frame") });
    }
    Ok(())
}

/// Target width for a trained stage: exact from enumeration on small
/// registers, sampled otherwise.
fn target_width<R: Rng + ?Sized>(
    u: &Compressor,
    so_far: &[ConstraintSpec],
    next: &ConstraintSpec,
    rng: &mut R,
) -> Result<(usize, Vec<usize>)> {
    let n = u.n_qubits();
    if n <= ENUMERATION_CAP {
        let mut all = so_far.to_vec();
        all.push(next.clone());
        let f = feasible_register_states(n, &all);
        if f.is_empty() {
            return Err(Error::InvalidArgument("constraints admit no feasible state".into()));
        }
        Ok((width_for(f.len()).min(u.m()), f))
    } else {
        Ok((estimate_compressed_width(u, next, 10_000, rng)?, Vec::new()))
    }
}

/// Builds `U^(k+1) = U' U^(k)` constraint by constraint, starting from the
/// identity on `n` qubits.
pub fn compose_constraints<R: Rng + ?Sized>(
    n: usize,
    steps: &[(ConstraintSpec, Strategy)],
    rng: &mut R,
) -> Result<Composed> {
    if steps.is_empty() {
        return Err(Error::InvalidArgument("no constraints to compose".into()));
    }
    let mut u = Compressor::identity(n);
    let mut original: Vec<ConstraintSpec> = Vec::new();
    let mut reports = Vec::new();
    for (k, (c, strategy)) in steps.iter().enumerate() {
        c.validate()?;
        let report = match strategy {
            Strategy::OneHotBinary | Strategy::Parity => {
                frame_check(&u, c, k)?;
                let (stage, group_kept) = match strategy {
                    Strategy::OneHotBinary => {
                        if c.kind != ConstraintKind::OneHot {
                            return Err(Error::Training { stage: k, msg: "one-hot strategy needs a one-hot constraint".into() });
                        }
                        onehot_stage(&c.qubits)
                    }
                    _ => {
                        let odd = match c.kind {
                            ConstraintKind::ParityEven => false,
                            ConstraintKind::ParityOdd => true,
                            _ => {
                                return Err(Error::Training { stage: k, msg: "parity strategy needs a parity constraint".into() })
                            }
                        };
                        parity_stage(n, &c.qubits, odd)?
                    }
                };
                let kept: Vec<usize> = u
                    .kept()
                    .iter()
                    .copied()
                    .filter(|q| !c.qubits.contains(q) || group_kept.contains(q))
                    .collect();
                u = u.then(stage, kept)?;
                StepReport { stage: k, m: u.m(), p_sur: None, attempts: Vec::new() }
            }
            Strategy::DAnsatz { m, .. } | Strategy::CAnsatz { m, .. } => {
                let h = CompressedHamiltonian::build(c, rng)?;
                let (auto_m, feasible) = target_width(&u, &original, c, rng)?;
                if feasible.is_empty() {
                    return Err(Error::Training { stage: k, msg: "register too wide to check survival".into() });
                }
                let m = m.unwrap_or(auto_m);
                let t = match strategy {
                    Strategy::DAnsatz { config, .. } => train_d_ansatz(&u, &h, m, &feasible, config, rng)?,
                    Strategy::CAnsatz { config, .. } => train_c_ansatz(&u, &h, m, &feasible, config, rng)?,
                    _ => unreachable!(),
                };
                if !t.passed {
                    return Err(Error::Training {
                        stage: k,
                        msg: format!("survival {:.4} below threshold after {} attempts", t.p_sur, t.attempts.len()),
                    });
                }
                u = t.compressor;
                StepReport { stage: k, m: u.m(), p_sur: Some(t.p_sur), attempts: t.attempts }
            }
        };
        original.push(c.clone());
        reports.push(report);
    }
    Ok(Composed { compressor: u, steps: reports })
}
