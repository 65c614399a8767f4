//! Single-bit-flip Metropolis annealing over bitstrings.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaConfig {
    pub n_loop: usize,
    pub t_initial: f64,
    pub t_final: f64,
    /// Stop once the best value reaches this target.
    pub target: Option<f64>,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self { n_loop: 1000, t_initial: 10.0, t_final: 0.1, target: None }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_loop == 0 || !(self.t_final > 0.0) || self.t_initial < self.t_final {
            return Err(Error::InvalidArgument(format!(
                "annealing needs n_loop >= 1 and T_i >= T_f > 0, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Temperature of outer loop `t`: `T_i (T_f / T_i)^(t / (n_loop - 1))`.
    pub fn temperature(&self, t: usize) -> f64 {
        if self.n_loop <= 1 {
            return self.t_initial;
        }
        let s = t as f64 / (self.n_loop - 1) as f64;
        self.t_initial * (self.t_final / self.t_initial).powf(s)
    }
}

#[derive(Clone, Debug)]
pub struct SaResult {
    pub bits: Vec<bool>,
    pub f: f64,
    pub evaluations: usize,
}

/// Anneals `f` from a uniformly random start. Each outer loop proposes
/// `n_bits` flips of uniformly chosen bits; the best state seen is returned.
pub fn anneal_binary<F, R>(mut f: F, n_bits: usize, config: &SaConfig, rng: &mut R) -> Result<SaResult>
where
    F: FnMut(&[bool]) -> f64,
    R: Rng + ?Sized,
{
    config.validate()?;
    if n_bits == 0 {
        return Err(Error::InvalidArgument("annealing needs at least one bit".into()));
    }
    let mut bits: Vec<bool> = (0..n_bits).map(|_| rng.gen()).collect();
    let mut cur = f(&bits);
    let mut evaluations = 1;
    let mut best = bits.clone();
    let mut best_f = cur;
    'outer: for t in 0..config.n_loop {
        let temp = config.temperature(t);
        for _ in 0..n_bits {
            if config.target.is_some_and(|tg| best_f <= tg) {
                break 'outer;
            }
            let j = rng.gen_range(0..n_bits);
            bits[j] = !bits[j];
            let cand = f(&bits);
            evaluations += 1;
            let delta = cand - cur;
            if delta <= 0.0 || rng.gen::<f64>() < (-delta / temp).exp() {
                cur = cand;
                if cur < best_f {
                    best_f = cur;
                    best.clone_from(&bits);
                }
            } else {
                bits[j] = !bits[j];
            }
        }
    }
    Ok(SaResult { bits: best, f: best_f, evaluations })
}
