use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::engine::{Engine, Outcome};
use crate::error::{Error, Result};
use crate::optim::{powell_minimize, PowellConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeConfig {
    pub powell: PowellConfig,
    /// Random starts in addition to the all-zero start.
    pub random_starts: usize,
    /// Random starts are uniform in `[0, start_interval)`.
    pub start_interval: f64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self { powell: PowellConfig::default(), random_starts: 10, start_interval: TAU }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StartTrace {
    pub x0: Vec<f64>,
    pub energy: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaResult {
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub outcome: Outcome,
    pub starts: Vec<StartTrace>,
}

fn split(x: &[f64], p: usize) -> (&[f64], &[f64]) {
    x.split_at(p)
}

/// Powell from `(0, 0)` and from `random_starts` uniform points; the start
/// with the lowest energy wins. Parameters are laid out as `[beta.., gamma..]`.
pub fn optimize_qaoa<R: Rng + ?Sized>(
    engine: &Engine,
    optima: &[usize],
    cfg: &OptimizeConfig,
    rng: &mut R,
) -> Result<QaoaResult> {
    let p = engine.config().p;
    if p == 0 {
        return Err(Error::InvalidArgument("optimization needs p >= 1".into()));
    }
    let mut starts = vec![vec![0.0; 2 * p]];
    for _ in 0..cfg.random_starts {
        starts.push((0..2 * p).map(|_| rng.gen_range(0.0..cfg.start_interval)).collect());
    }
    let mut traces = Vec::new();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for x0 in starts {
        let mut failure = None;
        let r = powell_minimize(
            |x| {
                let (b, g) = split(x, p);
                engine.energy(b, g).unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    f64::NAN
                })
            },
            &x0,
            &cfg.powell,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let r = r?;
        traces.push(StartTrace { x0, energy: r.f, evaluations: r.evaluations, converged: r.converged });
        // later starts must beat the incumbent by more than rounding
        if best.as_ref().is_none_or(|b| r.f < b.1 - 1e-12 * (1.0 + b.1.abs())) {
            best = Some((r.x, r.f));
        }
    }
    let (x, _) = best.unwrap();
    let (b, g) = split(&x, p);
    let outcome = engine.evaluate(b, g, optima)?;
    Ok(QaoaResult { beta: b.to_vec(), gamma: g.to_vec(), outcome, starts: traces })
}

/// Outcome of a penalty scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyScan {
    pub best: f64,
    pub score: f64,
    /// Every `(A, score)` evaluated, in evaluation order.
    pub evaluated: Vec<(f64, f64)>,
    pub final_step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltySearch {
    pub lower: f64,
    pub upper: f64,
    pub precision: f64,
    /// Points of the first, coarse grid.
    pub coarse_points: usize,
}

impl PenaltySearch {
    pub fn new(lower: f64, upper: f64, precision: f64) -> Self {
        Self { lower, upper, precision, coarse_points: 5 }
    }

    /// Range and precision for Max-k cut problems.
    pub fn maxkcut() -> Self {
        Self::new(1.0, 13.0, 1.0)
    }

    /// Range and precision for QAP and QKP problems.
    pub fn weighted() -> Self {
        Self::new(10.0, 330.0, 10.0)
    }
}

/// Coarse-to-fine scan maximizing `score(A)`: a uniform grid, then repeated
/// halving of the step around the best point until the step is at most the
/// precision. Points snap to multiples of the precision; ties go to the
/// smaller `A`.
pub fn tune_penalty<F>(search: &PenaltySearch, mut score: F) -> Result<PenaltyScan>
where
    F: FnMut(f64) -> Result<f64>,
{
    let PenaltySearch { lower, upper, precision, coarse_points } = *search;
    if !(precision > 0.0) || !(upper >= lower) || lower < 0.0 || coarse_points < 2 {
        return Err(Error::InvalidArgument(format!("invalid penalty search {search:?}")));
    }
    let snap = |a: f64| ((a / precision).round() * precision).clamp(lower, upper);
    let mut evaluated: Vec<(f64, f64)> = Vec::new();
    let mut eval = |a: f64, evaluated: &mut Vec<(f64, f64)>| -> Result<f64> {
        if let Some(&(_, s)) = evaluated.iter().find(|e| (e.0 - a).abs() < 1e-9 * precision.max(1.0)) {
            return Ok(s);
        }
        let s = score(a)?;
        evaluated.push((a, s));
        Ok(s)
    };
    let pick = |evaluated: &[(f64, f64)]| {
        let mut e = evaluated.to_vec();
        e.sort_by(|a, b| a.0.total_cmp(&b.0));
        e.into_iter().fold((f64::NAN, f64::NEG_INFINITY), |acc, (a, s)| if s > acc.1 { (a, s) } else { acc })
    };
    let mut step = (upper - lower) / (coarse_points - 1) as f64;
    for i in 0..coarse_points {
        eval(snap(lower + step * i as f64), &mut evaluated)?;
    }
    while step > precision {
        step /= 2.0;
        let (a, _) = pick(&evaluated);
        eval(snap(a - step), &mut evaluated)?;
        eval(snap(a + step), &mut evaluated)?;
    }
    let (best, score) = pick(&evaluated);
    Ok(PenaltyScan { best, score, evaluated, final_step: step })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fluctuation {
    pub delta_e: f64,
    pub e_ave: f64,
    /// `delta_e / |e_ave|`; `None` when the mean vanishes.
    pub normalized: Option<f64>,
}

/// Sample standard deviation and mean of the coherent energy over parameters
/// drawn uniformly from `[0, 2 pi)`.
pub fn energy_fluctuation<R: Rng + ?Sized>(engine: &Engine, n_samples: usize, rng: &mut R) -> Result<Fluctuation> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let p = engine.config().p;
    let mut e = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let b: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..TAU)).collect();
        let g: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..TAU)).collect();
        e.push(engine.evaluate(&b, &g, &[])?.energy);
    }
    let mean = e.iter().sum::<f64>() / n_samples as f64;
    let var = e.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n_samples - 1) as f64;
    let delta_e = var.sqrt();
    Ok(Fluctuation { delta_e, e_ave: mean, normalized: (mean != 0.0).then(|| delta_e / mean.abs()) })
}
