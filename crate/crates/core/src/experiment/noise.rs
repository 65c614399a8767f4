use serde::{Deserialize, Serialize};

use super::suite::{build_instances, prepare_method, run_suite, Method, Problem, SuiteConfig};
use super::{mean, stream_rng, Stream};
use crate::error::{Error, Result};
use crate::qaoa::{Engine, OptimizeConfig, PenaltySearch, QaoaConfig};
use crate::qubo::assemble;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub problem: Problem,
    pub p: usize,
    pub instances: usize,
    pub methods: Vec<Method>,
    pub error_rates: Vec<f64>,
    pub trajectories: usize,
    pub optimize: OptimizeConfig,
    pub penalty: Option<PenaltySearch>,
    /// Worker threads for the coherent suite.
    pub jobs: usize,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            problem: Problem::MaxKCut { vertices: 4, k: 3 },
            p: 2,
            instances: 10,
            methods: vec![Method::X, Method::CsBinary],
            error_rates: vec![1e-3, 5e-3, 1e-2],
            trajectories: 100,
            optimize: OptimizeConfig::default(),
            penalty: None,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseRow {
    pub method: Method,
    pub error_rate: f64,
    pub trajectories: usize,
    pub penalty: f64,
    /// Coherent success probability at the same angles.
    pub coherent_p_suc: f64,
    pub p_suc: f64,
    pub p_dis: f64,
    /// Instance mean of `p_suc / (1 - p_dis)`.
    pub normalized: f64,
}

/// Evaluates the coherent optimum of every method under gate noise. Angles
/// and penalty weights come from a coherent suite run on the same ensemble.
pub fn noise_sweep(cfg: &NoiseConfig, seed: u64) -> Result<Vec<NoiseRow>> {
    if cfg.error_rates.iter().any(|e| !(0.0..0.8).contains(e)) {
        return Err(Error::InvalidArgument(format!("error rates {:?} outside [0, 0.8)", cfg.error_rates)));
    }
    if cfg.methods.iter().any(Method::is_variational) {
        return Err(Error::InvalidArgument("noise sweeps take deterministic methods".into()));
    }
    let suite = SuiteConfig {
        p: cfg.p,
        instances: cfg.instances,
        methods: cfg.methods.clone(),
        optimize: cfg.optimize.clone(),
        penalty: cfg.penalty.clone(),
        jobs: cfg.jobs,
        ..SuiteConfig::default()
    };
    let coherent = run_suite(&cfg.problem, &suite, seed)?;
    let instances = build_instances(&cfg.problem, cfg.instances, seed)?;
    let mut out = Vec::new();
    for &method in &cfg.methods {
        let rows: Vec<_> = coherent.rows.iter().filter(|r| r.method == method).collect();
        let mut engines = Vec::new();
        for r in &rows {
            let pr = prepare_method(&instances[r.instance].1, method, &suite, seed, r.instance)?;
            let ising = assemble(&pr.objective, &pr.constraint, r.penalty)?.ising;
            let engine = Engine::new(QaoaConfig::new(cfg.p, pr.variants[0].mode.clone(), ising))?;
            engines.push((engine, pr.optima));
        }
        for (e_idx, &eps) in cfg.error_rates.iter().enumerate() {
            let mut suc = Vec::new();
            let mut dis = Vec::new();
            let mut norm = Vec::new();
            for (r, (engine, optima)) in rows.iter().zip(engines.iter_mut()) {
                let mut rng = stream_rng(seed, Stream::Trajectories, r.instance, e_idx * 8 + method as usize);
                let o = engine.evaluate_noisy(&r.beta, &r.gamma, optima, eps, cfg.trajectories, &mut rng)?;
                suc.push(o.p_suc);
                dis.push(o.p_dis);
                norm.push(if o.p_dis < 1.0 { o.p_suc / (1.0 - o.p_dis) } else { 0.0 });
            }
            out.push(NoiseRow {
                method,
                error_rate: eps,
                trajectories: cfg.trajectories,
                penalty: coherent.summary(method).map_or(f64::NAN, |s| s.penalty),
                coherent_p_suc: mean(&rows.iter().map(|r| r.p_suc).collect::<Vec<_>>()),
                p_suc: mean(&suc),
                p_dis: mean(&dis),
                normalized: mean(&norm),
            });
        }
    }
    Ok(out)
}
