use serde::{Deserialize, Serialize};

use super::suite::{build_instances, prepare_method, Method, Problem, SuiteConfig};
use super::{mean, stream_rng, Stream};
use crate::error::{Error, Result};
use crate::qaoa::{energy_fluctuation, Engine, QaoaConfig};
use crate::qubo::assemble;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FluctuationConfig {
    pub k: usize,
    pub sizes: Vec<usize>,
    pub layers: Vec<usize>,
    pub instances: usize,
    pub samples: usize,
    pub methods: Vec<Method>,
    /// Penalty weight for methods that reach infeasible states.
    pub penalty: f64,
}

impl Default for FluctuationConfig {
    fn default() -> Self {
        Self {
            k: 3,
            sizes: vec![3, 4, 5, 6],
            layers: vec![1, 2, 4, 8],
            instances: 10,
            samples: 100,
            methods: vec![Method::CsBinary, Method::X],
            penalty: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluctuationRow {
    pub method: Method,
    pub vertices: usize,
    pub p: usize,
    /// Instance means of the spread and of the mean energy.
    pub delta_e: f64,
    pub e_ave: f64,
    /// `delta_e / |e_ave|` of the instance means.
    pub normalized: f64,
    /// Instance mean of the per-instance ratio, over instances where it is defined.
    pub normalized_per_instance: f64,
    pub defined: usize,
}

/// Normalized energy fluctuation of Max-k cut ensembles over random angles.
pub fn fluctuation_study(cfg: &FluctuationConfig, seed: u64) -> Result<Vec<FluctuationRow>> {
    if cfg.samples < 2 || cfg.instances == 0 {
        return Err(Error::InvalidArgument("fluctuation study needs samples >= 2 and an instance".into()));
    }
    let suite = SuiteConfig::default();
    let mut out = Vec::new();
    for &vertices in &cfg.sizes {
        let problem = Problem::MaxKCut { vertices, k: cfg.k };
        let instances = build_instances(&problem, cfg.instances, seed)?;
        for &method in &cfg.methods {
            let prepared = instances
                .iter()
                .enumerate()
                .map(|(i, (_, inst))| prepare_method(inst, method, &suite, seed, i))
                .collect::<Result<Vec<_>>>()?;
            for &p in &cfg.layers {
                let (mut de, mut ea, mut nz) = (Vec::new(), Vec::new(), Vec::new());
                for pr in &prepared {
                    let ising = assemble(&pr.objective, &pr.constraint, cfg.penalty)?.ising;
                    let engine = Engine::new(QaoaConfig::new(p, pr.variants[0].mode.clone(), ising))?;
                    let mut rng = stream_rng(seed, Stream::Sampling, pr.index, p * 1024 + vertices * 8 + method as usize);
                    let f = energy_fluctuation(&engine, cfg.samples, &mut rng)?;
                    de.push(f.delta_e);
                    ea.push(f.e_ave);
                    nz.extend(f.normalized);
                }
                out.push(FluctuationRow {
                    method,
                    vertices,
                    p,
                    delta_e: mean(&de),
                    e_ave: mean(&ea),
                    normalized: mean(&de) / mean(&ea).abs(),
                    normalized_per_instance: mean(&nz),
                    defined: nz.len(),
                });
            }
        }
    }
    Ok(out)
}
