use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{mean, median, sample_std, stream_rng, Stream};
use crate::compression::{
    build_onehot_product, build_qap_compressor, train_c_ansatz, train_d_ansatz, width_for, CTrainConfig,
    CompressedHamiltonian, Compressor, ConstraintSpec, DTrainConfig, Trained,
};
use crate::error::{Error, Result};
use crate::instances::{brute_force, derive_qkp, gen_maxkcut, gen_qap, gen_qkp_benchmark, toy_instance};
use crate::qaoa::{optimize_qaoa, tune_penalty, Engine, Mode, OptimizeConfig, PenaltyScan, PenaltySearch, QaoaConfig};
use crate::qubo::{assemble, CopInstance, Qubo};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Problem {
    /// The two-variable example instance.
    Toy,
    MaxKCut {
        vertices: usize,
        k: usize,
    },
    Qap {
        facilities: usize,
    },
    /// Sub-instances of synthetic benchmarks, admitted when `p_F` lies in
    /// `feasible_ratio`.
    Qkp {
        items: usize,
        #[serde(default = "default_benchmark_items")]
        benchmark_items: usize,
        #[serde(default = "default_density")]
        density: f64,
        #[serde(default = "default_feasible_ratio")]
        feasible_ratio: (f64, f64),
    },
}

fn default_benchmark_items() -> usize {
    100
}

fn default_density() -> f64 {
    0.5
}

fn default_feasible_ratio() -> (f64, f64) {
    (0.1, 0.5)
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::Toy => "toy",
            Problem::MaxKCut { .. } => "maxkcut",
            Problem::Qap { .. } => "qap",
            Problem::Qkp { .. } => "qkp",
        }
    }

    /// `|V_m|`, `n_f` or `n_i`.
    pub fn size(&self) -> usize {
        match *self {
            Problem::Toy => 2,
            Problem::MaxKCut { vertices, .. } => vertices,
            Problem::Qap { facilities } => facilities,
            Problem::Qkp { items, .. } => items,
        }
    }

    pub fn default_penalty(&self) -> PenaltySearch {
        match self {
            Problem::MaxKCut { .. } | Problem::Toy => PenaltySearch::maxkcut(),
            _ => PenaltySearch::weighted(),
        }
    }
}

/// Give up on an ensemble after this many rejected QKP candidates.
const MAX_CANDIDATES: usize = 10_000;

/// Seeded ensemble of `count` instances with their generator seeds.
pub fn build_instances(problem: &Problem, count: usize, seed: u64) -> Result<Vec<(u64, CopInstance)>> {
    match *problem {
        Problem::Toy => Ok((0..count as u64).map(|i| (seed + i, toy_instance())).collect()),
        Problem::MaxKCut { vertices, k } => (0..count as u64)
            .map(|i| Ok((seed + i, gen_maxkcut(vertices, k, seed + i)?)))
            .collect(),
        Problem::Qap { facilities } => {
            (0..count as u64).map(|i| Ok((seed + i, gen_qap(facilities, seed + i)?))).collect()
        }
        Problem::Qkp { items, benchmark_items, density, feasible_ratio: (lo, hi) } => {
            let mut out = Vec::new();
            for j in 0..MAX_CANDIDATES as u64 {
                if out.len() == count {
                    break;
                }
                let b = gen_qkp_benchmark(benchmark_items, density, seed + j)?;
                let inst = derive_qkp(&b, items)?;
                let report = brute_force(&inst)?;
                if (lo..=hi).contains(&report.p_feasible) {
                    out.push((seed + j, inst));
                }
            }
            if out.len() < count {
                return Err(Error::InvalidArgument(format!(
                    "only {} of {count} candidates have p_F in [{lo}, {hi}]",
                    out.len()
                )));
            }
            Ok(out)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    X,
    Xy,
    /// Deterministic compression of every one-hot group to binary.
    CsBinary,
    /// Binary compression followed by the parity stages (QAP only).
    CsBinaryParity,
    CsDAnsatz,
    CsCAnsatz,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::X => "x",
            Method::Xy => "xy",
            Method::CsBinary => "cs_binary",
            Method::CsBinaryParity => "cs_binary_parity",
            Method::CsDAnsatz => "cs_d_ansatz",
            Method::CsCAnsatz => "cs_c_ansatz",
        }
    }

    pub fn is_variational(&self) -> bool {
        matches!(self, Method::CsDAnsatz | Method::CsCAnsatz)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub p: usize,
    pub instances: usize,
    pub methods: Vec<Method>,
    pub optimize: OptimizeConfig,
    /// Defaults to the problem's usual range and precision.
    pub penalty: Option<PenaltySearch>,
    /// Trained compressors per instance for variational methods.
    pub compressor_samples: usize,
    pub d_ansatz: DTrainConfig,
    pub c_ansatz: CTrainConfig,
    /// Worker threads over instances; results do not depend on it.
    pub jobs: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            p: 5,
            instances: 10,
            methods: vec![Method::X, Method::CsBinary],
            optimize: OptimizeConfig::default(),
            penalty: None,
            compressor_samples: 5,
            d_ansatz: DTrainConfig::default(),
            c_ansatz: CTrainConfig::default(),
            jobs: 1,
        }
    }
}

/// One way of running QAOA on one instance.
#[derive(Clone, Debug)]
pub struct Variant {
    pub mode: Mode,
    /// The constraint term is constant on every state the run can reach, so
    /// the penalty weight cannot change the dynamics.
    pub penalty_free: bool,
    pub p_sur: Option<f64>,
    pub passed: bool,
}

/// An instance ready for a method: objective, constraint term, optimal set
/// and the variants whose median is reported.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub index: usize,
    pub seed: u64,
    pub objective: Qubo,
    pub constraint: Qubo,
    pub optima: Vec<usize>,
    pub variants: Vec<Variant>,
}

fn constant_on(q: &Qubo, states: &[usize]) -> bool {
    let v0 = q.evaluate(states[0]);
    states.iter().all(|&x| (q.evaluate(x) - v0).abs() <= 1e-12 * (1.0 + v0.abs()))
}

fn cs_variant(c: Compressor, constraint: &Qubo, p_sur: Option<f64>, passed: bool) -> Variant {
    let penalty_free = c.label().is_some_and(|l| constant_on(constraint, &l));
    Variant { mode: Mode::Cs { compressor: c }, penalty_free, p_sur, passed }
}

fn trained_variants(
    inst: &CopInstance,
    constraint: &Qubo,
    method: Method,
    cfg: &SuiteConfig,
    seed: u64,
    index: usize,
) -> Result<Vec<Variant>> {
    let cs = inst.constraints();
    if cs.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "variational compression takes one constraint, the instance has {}",
            cs.len()
        )));
    }
    let spec = ConstraintSpec::from_linear(&cs[0]);
    let n = inst.n_qubits();
    let feasible: Vec<usize> = (0..1usize << n).filter(|&x| inst.check_feasible(x)).collect();
    let m = width_for(feasible.len()).min(n);
    let base = Compressor::identity(n);
    (0..cfg.compressor_samples)
        .map(|s| {
            let mut rng = stream_rng(seed, Stream::Training, index, s * 8 + method as usize);
            let h = CompressedHamiltonian::build(&spec, &mut rng)?;
            let t: Trained = match method {
                Method::CsDAnsatz => train_d_ansatz(&base, &h, m, &feasible, &cfg.d_ansatz, &mut rng)?,
                _ => train_c_ansatz(&base, &h, m, &feasible, &cfg.c_ansatz, &mut rng)?,
            };
            Ok(cs_variant(t.compressor, constraint, Some(t.p_sur), t.passed))
        })
        .collect()
}

/// Builds the variants of `method` for one instance. Training draws from a
/// stream derived from `(seed, index)`.
pub fn prepare_method(
    inst: &CopInstance,
    method: Method,
    cfg: &SuiteConfig,
    seed: u64,
    index: usize,
) -> Result<Prepared> {
    let enc = inst.encode()?;
    let optima = brute_force(inst)?.optima;
    let n = inst.n_qubits();
    let unsupported = || Error::InvalidArgument(format!("method {} does not apply to {}", method.name(), inst.kind_name()));
    let single = |mode: Mode| Variant { mode, penalty_free: false, p_sur: None, passed: true };
    let variants = match method {
        Method::X => vec![single(Mode::X)],
        Method::Xy => match inst {
            _ if !inst.one_hot_groups().is_empty() => {
                let groups = inst.one_hot_groups();
                let support: Vec<usize> = groups.iter().fold(vec![0usize], |acc, g| {
                    acc.iter().flat_map(|&x| g.iter().map(move |&q| x | (1 << q))).collect()
                });
                let penalty_free = constant_on(&enc.constraint, &support);
                vec![Variant { mode: Mode::Xy { groups }, penalty_free, p_sur: None, passed: true }]
            }
            _ => return Err(unsupported()),
        },
        Method::CsBinary => match inst {
            CopInstance::MaxKCut { .. } | CopInstance::Generic { .. } if !inst.one_hot_groups().is_empty() => {
                vec![cs_variant(build_onehot_product(n, &inst.one_hot_groups())?, &enc.constraint, None, true)]
            }
            CopInstance::Qap { flow, .. } => {
                vec![cs_variant(build_qap_compressor(flow.len(), false)?, &enc.constraint, None, true)]
            }
            _ => return Err(unsupported()),
        },
        Method::CsBinaryParity => match inst {
            CopInstance::Qap { flow, .. } => {
                vec![cs_variant(build_qap_compressor(flow.len(), true)?, &enc.constraint, None, true)]
            }
            _ => return Err(unsupported()),
        },
        Method::CsDAnsatz | Method::CsCAnsatz => trained_variants(inst, &enc.constraint, method, cfg, seed, index)?,
    };
    Ok(Prepared { index, seed, objective: enc.objective, constraint: enc.constraint, optima, variants })
}

/// Per-instance outcome at the tuned penalty weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub method: Method,
    pub instance: usize,
    pub instance_seed: u64,
    pub penalty: f64,
    /// Median over the variants.
    pub p_suc: f64,
    pub p_dis: f64,
    pub energy: f64,
    /// Per-variant success probabilities.
    pub samples: Vec<f64>,
    pub sample_std: f64,
    pub p_sur: Vec<f64>,
    pub compressors_passed: usize,
    /// Angles of the first variant.
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub penalty: f64,
    pub penalty_free: bool,
    pub scan: PenaltyScan,
    pub mean_p_suc: f64,
    /// Spread over instances.
    pub std_p_suc: f64,
    pub mean_p_dis: f64,
    /// Mean over instances of the spread over variants.
    pub mean_sample_std: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub problem: Problem,
    pub p: usize,
    pub seed: u64,
    pub summaries: Vec<MethodSummary>,
    pub rows: Vec<InstanceRow>,
}

impl SuiteReport {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }
}

fn run_instance(pr: &Prepared, method: Method, a: f64, cfg: &SuiteConfig, seed: u64) -> Result<InstanceRow> {
    let ising = assemble(&pr.objective, &pr.constraint, a)?.ising;
    let mut samples = Vec::new();
    let mut discards = Vec::new();
    let mut energies = Vec::new();
    let mut first = None;
    for (v, var) in pr.variants.iter().enumerate() {
        let engine = Engine::new(QaoaConfig::new(cfg.p, var.mode.clone(), ising.clone()))?;
        let (beta, gamma, outcome) = if cfg.p == 0 {
            (Vec::new(), Vec::new(), engine.evaluate(&[], &[], &pr.optima)?)
        } else {
            // common random starts across penalty weights
            let mut rng = stream_rng(seed, Stream::Starts, pr.index, v * 8 + method as usize);
            let r = optimize_qaoa(&engine, &pr.optima, &cfg.optimize, &mut rng)?;
            (r.beta, r.gamma, r.outcome)
        };
        samples.push(outcome.p_suc);
        discards.push(outcome.p_dis);
        energies.push(outcome.energy);
        first.get_or_insert((beta, gamma));
    }
    let (beta, gamma) = first.unwrap_or_default();
    Ok(InstanceRow {
        method,
        instance: pr.index,
        instance_seed: pr.seed,
        penalty: a,
        p_suc: median(&samples),
        p_dis: median(&discards),
        energy: median(&energies),
        sample_std: sample_std(&samples),
        samples,
        p_sur: pr.variants.iter().filter_map(|v| v.p_sur).collect(),
        compressors_passed: pr.variants.iter().filter(|v| v.passed).count(),
        beta,
        gamma,
    })
}

fn run_at(prepared: &[Prepared], method: Method, a: f64, cfg: &SuiteConfig, seed: u64) -> Result<Vec<InstanceRow>> {
    let jobs = cfg.jobs.clamp(1, prepared.len().max(1));
    if jobs == 1 {
        return prepared.iter().map(|pr| run_instance(pr, method, a, cfg, seed)).collect();
    }
    let chunk = prepared.len().div_ceil(jobs);
    std::thread::scope(|scope| {
        let handles: Vec<_> = prepared
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || part.iter().map(|pr| run_instance(pr, method, a, cfg, seed)).collect::<Result<Vec<_>>>())
            })
            .collect();
        let mut rows = Vec::new();
        for h in handles {
            rows.extend(h.join().expect("worker panicked")?);
        }
        Ok(rows)
    })
}

/// Prepares every instance for `method`, tunes the penalty weight for the
/// ensemble-mean success probability and reports the rows at the optimum.
/// Methods whose reachable states all share one constraint value skip the
/// scan and use the lower end of the range.
pub fn run_suite(problem: &Problem, cfg: &SuiteConfig, seed: u64) -> Result<SuiteReport> {
    if cfg.instances == 0 || cfg.methods.is_empty() {
        return Err(Error::InvalidArgument("suite needs an instance and a method".into()));
    }
    let instances = build_instances(problem, cfg.instances, seed)?;
    let mut summaries = Vec::new();
    let mut rows = Vec::new();
    for &method in &cfg.methods {
        let start = Instant::now();
        let prepared: Vec<Prepared> = instances
            .iter()
            .enumerate()
            .map(|(i, (s, inst))| prepare_method(inst, method, cfg, seed, i).map(|mut p| {
                p.seed = *s;
                p
            }))
            .collect::<Result<_>>()?;
        let penalty_free = prepared.iter().all(|p| p.variants.iter().all(|v| v.penalty_free));
        let mut search = cfg.penalty.clone().unwrap_or_else(|| problem.default_penalty());
        if penalty_free {
            search.upper = search.lower;
        }
        let mut cache: BTreeMap<u64, Vec<InstanceRow>> = BTreeMap::new();
        let scan = tune_penalty(&search, |a| {
            let r = run_at(&prepared, method, a, cfg, seed)?;
            let score = mean(&r.iter().map(|x| x.p_suc).collect::<Vec<_>>());
            cache.insert(a.to_bits(), r);
            Ok(score)
        })?;
        let best = cache.remove(&scan.best.to_bits()).expect("scanned point is cached");
        let col = |f: fn(&InstanceRow) -> f64| best.iter().map(f).collect::<Vec<_>>();
        summaries.push(MethodSummary {
            method,
            penalty: scan.best,
            penalty_free,
            mean_p_suc: mean(&col(|r| r.p_suc)),
            std_p_suc: sample_std(&col(|r| r.p_suc)),
            mean_p_dis: mean(&col(|r| r.p_dis)),
            mean_sample_std: mean(&col(|r| r.sample_std)),
            scan,
            seconds: start.elapsed().as_secs_f64(),
        });
        rows.extend(best);
    }
    Ok(SuiteReport { problem: problem.clone(), p: cfg.p, seed, summaries, rows })
}
