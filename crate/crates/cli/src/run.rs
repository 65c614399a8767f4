use std::time::Instant;

use anyhow::Result;
use csqaoa::experiment::{fluctuation_study, noise_sweep, run_suite, Problem, SuiteReport};
use serde::Serialize;

use crate::config::{load, resolve_seed, NoiseFile, RunConfig};
use crate::output::{ensure_dir, join, write_csv, Sidecar};
use crate::{Common, Failure};

#[derive(Serialize)]
struct SummaryRow<'a> {
    problem: &'a str,
    size: usize,
    method: &'a str,
    p: usize,
    instances: usize,
    penalty: f64,
    penalty_free: bool,
    penalty_evaluations: usize,
    mean_p_suc: f64,
    std_p_suc: f64,
    mean_p_dis: f64,
    mean_sample_std: f64,
    seed: u64,
}

#[derive(Serialize)]
struct InstanceCsv<'a> {
    problem: &'a str,
    size: usize,
    method: &'a str,
    p: usize,
    instance: usize,
    instance_seed: u64,
    penalty: f64,
    p_suc: f64,
    p_dis: f64,
    energy: f64,
    sample_std: f64,
    samples: String,
    p_sur: String,
    compressors_passed: usize,
    beta: String,
    gamma: String,
}

#[derive(Serialize)]
struct ScanRow<'a> {
    problem: &'a str,
    size: usize,
    method: &'a str,
    p: usize,
    penalty: f64,
    mean_p_suc: f64,
}

#[derive(Serialize)]
struct FluctuationCsv<'a> {
    method: &'a str,
    vertices: usize,
    p: usize,
    delta_e: f64,
    e_ave: f64,
    normalized: f64,
    normalized_per_instance: f64,
    defined: usize,
}

#[derive(Serialize)]
struct NoiseCsv<'a> {
    problem: &'a str,
    size: usize,
    method: &'a str,
    p: usize,
    error_rate: f64,
    trajectories: usize,
    penalty: f64,
    coherent_p_suc: f64,
    p_suc: f64,
    p_dis: f64,
    normalized: f64,
}

fn with_size(problem: &Problem, size: usize) -> Result<Problem, Failure> {
    Ok(match problem.clone() {
        Problem::Toy => return Err(Failure::Config("the toy problem has no size to sweep".into())),
        Problem::MaxKCut { k, .. } => Problem::MaxKCut { vertices: size, k },
        Problem::Qap { .. } => Problem::Qap { facilities: size },
        Problem::Qkp { benchmark_items, density, feasible_ratio, .. } => {
            Problem::Qkp { items: size, benchmark_items, density, feasible_ratio }
        }
    })
}

pub fn run_qaoa(common: &Common) -> Result<()> {
    let mut cfg: RunConfig = load(common)?;
    let seed = resolve_seed(common, cfg.seed);
    cfg.seed = Some(seed);
    if let Some(j) = common.jobs {
        cfg.suite.jobs = j;
    }
    let problems = if cfg.sizes.is_empty() {
        vec![cfg.problem.clone()]
    } else {
        cfg.sizes.iter().map(|&s| with_size(&cfg.problem, s)).collect::<Result<_, _>>()?
    };
    let layers = if cfg.layers.is_empty() { vec![cfg.suite.p] } else { cfg.layers.clone() };
    ensure_dir(&common.out)?;

    let t0 = Instant::now();
    let mut sidecar = Sidecar::new("run-qaoa", common, seed, &cfg)?;
    sidecar.jobs = cfg.suite.jobs;
    let mut reports: Vec<SuiteReport> = Vec::new();
    for problem in &problems {
        for &p in &layers {
            let suite = csqaoa::experiment::SuiteConfig { p, ..cfg.suite.clone() };
            let r = run_suite(problem, &suite, seed)?;
            for s in &r.summaries {
                let key = format!("{}/{}/{}/p{}", problem.name(), problem.size(), s.method.name(), p);
                sidecar.timings.insert(key, s.seconds);
            }
            reports.push(r);
        }
    }

    let mut summaries = Vec::new();
    let mut rows = Vec::new();
    let mut scans = Vec::new();
    for r in &reports {
        let (name, size) = (r.problem.name(), r.problem.size());
        for s in &r.summaries {
            summaries.push(SummaryRow {
                problem: name,
                size,
                method: s.method.name(),
                p: r.p,
                instances: r.rows.iter().filter(|row| row.method == s.method).count(),
                penalty: s.penalty,
                penalty_free: s.penalty_free,
                penalty_evaluations: s.scan.evaluated.len(),
                mean_p_suc: s.mean_p_suc,
                std_p_suc: s.std_p_suc,
                mean_p_dis: s.mean_p_dis,
                mean_sample_std: s.mean_sample_std,
                seed: r.seed,
            });
            for &(a, score) in &s.scan.evaluated {
                scans.push(ScanRow { problem: name, size, method: s.method.name(), p: r.p, penalty: a, mean_p_suc: score });
            }
        }
        for row in &r.rows {
            if !sidecar.instance_seeds.contains(&row.instance_seed) {
                sidecar.instance_seeds.push(row.instance_seed);
            }
            rows.push(InstanceCsv {
                problem: name,
                size,
                method: row.method.name(),
                p: r.p,
                instance: row.instance,
                instance_seed: row.instance_seed,
                penalty: row.penalty,
                p_suc: row.p_suc,
                p_dis: row.p_dis,
                energy: row.energy,
                sample_std: row.sample_std,
                samples: join(&row.samples),
                p_sur: join(&row.p_sur),
                compressors_passed: row.compressors_passed,
                beta: join(&row.beta),
                gamma: join(&row.gamma),
            });
        }
    }
    write_csv(&common.out.join("run_qaoa.csv"), &summaries)?;
    write_csv(&common.out.join("run_qaoa_instances.csv"), &rows)?;
    write_csv(&common.out.join("run_qaoa_penalty.csv"), &scans)?;
    sidecar.outputs = vec!["run_qaoa.csv".into(), "run_qaoa_instances.csv".into(), "run_qaoa_penalty.csv".into()];

    if let Some(fc) = &cfg.fluctuation {
        let t = Instant::now();
        let fr = fluctuation_study(fc, seed)?;
        let out: Vec<_> = fr
            .iter()
            .map(|r| FluctuationCsv {
                method: r.method.name(),
                vertices: r.vertices,
                p: r.p,
                delta_e: r.delta_e,
                e_ave: r.e_ave,
                normalized: r.normalized,
                normalized_per_instance: r.normalized_per_instance,
                defined: r.defined,
            })
            .collect();
        write_csv(&common.out.join("fluctuation.csv"), &out)?;
        sidecar.outputs.push("fluctuation.csv".into());
        sidecar.timings.insert("fluctuation".into(), t.elapsed().as_secs_f64());
    }
    sidecar.wall_seconds = t0.elapsed().as_secs_f64();
    sidecar.write(&common.out.join("run_qaoa.json"))
}

pub fn sweep_noise(common: &Common) -> Result<()> {
    let mut cfg: NoiseFile = load(common)?;
    let seed = resolve_seed(common, cfg.seed);
    cfg.seed = Some(seed);
    if let Some(j) = common.jobs {
        cfg.noise.jobs = j;
    }
    if cfg.noise.error_rates.iter().any(|e| !e.is_finite()) {
        return Err(Failure::Config("error rates must be finite".into()).into());
    }
    ensure_dir(&common.out)?;
    let t0 = Instant::now();
    let rows = noise_sweep(&cfg.noise, seed)?;
    let problem = &cfg.noise.problem;
    let out: Vec<_> = rows
        .iter()
        .map(|r| NoiseCsv {
            problem: problem.name(),
            size: problem.size(),
            method: r.method.name(),
            p: cfg.noise.p,
            error_rate: r.error_rate,
            trajectories: r.trajectories,
            penalty: r.penalty,
            coherent_p_suc: r.coherent_p_suc,
            p_suc: r.p_suc,
            p_dis: r.p_dis,
            normalized: r.normalized,
        })
        .collect();
    write_csv(&common.out.join("noise.csv"), &out)?;
    let mut sidecar = Sidecar::new("sweep-noise", common, seed, &cfg)?;
    sidecar.jobs = cfg.noise.jobs;
    sidecar.instance_seeds =
        csqaoa::experiment::build_instances(problem, cfg.noise.instances, seed)?.iter().map(|(s, _)| *s).collect();
    sidecar.outputs = vec!["noise.csv".into()];
    sidecar.wall_seconds = t0.elapsed().as_secs_f64();
    sidecar.write(&common.out.join("noise.json"))
}
