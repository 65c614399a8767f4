use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use csqaoa::experiment::{build_instances, Problem};
use csqaoa::instances::{
    brute_force, derive_qkp, format_qkp, gen_qkp_benchmark, graph_instance, load_qkp, qap_instance, GraphFile,
    QapFile,
};
use csqaoa::qubo::CopInstance;
use serde::Serialize;

use crate::config::{load, relative_to_config, resolve_seed, GenFile, InstanceFormat, OracleFile};
use crate::output::{ensure_dir, join, write_csv, Sidecar};
use crate::{Common, Failure};

#[derive(Serialize)]
struct IndexRow {
    index: usize,
    seed: u64,
    n_qubits: usize,
    instance_file: String,
    native_file: String,
}

#[derive(Serialize)]
struct OracleRow {
    source: String,
    n_qubits: usize,
    optimal_value: f64,
    optima: String,
    n_feasible: usize,
    p_feasible: f64,
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(v)? + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Writes the instance in its exchange format, if it has one.
fn write_native(dir: &Path, i: usize, seed: u64, problem: &Problem, inst: &CopInstance) -> Result<String> {
    let name = match (problem, inst) {
        (_, CopInstance::MaxKCut { n_vertices, edges, .. }) => {
            let name = format!("graph_{i}.json");
            write_json(&dir.join(&name), &GraphFile { vertices: *n_vertices, edges: edges.clone() })?;
            name
        }
        (_, CopInstance::Qap { flow, distance }) => {
            let name = format!("qap_{i}.json");
            write_json(&dir.join(&name), &QapFile { f: flow.clone(), d: distance.clone() })?;
            name
        }
        (Problem::Qkp { benchmark_items, density, .. }, _) => {
            let name = format!("qkp_{i}.txt");
            let b = gen_qkp_benchmark(*benchmark_items, *density, seed)?;
            std::fs::write(dir.join(&name), format_qkp(&b))?;
            name
        }
        _ => String::new(),
    };
    Ok(name)
}

pub fn gen_instances(common: &Common) -> Result<()> {
    let mut cfg: GenFile = load(common)?;
    let seed = resolve_seed(common, cfg.seed);
    cfg.seed = Some(seed);
    ensure_dir(&common.out)?;
    let t0 = Instant::now();
    let ensemble = build_instances(&cfg.problem, cfg.count, seed)?;
    let mut rows = Vec::new();
    for (i, (s, inst)) in ensemble.iter().enumerate() {
        let instance_file = format!("instance_{i}.json");
        write_json(&common.out.join(&instance_file), inst)?;
        let native_file = write_native(&common.out, i, *s, &cfg.problem, inst)?;
        rows.push(IndexRow { index: i, seed: *s, n_qubits: inst.n_qubits(), instance_file, native_file });
    }
    write_csv(&common.out.join("instances.csv"), &rows)?;
    let mut sidecar = Sidecar::new("gen-instances", common, seed, &cfg)?;
    sidecar.instance_seeds = ensemble.iter().map(|(s, _)| *s).collect();
    sidecar.outputs = std::iter::once("instances.csv".to_string())
        .chain(rows.iter().flat_map(|r| [r.instance_file.clone(), r.native_file.clone()]))
        .filter(|s| !s.is_empty())
        .collect();
    sidecar.wall_seconds = t0.elapsed().as_secs_f64();
    sidecar.write(&common.out.join("gen_instances.json"))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())).into())
}

pub fn oracle(common: &Common) -> Result<()> {
    let mut cfg: OracleFile = load(common)?;
    let seed = resolve_seed(common, cfg.seed);
    cfg.seed = Some(seed);
    let mut todo: Vec<(String, CopInstance)> = Vec::new();
    let mut seeds = Vec::new();
    if let Some(problem) = &cfg.problem {
        for (s, inst) in build_instances(problem, cfg.count, seed)? {
            todo.push((format!("{}:{s}", problem.name()), inst));
            seeds.push(s);
        }
    }
    for f in &cfg.instance {
        let path = relative_to_config(common, &f.path);
        let need = |v: Option<usize>, what: &str| {
            v.ok_or_else(|| Failure::Config(format!("{}: format needs `{what}`", f.path.display())))
        };
        let inst = match f.format {
            InstanceFormat::Graph => graph_instance(&read_json(&path)?, need(f.k, "k")?)?,
            InstanceFormat::Qap => qap_instance(&read_json(&path)?)?,
            InstanceFormat::Qkp => derive_qkp(&load_qkp(&path)?, need(f.items, "items")?)?,
            InstanceFormat::Instance => {
                let inst: CopInstance = read_json(&path)?;
                inst.validate()?;
                inst
            }
        };
        todo.push((f.path.display().to_string(), inst));
    }
    if todo.is_empty() {
        return Err(Failure::Config("nothing to solve: give `problem` or [[instance]] entries".into()).into());
    }
    ensure_dir(&common.out)?;
    let t0 = Instant::now();
    let mut rows = Vec::new();
    for (source, inst) in &todo {
        let r = brute_force(inst).with_context(|| format!("solving {source}"))?;
        rows.push(OracleRow {
            source: source.clone(),
            n_qubits: r.n_qubits,
            optimal_value: r.optimal_value,
            optima: join(&r.optima),
            n_feasible: r.n_feasible,
            p_feasible: r.p_feasible,
        });
    }
    write_csv(&common.out.join("oracle.csv"), &rows)?;
    let mut sidecar = Sidecar::new("oracle", common, seed, &cfg)?;
    sidecar.instance_seeds = seeds;
    sidecar.outputs = vec!["oracle.csv".into()];
    sidecar.wall_seconds = t0.elapsed().as_secs_f64();
    sidecar.write(&common.out.join("oracle.json"))
}
