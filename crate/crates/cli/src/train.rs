use std::time::Instant;

use anyhow::Result;
use csqaoa::compression::{
    e_direct, feasible_register_states, save_database, survival_rate, train_c_ansatz, train_d_ansatz, width_for,
    AnsatzKind, CompressedHamiltonian, Compressor, CompressorRecord, ConstraintKind, ConstraintRecord,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{load, resolve_seed, CompressorRequest, TrainFile};
use crate::output::{ensure_dir, join, write_csv, Sidecar};
use crate::{Common, Failure};

#[derive(Serialize)]
struct RecordCsv {
    request: usize,
    sample: usize,
    kind: String,
    n: usize,
    m: usize,
    ansatz: String,
    layers: usize,
    p_sur: f64,
    energy: f64,
    fs_ratio_original: f64,
    fs_ratio_compressed: f64,
    passed: bool,
    attempts: usize,
    seed: u64,
    label: String,
    params: String,
}

/// Serde name of a unit enum value.
fn tag<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|j| j.as_str().map(str::to_owned)).unwrap_or_default()
}

fn train_one(req: &CompressorRequest, cfg: &TrainFile, seed: u64) -> Result<CompressorRecord> {
    let needs_both = matches!(req.kind, ConstraintKind::Range | ConstraintKind::OneHot);
    if needs_both && (req.lower.is_none() || req.upper.is_none()) {
        return Err(Failure::Config(format!("{} constraints need both lower and upper", tag(&req.kind))).into());
    }
    let record = ConstraintRecord { kind: req.kind, a: req.a.clone(), lower: req.lower, upper: req.upper };
    let spec = record.to_spec();
    spec.validate().map_err(|e| Failure::Config(e.to_string()))?;
    let n = req.a.len();
    let feasible = feasible_register_states(n, std::slice::from_ref(&spec));
    if feasible.is_empty() {
        return Err(Failure::Config(format!("constraint {record:?} has no feasible state")).into());
    }
    let m = req.m.unwrap_or_else(|| width_for(feasible.len()));
    if m == 0 || m > n {
        return Err(Failure::Config(format!("target width {m} outside 1..={n}")).into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = CompressedHamiltonian::build(&spec, &mut rng)?;
    let base = Compressor::identity(n);
    if m == n {
        let fs = feasible.len() as f64 / (1u64 << n) as f64;
        return Ok(CompressorRecord {
            constraint: record,
            n,
            m,
            layers: 0,
            ansatz: req.ansatz,
            params: Vec::new(),
            label: (0..1usize << n).collect(),
            p_sur: survival_rate(&base, &feasible)?,
            energy: e_direct(&base, &h)?,
            fs_ratio_original: fs,
            fs_ratio_compressed: fs,
            passed: true,
            attempts: Vec::new(),
            seed,
        });
    }
    let trained = match req.ansatz {
        AnsatzKind::Discrete => train_d_ansatz(&base, &h, m, &feasible, &cfg.d_ansatz, &mut rng)?,
        AnsatzKind::Continuous => train_c_ansatz(&base, &h, m, &feasible, &cfg.c_ansatz, &mut rng)?,
    };
    Ok(CompressorRecord::from_trained(&spec, &trained, seed)?)
}

pub fn train_compressor(common: &Common) -> Result<()> {
    let mut cfg: TrainFile = load(common)?;
    let seed = resolve_seed(common, cfg.seed);
    cfg.seed = Some(seed);
    if cfg.compressor.is_empty() {
        return Err(Failure::Config("no [[compressor]] requests".into()).into());
    }
    ensure_dir(&common.out)?;
    let t0 = Instant::now();
    let mut sidecar = Sidecar::new("train-compressor", common, seed, &cfg)?;
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for (i, req) in cfg.compressor.iter().enumerate() {
        for j in 0..req.samples {
            let s = seed.wrapping_add(((i as u64) << 16) + j as u64);
            let t = Instant::now();
            let r = train_one(req, &cfg, s)?;
            sidecar.timings.insert(format!("request{i}/sample{j}"), t.elapsed().as_secs_f64());
            sidecar.instance_seeds.push(s);
            rows.push(RecordCsv {
                request: i,
                sample: j,
                kind: tag(&r.constraint.kind),
                n: r.n,
                m: r.m,
                ansatz: tag(&r.ansatz),
                layers: r.layers,
                p_sur: r.p_sur,
                energy: r.energy,
                fs_ratio_original: r.fs_ratio_original,
                fs_ratio_compressed: r.fs_ratio_compressed,
                passed: r.passed,
                attempts: r.attempts.len(),
                seed: s,
                label: join(&r.label),
                params: join(&r.params),
            });
            records.push(r);
        }
    }
    save_database(&common.out.join("compressors.json"), &records)?;
    write_csv(&common.out.join("compressors.csv"), &rows)?;
    sidecar.outputs = vec!["compressors.json".into(), "compressors.csv".into()];
    sidecar.wall_seconds = t0.elapsed().as_secs_f64();
    sidecar.write(&common.out.join("train_compressor.json"))?;
    let failed = records.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(Failure::Training(failed).into());
    }
    Ok(())
}
