use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_csqaoa"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Runs a subcommand and returns its exit code.
fn run(cmd: &str, config: Option<&Path>, out: &Path, extra: &[&str]) -> i32 {
    let mut c = bin();
    c.arg(cmd).arg("--out").arg(out).args(extra);
    if let Some(cfg) = config {
        c.arg("--config").arg(cfg);
    }
    let o = c.output().unwrap();
    if !o.status.success() {
        eprintln!("{}", String::from_utf8_lossy(&o.stderr));
    }
    o.status.code().unwrap()
}

fn read_csv(path: &Path) -> Vec<std::collections::HashMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| headers.iter().zip(rec.unwrap().iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect())
        .collect()
}

const TOY: &str = r#"
seed = 0
layers = [0, 1]

[problem]
kind = "toy"

[suite]
instances = 1
methods = ["cs_binary", "x"]
"#;

#[test]
fn toy_p0_success_is_one_half_for_compressed_mode() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "toy.toml", TOY);
    let out = dir.path().join("out");
    assert_eq!(run("run-qaoa", Some(&cfg), &out, &[]), 0);
    let rows = read_csv(&out.join("run_qaoa.csv"));
    let cs0 = rows.iter().find(|r| r["method"] == "cs_binary" && r["p"] == "0").unwrap();
    let p: f64 = cs0["mean_p_suc"].parse().unwrap();
    assert!((p - 0.5).abs() < 1e-12, "{p}");
    for r in read_csv(&out.join("run_qaoa_instances.csv")).iter().filter(|r| r["method"] == "cs_binary") {
        assert_eq!(r["p_dis"].parse::<f64>().unwrap(), 0.0);
    }
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("run_qaoa.json")).unwrap()).unwrap();
    assert_eq!(side["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(side["seed"], 0);
    assert_eq!(side["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "toy.toml", TOY);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("run-qaoa", Some(&cfg), &a, &["--jobs", "1"]), 0);
    assert_eq!(run("run-qaoa", Some(&cfg), &b, &["--jobs", "2"]), 0);
    for f in ["run_qaoa.csv", "run_qaoa_instances.csv", "run_qaoa_penalty.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "g.toml", "seed = 3\ncount = 2\n[problem]\nkind = \"qap\"\nfacilities = 3\n");
    let out = dir.path().join("out");
    assert_eq!(run("gen-instances", Some(&cfg), &out, &["--seed", "7"]), 0);
    let rows = read_csv(&out.join("instances.csv"));
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("gen_instances.json")).unwrap()).unwrap();
    assert_eq!(side["seed"], 7);
    assert_eq!(rows.len(), 2);
    assert!(out.join("qap_1.json").is_file());
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cases = [
        "seed = 0\nbogus = 1\n[problem]\nkind = \"toy\"\n",
        "[problem]\nkind = \"toy\"\nbogus = 1\n",
        "[problem]\nkind = \"max_k_cut\"\nvertices = 3\nk = 3\ncolours = 2\n",
        "[problem]\nkind = \"toy\"\n[suite]\nmethods = [\"nope\"]\n",
        "[problem\nkind = \"toy\"\n",
        "[problem]\nkind = \"toy\"\n[suite]\ninstances = 1\n[suite.powell]\nsteps = 3\n",
    ];
    for (i, text) in cases.iter().enumerate() {
        let cfg = write(dir.path(), &format!("bad{i}.toml"), text);
        assert_eq!(run("run-qaoa", Some(&cfg), &out, &[]), 2, "case {i}: {text}");
    }
    let missing = dir.path().join("missing.toml");
    assert_eq!(run("run-qaoa", Some(&missing), &out, &[]), 2);
    let sized = write(dir.path(), "sized.toml", "sizes = [3]\n[problem]\nkind = \"toy\"\n");
    assert_eq!(run("run-qaoa", Some(&sized), &out, &[]), 2);
}

#[test]
fn training_below_threshold_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "t.toml",
        r#"
[[compressor]]
kind = "upper_only"
a = [1, 1, 1]
upper = 1
ansatz = "discrete"
m = 1

[d_ansatz.sa]
n_loop = 20

[d_ansatz.escalation]
max_doublings = 0
max_extra_layers = 0
"#,
    );
    let out = dir.path().join("out");
    assert_eq!(run("train-compressor", Some(&cfg), &out, &[]), 3);
    let rows = read_csv(&out.join("compressors.csv"));
    assert_eq!(rows[0]["passed"], "false");
    assert!(out.join("compressors.json").is_file());
}

#[test]
fn oracle_size_cap_exits_4() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "o.toml", "count = 1\n[problem]\nkind = \"max_k_cut\"\nvertices = 12\nk = 4\n");
    assert_eq!(run("oracle", Some(&cfg), &dir.path().join("out"), &[]), 4);
}

#[test]
fn trained_range_compressor_record() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "t.toml",
        r#"
[[compressor]]
kind = "range"
a = [1, 1, 1]
lower = 0
upper = 1
ansatz = "discrete"

[[compressor]]
kind = "upper_only"
a = [1, 1, 1]
upper = 1
ansatz = "continuous"
m = 3
"#,
    );
    let out = dir.path().join("out");
    assert_eq!(run("train-compressor", Some(&cfg), &out, &[]), 0);
    let rows = read_csv(&out.join("compressors.csv"));
    assert_eq!(rows.len(), 2);
    let r = &rows[0];
    assert_eq!(r["m"], "2");
    assert_eq!(r["p_sur"].parse::<f64>().unwrap(), 1.0);
    assert_eq!(r["fs_ratio_original"].parse::<f64>().unwrap(), 0.5);
    assert_eq!(r["fs_ratio_compressed"].parse::<f64>().unwrap(), 1.0);
    let mut label: Vec<usize> = r["label"].split(';').map(|s| s.parse().unwrap()).collect();
    label.sort();
    assert_eq!(label, [0, 1, 2, 4]);
    let id = &rows[1];
    assert_eq!((id["m"].as_str(), id["layers"].as_str(), id["passed"].as_str()), ("3", "0", "true"));
    assert_eq!(id["label"], "0;1;2;3;4;5;6;7");
    let db: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("compressors.json")).unwrap()).unwrap();
    assert!(db.is_array() || db.is_object());
}

#[test]
fn generated_instances_round_trip_through_oracle() {
    let dir = TempDir::new().unwrap();
    let gen = write(dir.path(), "g.toml", "count = 2\n[problem]\nkind = \"max_k_cut\"\nvertices = 4\nk = 3\n");
    let out = dir.path().join("inst");
    assert_eq!(run("gen-instances", Some(&gen), &out, &[]), 0);
    let by_problem = write(dir.path(), "o1.toml", "count = 2\n[problem]\nkind = \"max_k_cut\"\nvertices = 4\nk = 3\n");
    let a = dir.path().join("a");
    assert_eq!(run("oracle", Some(&by_problem), &a, &[]), 0);
    let files = write(
        &out,
        "o2.toml",
        "[[instance]]\npath = \"graph_0.json\"\nformat = \"graph\"\nk = 3\n\
         [[instance]]\npath = \"instance_1.json\"\nformat = \"instance\"\n",
    );
    let b = dir.path().join("b");
    assert_eq!(run("oracle", Some(&files), &b, &[]), 0);
    let (ra, rb) = (read_csv(&a.join("oracle.csv")), read_csv(&b.join("oracle.csv")));
    assert_eq!(ra.len(), 2);
    for (x, y) in ra.iter().zip(&rb) {
        for col in ["n_qubits", "optimal_value", "optima", "n_feasible"] {
            assert_eq!(x[col], y[col], "{col}");
        }
    }
    assert_eq!(ra[0]["n_feasible"], "27");
}

#[test]
fn qkp_benchmark_file_round_trip() {
    let dir = TempDir::new().unwrap();
    let gen = write(
        dir.path(),
        "g.toml",
        "count = 1\n[problem]\nkind = \"qkp\"\nitems = 4\nbenchmark_items = 30\ndensity = 0.5\nfeasible_ratio = [0.1, 0.5]\n",
    );
    let out = dir.path().join("inst");
    assert_eq!(run("gen-instances", Some(&gen), &out, &[]), 0);
    assert!(out.join("qkp_0.txt").is_file());
    let o = write(&out, "o.toml", "[[instance]]\npath = \"qkp_0.txt\"\nformat = \"qkp\"\nitems = 4\n");
    assert_eq!(run("oracle", Some(&o), &dir.path().join("b"), &[]), 0);
    let o = write(&out, "bad.toml", "[[instance]]\npath = \"qkp_0.txt\"\nformat = \"qkp\"\n");
    assert_eq!(run("oracle", Some(&o), &dir.path().join("c"), &[]), 2);
}

#[test]
fn report_melts_result_tables() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "toy.toml", TOY);
    let out = dir.path().join("out");
    assert_eq!(run("run-qaoa", Some(&cfg), &out, &[]), 0);
    assert_eq!(run("report", None, &out, &[]), 0);
    let rows = read_csv(&out.join("plot_success.csv"));
    let wide = read_csv(&out.join("run_qaoa.csv"));
    assert_eq!(rows.len(), wide.len() * 5);
    assert!(rows.iter().any(|r| r["metric"] == "mean_p_suc" && r["method"] == "cs_binary" && r["p"] == "0"));
    assert_eq!(run("report", None, &dir.path().join("empty"), &[]), 2);
}

#[test]
fn sweep_noise_writes_table() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "n.toml",
        r#"
[noise]
p = 1
instances = 1
methods = ["x", "cs_binary"]
error_rates = [0.0, 0.01]
trajectories = 20

[noise.problem]
kind = "max_k_cut"
vertices = 3
k = 3
"#,
    );
    let out = dir.path().join("out");
    assert_eq!(run("sweep-noise", Some(&cfg), &out, &[]), 0);
    let rows = read_csv(&out.join("noise.csv"));
    assert_eq!(rows.len(), 4);
    for r in rows.iter().filter(|r| r["error_rate"] == "0.0") {
        let (a, b): (f64, f64) = (r["p_suc"].parse().unwrap(), r["coherent_p_suc"].parse().unwrap());
        assert!((a - b).abs() < 1e-9, "{r:?}");
    }
    let bad = write(dir.path(), "b.toml", "[noise]\nerror_rates = [0.9]\n[noise.problem]\nkind = \"toy\"\n");
    assert_eq!(run("sweep-noise", Some(&bad), &dir.path().join("o2"), &[]), 2);
}
