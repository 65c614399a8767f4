//! Instance generators, benchmark ingestion and exhaustive oracles.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::CopInstance;

/// Largest register the exhaustive oracle will scan.
pub const ORACLE_CAP: usize = 24;

pub fn gen_maxkcut(n_vertices: usize, k: usize, seed: u64) -> Result<CopInstance> {
    if n_vertices < 2 {
        return Err(Error::InvalidArgument("graph needs at least 2 vertices".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n_vertices {
        for v in u + 1..n_vertices {
            if rng.gen_bool(0.5) {
                edges.push((u, v));
            }
        }
    }
    let inst = CopInstance::MaxKCut { n_vertices, edges, k };
    inst.validate()?;
    Ok(inst)
}

/// Symmetric flows from `1..=5` and distances from `1..=10`, zero diagonal.
pub fn gen_qap(n_f: usize, seed: u64) -> Result<CopInstance> {
    if n_f < 2 {
        return Err(Error::InvalidArgument("QAP needs n_f >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sym = |hi: u32| {
        let mut m = vec![vec![0.0; n_f]; n_f];
        for i in 0..n_f {
            for j in i + 1..n_f {
                let v = rng.gen_range(1..=hi) as f64;
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        m
    };
    let flow = sym(5);
    let distance = sym(10);
    Ok(CopInstance::Qap { flow, distance })
}

/// QKP benchmark record in the plain-text format: line 1 `n`, line 2 the
/// capacity, line 3 the `n` weights, then `n` upper-triangular profit rows
/// (`p_ii ... p_in`). Blank lines and lines starting with `#` are skipped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QkpBenchmark {
    pub label: Option<String>,
    pub n: usize,
    pub capacity: i64,
    pub weights: Vec<i64>,
    /// Full `n x n` matrix with zeros below the diagonal.
    pub profits: Vec<Vec<f64>>,
}

pub fn parse_qkp(text: &str) -> Result<QkpBenchmark> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| Error::Parse { line: 0, msg: format!("unexpected end of file, expected {what}") })
    };
    fn nums<T: std::str::FromStr>(line: usize, s: &str) -> Result<Vec<T>> {
        s.split_whitespace()
            .map(|t| t.parse::<T>().map_err(|_| Error::Parse { line, msg: format!("bad number {t:?}") }))
            .collect()
    }
    let (ln, l) = next("item count")?;
    let n = match nums::<usize>(ln, l)?.as_slice() {
        [n] if *n > 0 => *n,
        _ => return Err(Error::Parse { line: ln, msg: "expected one positive item count".into() }),
    };
    let (ln, l) = next("capacity")?;
    let capacity = match nums::<i64>(ln, l)?.as_slice() {
        [c] if *c > 0 => *c,
        _ => return Err(Error::Parse { line: ln, msg: "expected one positive capacity".into() }),
    };
    let (ln, l) = next("weights")?;
    let weights = nums::<i64>(ln, l)?;
    if weights.len() != n || weights.iter().any(|&w| w <= 0) {
        return Err(Error::Parse { line: ln, msg: format!("expected {n} positive weights") });
    }
    let mut profits = vec![vec![0.0; n]; n];
    for (i, row) in profits.iter_mut().enumerate() {
        let (ln, l) = next("profit row")?;
        let vals = nums::<f64>(ln, l)?;
        if vals.len() != n - i {
            return Err(Error::Parse { line: ln, msg: format!("profit row {} needs {} entries", i + 1, n - i) });
        }
        row[i..].copy_from_slice(&vals);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::Parse { line: ln, msg: "trailing data".into() });
    }
    Ok(QkpBenchmark { label: None, n, capacity, weights, profits })
}

pub fn load_qkp(path: &Path) -> Result<QkpBenchmark> {
    let text = std::fs::read_to_string(path)?;
    let mut b = parse_qkp(&text)?;
    b.label = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    Ok(b)
}

pub fn format_qkp(b: &QkpBenchmark) -> String {
    let join = |v: Vec<String>| v.join(" ");
    let mut s = format!("{}\n{}\n{}\n", b.n, b.capacity, join(b.weights.iter().map(|w| w.to_string()).collect()));
    for i in 0..b.n {
        s.push_str(&join(b.profits[i][i..].iter().map(|p| p.to_string()).collect()));
        s.push('\n');
    }
    s
}

/// First `n_i` items with capacity `floor(n_i C / n)`.
pub fn derive_qkp(b: &QkpBenchmark, n_i: usize) -> Result<CopInstance> {
    if n_i == 0 || n_i > b.n {
        return Err(Error::InvalidArgument(format!("cannot take {n_i} items from a {}-item benchmark", b.n)));
    }
    let capacity = (n_i as i64 * b.capacity).div_euclid(b.n as i64);
    let inst = CopInstance::Qkp {
        profits: b.profits[..n_i].iter().map(|r| r[..n_i].to_vec()).collect(),
        weights: b.weights[..n_i].to_vec(),
        capacity,
    };
    inst.validate()?;
    Ok(inst)
}

/// Random benchmark in the usual style of published QKP sets: each profit is
/// nonzero with probability `density` and drawn from `1..=100`, weights from
/// `1..=50`, capacity uniform in `50..=sum(w)`.
pub fn gen_qkp_benchmark(n: usize, density: f64, seed: u64) -> Result<QkpBenchmark> {
    if n == 0 || !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidArgument("benchmark needs n >= 1 and density in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut profits = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            if rng.gen_bool(density) {
                profits[i][j] = rng.gen_range(1..=100) as f64;
            }
        }
    }
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=50)).collect();
    let total: i64 = weights.iter().sum();
    let capacity = rng.gen_range(50.min(total)..=total);
    Ok(QkpBenchmark { label: None, n, capacity, weights, profits })
}

/// Parses benchmark identifiers of the form `{n}_{density}_{index}`, e.g. `100_100_1`.
pub fn parse_qkp_label(label: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<&str> = label.split('_').collect();
    let bad = || Error::InvalidArgument(format!("not a benchmark label: {label:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let p = |s: &str| s.parse::<usize>().map_err(|_| bad());
    Ok((p(parts[0])?, p(parts[1])?, p(parts[2])?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n_qubits: usize,
    /// Optimal basis indices, ascending.
    pub optima: Vec<usize>,
    pub optimal_value: f64,
    pub n_feasible: usize,
    pub p_feasible: f64,
}

pub fn enumerate_feasible(inst: &CopInstance) -> Result<Vec<usize>> {
    let n = inst.n_qubits();
    if n > ORACLE_CAP {
        return Err(Error::SizeCap { n, cap: ORACLE_CAP });
    }
    let cons = inst.constraints();
    Ok((0..1usize << n).filter(|&x| cons.iter().all(|c| c.satisfied(x))).collect())
}

/// Exhaustive search of the objective over the feasible set. Values within
/// `1e-9` of the minimum count as ties.
pub fn brute_force(inst: &CopInstance) -> Result<OracleReport> {
    let n = inst.n_qubits();
    let feasible = enumerate_feasible(inst)?;
    let obj = inst.encode()?.objective;
    let mut best = f64::INFINITY;
    let mut optima = Vec::new();
    for &x in &feasible {
        let v = obj.evaluate(x);
        if v < best - 1e-9 {
            best = v;
            optima.clear();
            optima.push(x);
        } else if (v - best).abs() <= 1e-9 {
            optima.push(x);
        }
    }
    Ok(OracleReport {
        n_qubits: n,
        optima,
        optimal_value: best,
        n_feasible: feasible.len(),
        p_feasible: feasible.len() as f64 / (1u64 << n) as f64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QapFile {
    pub f: Vec<Vec<f64>>,
    pub d: Vec<Vec<f64>>,
}

pub fn graph_instance(g: &GraphFile, k: usize) -> Result<CopInstance> {
    let inst = CopInstance::MaxKCut { n_vertices: g.vertices, edges: g.edges.clone(), k };
    inst.validate()?;
    Ok(inst)
}

pub fn qap_instance(q: &QapFile) -> Result<CopInstance> {
    let inst = CopInstance::Qap { flow: q.f.clone(), distance: q.d.clone() };
    inst.validate()?;
    Ok(inst)
}

/// The two-variable example `min 2 x_A + x_B` subject to `x_A + x_B = 1`,
/// with `x_A` on qubit 0.
pub fn toy_instance() -> CopInstance {
    use crate::qubo::{LinearConstraint, QuboSpec};
    CopInstance::Generic {
        objective: QuboSpec { n: 2, entries: vec![(0, 0, 2.0), (1, 1, 1.0)], offset: 0.0 },
        constraints: vec![LinearConstraint::one_hot(&[0, 1])],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{LinearConstraint, QuboSpec};

    #[test]
    fn edge_frequency_half() {
        let hits = (0..10_000u64)
            .filter(|&s| match gen_maxkcut(2, 3, s).unwrap() {
                CopInstance::MaxKCut { edges, .. } => !edges.is_empty(),
                _ => unreachable!(),
            })
            .count();
        assert!((hits as f64 / 1e4 - 0.5).abs() < 0.02);
        assert_eq!(gen_maxkcut(5, 3, 42).unwrap(), gen_maxkcut(5, 3, 42).unwrap());
        assert_eq!(gen_maxkcut(6, 3, 1).unwrap().n_qubits(), 15);
    }

    #[test]
    fn qap_ranges_and_symmetry() {
        for seed in 0..50 {
            let CopInstance::Qap { flow, distance } = gen_qap(4, seed).unwrap() else { unreachable!() };
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(flow[i][j], flow[j][i]);
                    assert_eq!(distance[i][j], distance[j][i]);
                    if i != j {
                        assert!((1.0..=5.0).contains(&flow[i][j]));
                        assert!((1.0..=10.0).contains(&distance[i][j]));
                    }
                }
            }
        }
        assert_eq!(gen_qap(4, 0).unwrap().n_qubits(), 16);
    }

    #[test]
    fn qkp_text_round_trip_and_derivation() {
        let b = gen_qkp_benchmark(10, 1.0, 3).unwrap();
        let mut fixed = b.clone();
        fixed.capacity = 37;
        let text = format_qkp(&fixed);
        let back = parse_qkp(&text).unwrap();
        assert_eq!(back, fixed);
        let CopInstance::Qkp { capacity, weights, .. } = derive_qkp(&back, 7).unwrap() else { unreachable!() };
        assert_eq!(capacity, 25);
        assert_eq!(weights.len(), 7);
        let CopInstance::Qkp { capacity, .. } = derive_qkp(&back, 10).unwrap() else { unreachable!() };
        assert_eq!(capacity, 37);
        assert!(derive_qkp(&back, 11).is_err());
    }

    #[test]
    fn qkp_parse_errors_carry_line() {
        let err = parse_qkp("3\n10\n1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = parse_qkp("2\n10\n1 2\n5 1\nx\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err:?}");
        assert!(parse_qkp("# comment\n1\n4\n2\n7\n").is_ok());
    }

    #[test]
    fn benchmark_labels() {
        assert_eq!(parse_qkp_label("100_100_1").unwrap(), (100, 100, 1));
        assert_eq!(parse_qkp_label("200_100_10").unwrap(), (200, 100, 10));
        assert!(parse_qkp_label("100-100-1").is_err());
    }

    #[test]
    fn toy_oracle() {
        let r = brute_force(&toy_instance()).unwrap();
        assert_eq!(r.optima, vec![0b10]);
        assert_eq!(r.optimal_value, 1.0);
        assert_eq!(r.n_feasible, 2);
    }

    #[test]
    fn at_most_one_ratio() {
        let cases = [(3, 1, 0.5), (4, 1, 0.3125), (5, 1, 0.1875), (5, 2, 0.5), (6, 1, 0.109375), (6, 2, 0.34375), (7, 1, 0.0625), (8, 1, 0.03515625)];
        for (n, u, want) in cases {
            let inst = CopInstance::Generic {
                objective: QuboSpec { n, entries: vec![], offset: 0.0 },
                constraints: vec![LinearConstraint { terms: (0..n).map(|q| (q, 1)).collect(), constant: 0, lower: 0, upper: u }],
            };
            assert_eq!(brute_force(&inst).unwrap().p_feasible, want, "N={n} u={u}");
        }
    }

    #[test]
    fn edgeless_all_feasible_optimal() {
        let g = CopInstance::MaxKCut { n_vertices: 4, edges: vec![], k: 3 };
        let r = brute_force(&g).unwrap();
        assert_eq!(r.optima.len(), r.n_feasible);
        assert_eq!(r.n_feasible, 27);
    }

    #[test]
    fn oracle_self_consistency_and_cap() {
        for seed in 0..5 {
            let inst = gen_qap(3, seed).unwrap();
            let r = brute_force(&inst).unwrap();
            let obj = inst.encode().unwrap().objective;
            assert!(r.optima.iter().all(|&x| inst.check_feasible(x)));
            let min = enumerate_feasible(&inst).unwrap().iter().map(|&x| obj.evaluate(x)).fold(f64::INFINITY, f64::min);
            assert_eq!(min, r.optimal_value);
            assert_eq!(r.n_feasible, 6);
        }
        let big = gen_qap(5, 0).unwrap();
        assert!(matches!(brute_force(&big), Err(Error::SizeCap { n: 25, cap: 24 })));
    }

    #[test]
    fn file_formats() {
        let g: GraphFile = serde_json::from_str(r#"{"vertices": 3, "edges": [[0, 1], [1, 2]]}"#).unwrap();
        assert_eq!(graph_instance(&g, 2).unwrap().n_qubits(), 4);
        let q: QapFile = serde_json::from_str(r#"{"f": [[0, 1], [1, 0]], "d": [[0, 2], [2, 0]]}"#).unwrap();
        assert_eq!(qap_instance(&q).unwrap().n_qubits(), 4);
    }
}
