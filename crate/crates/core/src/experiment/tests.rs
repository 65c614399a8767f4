use super::*;
use crate::qaoa::OptimizeConfig;

fn quick(p: usize, instances: usize, methods: Vec<Method>) -> SuiteConfig {
    SuiteConfig {
        p,
        instances,
        methods,
        optimize: OptimizeConfig { random_starts: 1, ..OptimizeConfig::default() },
        compressor_samples: 2,
        ..SuiteConfig::default()
    }
}

#[test]
fn statistics_helpers() {
    assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    assert_eq!(sample_std(&[1.0]), 0.0);
    assert!((sample_std(&[1.0, 2.0, 3.0]) - 1.0).abs() < 1e-15);
    assert_eq!(mean(&[1.0, 2.0]), 1.5);
}

#[test]
fn derived_streams_differ() {
    use rand::Rng;
    let a: u64 = stream_rng(1, Stream::Starts, 0, 0).gen();
    let b: u64 = stream_rng(1, Stream::Starts, 0, 1).gen();
    let c: u64 = stream_rng(1, Stream::Starts, 0, 0).gen();
    assert_ne!(a, b);
    assert_eq!(a, c);
}

#[test]
fn qkp_ensemble_respects_the_feasible_ratio_filter() {
    let problem = Problem::Qkp { items: 4, benchmark_items: 100, density: 0.5, feasible_ratio: (0.1, 0.5) };
    let ens = build_instances(&problem, 6, 0).unwrap();
    assert_eq!(ens.len(), 6);
    for (_, inst) in &ens {
        let r = crate::instances::brute_force(inst).unwrap();
        assert!((0.1..=0.5).contains(&r.p_feasible));
    }
    assert_eq!(ens, build_instances(&problem, 6, 0).unwrap());
}

#[test]
fn full_code_spaces_skip_the_penalty_scan() {
    let problem = Problem::MaxKCut { vertices: 3, k: 4 };
    let r = run_suite(&problem, &quick(1, 1, vec![Method::CsBinary]), 2).unwrap();
    let cs = r.summary(Method::CsBinary).unwrap();
    assert!(cs.penalty_free);
    assert_eq!(cs.scan.evaluated.len(), 1);
    assert_eq!(cs.penalty, 1.0);
}

#[test]
fn unsupported_methods_are_rejected() {
    let inst = crate::instances::gen_maxkcut(3, 3, 0).unwrap();
    let cfg = SuiteConfig::default();
    assert!(prepare_method(&inst, Method::CsBinaryParity, &cfg, 0, 0).is_err());
    assert!(prepare_method(&inst, Method::CsDAnsatz, &cfg, 0, 0).is_err());
}

#[test]
fn small_maxkcut_suite() {
    let problem = Problem::MaxKCut { vertices: 3, k: 3 };
    let r = run_suite(&problem, &quick(1, 2, vec![Method::X, Method::Xy, Method::CsBinary]), 11).unwrap();
    assert_eq!(r.rows.len(), 6);
    // three one-hot states leave one infeasible code word per group
    assert!(!r.summary(Method::CsBinary).unwrap().penalty_free);
    assert!(r.summary(Method::Xy).unwrap().penalty_free);
    let x = r.summary(Method::X).unwrap();
    assert!(!x.penalty_free && x.scan.evaluated.len() > 1);
    assert!(x.scan.final_step <= 1.0);
    for row in r.rows.iter().filter(|row| row.method == Method::CsBinary) {
        assert!(row.p_dis.abs() < 1e-12);
    }
    // bit-identical rerun
    let again = run_suite(&problem, &quick(1, 2, vec![Method::X, Method::Xy, Method::CsBinary]), 11).unwrap();
    assert_eq!(r.rows, again.rows);
    for (a, b) in r.summaries.iter().zip(&again.summaries) {
        assert_eq!(a.scan, b.scan);
    }
}

#[test]
fn small_qkp_suite_with_trained_compressors() {
    let problem = Problem::Qkp { items: 4, benchmark_items: 20, density: 0.5, feasible_ratio: (0.1, 0.5) };
    let mut cfg = quick(1, 1, vec![Method::CsDAnsatz]);
    cfg.penalty = Some(crate::qaoa::PenaltySearch::new(10.0, 30.0, 10.0));
    let r = run_suite(&problem, &cfg, 3).unwrap();
    let row = &r.rows[0];
    assert_eq!(row.samples.len(), 2);
    assert_eq!(row.p_sur, vec![1.0, 1.0]);
    assert_eq!(row.compressors_passed, 2);
    assert!(row.p_dis < 1e-9);
}

#[test]
fn zero_noise_sweep_matches_coherent_rows() {
    let cfg = NoiseConfig {
        problem: Problem::MaxKCut { vertices: 3, k: 3 },
        p: 1,
        instances: 2,
        error_rates: vec![0.0, 0.02],
        trajectories: 3,
        optimize: OptimizeConfig { random_starts: 0, ..OptimizeConfig::default() },
        ..NoiseConfig::default()
    };
    let rows = noise_sweep(&cfg, 5).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!(r.normalized + 1e-12 >= r.p_suc);
        if r.error_rate == 0.0 {
            assert!((r.p_suc - r.coherent_p_suc).abs() < 1e-10);
            assert!(r.p_dis.abs() < 1e-12);
        }
    }
    assert!(noise_sweep(&NoiseConfig { error_rates: vec![0.9], ..cfg }, 5).is_err());
}

#[test]
fn fluctuation_rows_cover_the_grid() {
    let cfg = FluctuationConfig { sizes: vec![3, 4], layers: vec![1, 2], instances: 2, samples: 10, ..FluctuationConfig::default() };
    let rows = fluctuation_study(&cfg, 0).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2);
    assert!(rows.iter().all(|r| r.delta_e >= 0.0 && r.defined <= 2));
}
