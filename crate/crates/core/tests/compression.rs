use csqaoa::compression::*;
use csqaoa::sim::{Circuit, GateOp, Statevector};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Dense matrix of a linear map given by its action on basis states.
fn dense(n: usize, mut f: impl FnMut(&mut Statevector)) -> DMatrix<Complex64> {
    let d = 1 << n;
    let mut m = DMatrix::zeros(d, d);
    for x in 0..d {
        let mut s = Statevector::basis(n, x);
        f(&mut s);
        for (y, a) in s.amplitudes().iter().enumerate() {
            m[(y, x)] = *a;
        }
    }
    m
}

#[test]
fn compressed_x_mixer_is_the_xy_mixer_on_two_variables() {
    let u = build_onehot_binary(&[0, 1], 2).unwrap();
    assert_eq!(u.kept(), &[1]);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..10 {
        let beta = rand::Rng::gen_range(&mut rng, -3.0..3.0);
        let mixed = dense(2, |s| {
            u.apply(s).unwrap();
            s.apply_gate(&GateOp::XRot { qubit: 1, beta }).unwrap();
            u.apply_inverse(s).unwrap();
        });
        let xy = dense(2, |s| s.apply_gate(&GateOp::BlockXY { qubits: vec![0, 1], beta }).unwrap());
        // oracle: (XX + YY)/2 swaps |01> and |10>, so U_XY = cos(b) - i sin(b) SWAP there
        let (sn, cs) = beta.sin_cos();
        for (i, j) in [(1, 1), (2, 2), (1, 2), (2, 1)] {
            let want = if i == j { c(cs) } else { Complex64::new(0.0, -sn) };
            assert!((xy[(i, j)] - want).norm() < 1e-12);
            assert!((mixed[(i, j)] - xy[(i, j)]).norm() < 1e-12, "beta {beta} entry ({i},{j})");
        }
    }
}

#[test]
fn deterministic_compressors_keep_feasible_states() {
    for k in 2..=6 {
        let g: Vec<usize> = (0..k).collect();
        let u = build_onehot_binary(&g, k).unwrap();
        let f = feasible_register_states(k, &[ConstraintSpec::one_hot(&g)]);
        assert_eq!(survival_rate(&u, &f).unwrap(), 1.0, "one-hot on {k}");
        for odd in [false, true] {
            let p = build_parity(k, &g, odd).unwrap();
            let f = feasible_register_states(k, &[ConstraintSpec::parity(&g, odd)]);
            assert_eq!(survival_rate(&p, &f).unwrap(), 1.0);
            assert_eq!(p.m(), k - 1);
        }
    }
}

#[test]
fn parity_example_on_four_qubits() {
    // |q1 q2 q3 q4> = |1100> has even parity and maps to |0100>
    let u = build_parity(4, &[0, 1, 2, 3], false).unwrap();
    assert_eq!(u.map_basis(0b0011), Some(0b0010));
}

#[test]
fn qap_compressor_on_two_facilities() {
    // both permutation matrices survive into distinct compressed states
    let u = build_qap_compressor(2, true).unwrap();
    assert_eq!(u.m(), 1);
    let perms = [0b1001usize, 0b0110];
    let images: Vec<usize> = perms.iter().map(|&x| u.extract(u.map_basis(x).unwrap()).unwrap()).collect();
    assert_ne!(images[0], images[1]);
}

#[test]
fn width_estimates_for_the_single_sum_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (n, upper) in [(3, 1), (4, 1), (5, 1), (5, 2), (6, 1), (6, 2), (7, 1), (8, 1)] {
        let q: Vec<usize> = (0..n).collect();
        let con = ConstraintSpec::at_most(&q, upper);
        let exact = width_for(con.feasible_local().len());
        let est = estimate_compressed_width(&Compressor::identity(n), &con, 10_000, &mut rng).unwrap();
        assert!((est as i64 - exact as i64).abs() <= 1, "N={n} u={upper}: {est} vs {exact}");
    }
    let always = ConstraintSpec::at_most(&[0, 1, 2], 3);
    assert_eq!(estimate_compressed_width(&Compressor::identity(3), &always, 100, &mut rng).unwrap(), 3);
}

fn random_continuous(n: usize, m: usize, seed: u64) -> Compressor {
    let a = CAnsatz { n, m, layers: 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta: Vec<f64> = (0..a.n_params()).map(|_| rand::Rng::gen_range(&mut rng, 0.0..3.2)).collect();
    ansatz_compressor(&Compressor::identity(n), &a.circuit(&theta).unwrap(), m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn direct_equals_entangled(n in 2usize..=5, seed in any::<u64>(), upper in 0i64..3) {
        let m = 1 + (seed as usize % (n - 1));
        let u = random_continuous(n, m, seed);
        let q: Vec<usize> = (0..n).collect();
        let con = ConstraintSpec::at_most(&q, upper);
        let h = CompressedHamiltonian::build(&con, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let d = e_direct(&u, &h).unwrap();
        let e = e_entangled::<ChaCha8Rng>(&u, &h, Readout::Exact).unwrap();
        prop_assert!((d - e).abs() < 1e-9);
    }

    #[test]
    fn gate_form_is_unitary(n in 2usize..=4, seed in any::<u64>()) {
        let u = random_continuous(n, 1, seed);
        let circ: Circuit = u.gate_circuit().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<Complex64> = (0..1 << n)
            .map(|_| Complex64::new(rand::Rng::gen_range(&mut rng, -1.0..1.0), rand::Rng::gen_range(&mut rng, -1.0..1.0)))
            .collect();
        let mut s = Statevector::from_amplitudes(amps).unwrap();
        s.normalize();
        let s0 = s.clone();
        s.apply_circuit(&circ, &mut rng).unwrap();
        s.apply_circuit(&circ.inverse().unwrap(), &mut rng).unwrap();
        let err = s.amplitudes().iter().zip(s0.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10);
    }

    #[test]
    fn hamiltonian_audit(n in 1usize..=12, seed in any::<u64>(), kind in 0u8..4) {
        let q: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<i64> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, 1..6)).collect();
        let total: i64 = w.iter().sum();
        let con = match kind {
            0 => ConstraintSpec::at_most(&q, (n / 2) as i64),
            1 => ConstraintSpec::upper_only(&q, w, total / 2),
            2 => ConstraintSpec::lower_only(&q, w, total / 2),
            _ => ConstraintSpec::parity(&q, seed % 2 == 1),
        };
        let h = CompressedHamiltonian::build(&con, &mut rng).unwrap();
        let a = h.audit().unwrap();
        prop_assert!(a.max_feasible < a.min_infeasible);
        prop_assert!(h.epsilon.iter().all(|e| e.abs() < 1.0 / (2.0 * n as f64)));
    }

    #[test]
    fn permutation_compressors_are_bijections(k in 2usize..=8) {
        let g: Vec<usize> = (0..k).collect();
        let u = build_onehot_binary(&g, k).unwrap();
        let p = u.dense_permutation().unwrap();
        let mut seen = vec![false; p.len()];
        for &y in &p {
            prop_assert!(!seen[y]);
            seen[y] = true;
        }
    }
}
