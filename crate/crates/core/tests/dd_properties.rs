mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use qdd::equivalence::system_matrix;
use qdd::simulator::{sample_state, simulate};
use qdd::{Diagram, GateOp, Manager, ManagerConfig, QuantumCircuit, VectorNormScheme};

fn amplitudes(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        prop_oneof![
            2 => Just((0.0, 0.0)),
            5 => (-1.0f64..1.0, -1.0f64..1.0),
        ],
        1 << n,
    )
    .prop_filter("nonzero", |v| v.iter().any(|&(a, b)| a != 0.0 || b != 0.0))
    .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn sized_amplitudes() -> impl Strategy<Value = Vec<Complex64>> {
    (1usize..=5).prop_flat_map(amplitudes)
}

fn check_l2_nodes(dd: &Manager) {
    let tol = dd.tolerance();
    for (_, _, succ) in dd.vector_nodes() {
        let s: f64 = succ.iter().map(|e| e.weight.value().norm_sqr()).sum();
        assert!((s - 1.0).abs() <= 10.0 * tol, "node norm {s}");
    }
}

fn check_matrix_pivots(dd: &Manager) {
    let tol = dd.tolerance();
    for (_, _, succ) in dd.matrix_nodes() {
        let mags: Vec<f64> = succ.iter().map(|e| e.weight.value().norm()).collect();
        let max = mags.iter().cloned().fold(0.0, f64::max);
        let pivot = mags.iter().position(|&m| m >= max - tol).unwrap();
        assert!(succ[pivot].weight.is_one(), "pivot weight {:?}", succ[pivot].weight);
        assert!(mags.iter().all(|&m| m <= 1.0 + tol));
        assert!(mags[..pivot].iter().all(|&m| m < max - tol));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn amplitudes_round_trip_under_both_schemes(v in sized_amplitudes()) {
        for scheme in [VectorNormScheme::L2, VectorNormScheme::Leftmost] {
            let mut dd = Manager::with_scheme(scheme);
            let s = dd.from_amplitudes(&v).unwrap();
            let back = dd.to_amplitudes(&s).unwrap();
            prop_assert!(vec_diff(&v, &back) < 1e-12);
            for (i, a) in v.iter().enumerate() {
                prop_assert!((dd.get_amplitude(&s, i as u64).unwrap() - a).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn l2_scheme_normalizes_every_node(v in sized_amplitudes()) {
        let mut dd = Manager::default();
        let s = dd.from_amplitudes(&v).unwrap();
        check_l2_nodes(&dd);
        let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((s.root.weight.value().norm_sqr() - norm).abs() < 1e-12);
    }

    #[test]
    fn identical_vectors_share_a_root(v in sized_amplitudes()) {
        let mut dd = Manager::default();
        let a = dd.from_amplitudes(&v).unwrap();
        dd.retain(&a);
        let b = dd.from_amplitudes(&v).unwrap();
        prop_assert_eq!(a.root, b.root);
    }

    #[test]
    fn state_addition_commutes(v in amplitudes(3), w in amplitudes(3)) {
        let mut dd = Manager::default();
        let a = dd.from_amplitudes(&v).unwrap();
        dd.retain(&a);
        let b = dd.from_amplitudes(&w).unwrap();
        dd.retain(&b);
        let ab = dd.add_states(&a, &b).unwrap();
        let ba = dd.add_states(&b, &a).unwrap();
        prop_assert_eq!(ab.root.node, ba.root.node);
        let sum: Vec<Complex64> = v.iter().zip(&w).map(|(x, y)| x + y).collect();
        if sum.iter().any(|x| x.norm() > 1e-9) {
            prop_assert!(vec_diff(&dd.to_amplitudes(&ab).unwrap(), &sum) < 1e-12);
        }
    }

    #[test]
    fn inner_product_matches_dense(v in amplitudes(3), w in amplitudes(3)) {
        let mut dd = Manager::default();
        let a = dd.from_amplitudes(&v).unwrap();
        dd.retain(&a);
        let b = dd.from_amplitudes(&w).unwrap();
        let want: Complex64 = v.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
        prop_assert!((dd.inner_product(&a, &b).unwrap() - want).norm() < 1e-12);
    }

    #[test]
    fn simulation_matches_dense(seed in any::<u64>(), n in 1usize..=5, depth in 0usize..25) {
        let c = random_circuit(seed, n, depth);
        let mut dd = Manager::default();
        let init = dd.zero_state(n).unwrap();
        let out = simulate(&mut dd, &c, &init).unwrap();
        let want = simulate_dense(&c, 0);
        prop_assert!(vec_diff(&dd.to_amplitudes(&out).unwrap(), &want) < 1e-10);
        check_l2_nodes(&dd);
    }

    #[test]
    fn leftmost_simulation_matches_dense(seed in any::<u64>(), n in 1usize..=4) {
        let c = random_circuit(seed, n, 15);
        let mut dd = Manager::with_scheme(VectorNormScheme::Leftmost);
        let init = dd.zero_state(n).unwrap();
        let out = simulate(&mut dd, &c, &init).unwrap();
        prop_assert!(vec_diff(&dd.to_amplitudes(&out).unwrap(), &simulate_dense(&c, 0)) < 1e-10);
    }

    #[test]
    fn cache_does_not_change_results(seed in any::<u64>(), n in 1usize..=4) {
        let c = random_circuit(seed, n, 20);
        let mut cached = Manager::default();
        let mut plain = Manager::new(ManagerConfig { cache_capacity: 0, ..ManagerConfig::default() });
        let u = system_matrix(&mut cached, &c).unwrap();
        let v = system_matrix(&mut plain, &c).unwrap();
        prop_assert!(max_diff(&cached.to_matrix(&u).unwrap(), &plain.to_matrix(&v).unwrap()) < 1e-12);
        prop_assert_eq!(cached.node_count(&u), plain.node_count(&v));
    }

    #[test]
    fn system_matrix_matches_dense(seed in any::<u64>(), n in 1usize..=4) {
        let c = random_circuit(seed, n, 20);
        let mut dd = Manager::default();
        let u = system_matrix(&mut dd, &c).unwrap();
        prop_assert!(max_diff(&dd.to_matrix(&u).unwrap(), &unitary_dense(&c)) < 1e-10);
        check_matrix_pivots(&dd);
    }

    #[test]
    fn operator_algebra_matches_dense(s1 in any::<u64>(), s2 in any::<u64>(), n in 1usize..=3, m in 1usize..=2) {
        let ca = random_circuit(s1, n, 10);
        let cb = random_circuit(s2, n, 10);
        let cm = random_circuit(s1 ^ s2, m, 6);
        let (da, db, dm) = (unitary_dense(&ca), unitary_dense(&cb), unitary_dense(&cm));
        let mut dd = Manager::default();
        let a = system_matrix(&mut dd, &ca).unwrap();
        dd.retain(&a);
        let b = system_matrix(&mut dd, &cb).unwrap();
        dd.retain(&b);
        let small = system_matrix(&mut dd, &cm).unwrap();
        dd.retain(&small);

        let prod = dd.mat_mat_mul(&a, &b).unwrap();
        prop_assert!(max_diff(&dd.to_matrix(&prod).unwrap(), &matmul(&da, &db)) < 1e-10);
        let sum = dd.add_operators(&a, &b).unwrap();
        prop_assert!(max_diff(&dd.to_matrix(&sum).unwrap(), &add(&da, &db)) < 1e-10);
        let adj = dd.conjugate_transpose(&a);
        prop_assert!(max_diff(&dd.to_matrix(&adj).unwrap(), &adjoint(&da)) < 1e-10);
        let k = dd.kron(&a, &small);
        prop_assert_eq!(k.num_qubits(), n + m);
        prop_assert!(max_diff(&dd.to_matrix(&k).unwrap(), &kron(&da, &dm)) < 1e-10);

        let v: Vec<Complex64> = (0..1 << n).map(|i| c(i as f64 + 1.0, -(i as f64))).collect();
        let s = dd.from_amplitudes(&v).unwrap();
        let out = dd.mat_vec_mul(&a, &s).unwrap();
        let want: Vec<Complex64> = (0..1 << n).map(|i| (0..1 << n).map(|j| da[i][j] * v[j]).sum()).collect();
        prop_assert!(vec_diff(&dd.to_amplitudes(&out).unwrap(), &want) < 1e-9);
        check_matrix_pivots(&dd);
    }

    #[test]
    fn adjoint_is_an_involution(seed in any::<u64>()) {
        let c = random_circuit(seed, 3, 15);
        let mut dd = Manager::default();
        let u = system_matrix(&mut dd, &c).unwrap();
        dd.retain(&u);
        let a = dd.conjugate_transpose(&u);
        dd.retain(&a);
        let back = dd.conjugate_transpose(&a);
        prop_assert_eq!(back.root, u.root);
    }
}

#[test]
fn disjoint_gates_commute_structurally() {
    // Gates on disjoint qubits applied in either order build the same node.
    let ops = [
        GateOp::single(qdd::GateKind::H, 0),
        GateOp::single(qdd::GateKind::T, 1),
        GateOp::cx(2, 3),
        GateOp::single(qdd::GateKind::S, 4),
    ];
    let mut dd = Manager::default();
    let mut roots = Vec::new();
    for perm in [[0, 1, 2, 3], [3, 2, 1, 0], [2, 0, 3, 1]] {
        let mut c = QuantumCircuit::new(5);
        c.push(GateOp::single(qdd::GateKind::H, 2)).unwrap();
        for i in perm {
            c.push(ops[i].clone()).unwrap();
        }
        let init = dd.zero_state(5).unwrap();
        let s = simulate(&mut dd, &c, &init).unwrap();
        dd.retain(&s);
        roots.push(s.root);
        let u = system_matrix(&mut dd, &c).unwrap();
        dd.retain(&u);
        roots.push(u.root);
    }
    assert_eq!(roots[0], roots[2]);
    assert_eq!(roots[0], roots[4]);
    assert_eq!(roots[1], roots[3]);
    assert_eq!(roots[1], roots[5]);
}

#[test]
fn sampling_follows_born_rule() {
    for seed in 0..5u64 {
        let c = random_circuit(seed + 100, 4, 20);
        let mut dd = Manager::default();
        let init = dd.zero_state(4).unwrap();
        let s = simulate(&mut dd, &c, &init).unwrap();
        let h = sample_state(&dd, &s, 40_000, seed).unwrap();
        let want: Vec<f64> = simulate_dense(&c, 0).iter().map(|a| a.norm_sqr()).collect();
        let tv = total_variation(&histogram_distribution(&h, 4), &want);
        assert!(tv < 0.02, "seed {seed}: tv {tv}");
    }
}

#[test]
fn garbage_collection_keeps_retained_diagrams() {
    let mut dd = Manager::new(ManagerConfig {
        gc_threshold: 64,
        ..ManagerConfig::default()
    });
    let c = random_circuit(9, 5, 40);
    let init = dd.zero_state(5).unwrap();
    let s = simulate(&mut dd, &c, &init).unwrap();
    dd.retain(&s);
    let before = dd.to_amplitudes(&s).unwrap();
    for seed in 0..5 {
        let other = random_circuit(seed, 5, 30);
        let i2 = dd.zero_state(5).unwrap();
        simulate(&mut dd, &other, &i2).unwrap();
    }
    dd.collect_garbage();
    assert!(vec_diff(&before, &dd.to_amplitudes(&s).unwrap()) == 0.0);
    dd.release(&s).unwrap();
    dd.collect_garbage();
    assert_eq!(dd.live_nodes().0, 0);
}
