mod common;

use approx::assert_relative_eq;
use common::*;
use orthobasis::diag::{m_functional, n_functional};
use orthobasis::factor::hermitian_eigen;
use orthobasis::ortho::sw_to_gs_unitary;
use orthobasis::*;
use proptest::prelude::*;

fn small_set() -> impl Strategy<Value = VectorSet> {
    (1usize..=6, 0usize..=5, any::<u64>()).prop_map(|(n, extra, seed)| {
        let mut r = rng(seed);
        random_set(&mut r, n, n + extra, 1e6)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gram_is_hermitian_with_norm_trace(v in small_set()) {
        let m = gram(&v);
        prop_assert_eq!(m.entries(), &m.entries().adjoint());
        let norms: f64 = v.matrix().column_iter().map(|c| c.norm_squared()).sum();
        assert_relative_eq!(m.trace(), norms, max_relative = 1e-13);
        prop_assert!(eigh(&m).unwrap().p().iter().all(|&p| p > 0.0));
    }

    #[test]
    fn gram_invariant_under_ambient_rotation(v in small_set(), seed in any::<u64>()) {
        let q = random_unitary(v.dim(), seed);
        let rotated = VectorSet::new(q.entries() * v.matrix()).unwrap();
        let diff = gram(&rotated).entries() - gram(&v).entries();
        prop_assert!(diff.iter().all(|c| c.norm() <= 1e-12 * gram(&v).trace().max(1.0)));
    }

    #[test]
    fn eigen_round_trip(v in small_set()) {
        let m = gram(&v);
        let e = eigh(&m).unwrap();
        let err = (e.reconstruct() - m.entries()).norm() / m.entries().norm();
        prop_assert!(err <= 1e-10, "{}", err);
        prop_assert!(e.p().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn m_invariant_under_permutation_and_phases(v in small_set(), seed in any::<u64>()) {
        let z = min_m(&v).unwrap();
        let mut r = rng(seed);
        let perm = shuffled(&mut r, v.count());
        let phases: Vec<f64> = (0..v.count()).map(|k| (seed.wrapping_add(k as u64) % 1000) as f64 * 0.0063).collect();
        let s = CMatrix::from_fn(v.count(), v.count(), |i, j| {
            if i == perm[j] { Complex64::from_polar(1.0, phases[j]) } else { Complex64::ZERO }
        });
        // z·(permutation with phases) is again an orthonormal basis of the span
        let moved = orthogonalize_custom(&v, &(z.s_matrix() * &s)).unwrap();
        assert_relative_eq!(m_functional(&moved, &v).unwrap(), m_functional(&z, &v).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn frame_operator_spectrum_matches_gram(v in small_set()) {
        let frame = script_m_operator(&v);
        let spec = hermitian_eigen(&frame).unwrap();
        let p = eigh(&gram(&v)).unwrap();
        for k in 0..v.count() {
            assert_relative_eq!(spec.p()[k], p.p()[k], max_relative = 1e-9);
        }
        for &rest in &spec.p()[v.count()..] {
            prop_assert!(rest.abs() <= 1e-12 * spec.p()[0]);
        }
    }

    #[test]
    fn every_basis_is_orthonormal_in_span(v in small_set()) {
        let n = v.count() as f64;
        for z in [gram_schmidt(&v).unwrap(), schweinler_wigner(&v).unwrap(), min_m(&v).unwrap(), lowdin_symmetric(&v).unwrap()] {
            prop_assert!(z.orthonormality_residual() <= 1e-9 * n.sqrt());
            prop_assert!(z.span_residual(&v) <= 1e-9);
        }
    }

    #[test]
    fn min_m_is_composition(v in small_set()) {
        let w = schweinler_wigner(&v).unwrap();
        let x = min_m(&v).unwrap();
        prop_assert_eq!(x.vectors(), &(w.vectors() * dft_unitary(v.count()).entries()));
    }
}

#[test]
fn inv_sqrt_is_symmetric_orthogonalizer() {
    for v in ensemble(30, 5, 8, 16, 1e6) {
        let m = gram(&v);
        let s = inv_sqrt(&eigh(&m).unwrap()).unwrap();
        let n = v.count();
        assert!((&s * m.entries() * &s - CMatrix::identity(n, n)).norm() <= 1e-9);
        assert!((&s * m.entries() - m.entries() * &s).norm() <= 1e-10 * m.entries().norm() * s.norm());
    }
}

#[test]
fn gram_schmidt_matches_modified_gram_schmidt() {
    let mut r = rng(2024);
    for _ in 0..40 {
        let n = rand::Rng::random_range(&mut r, 1..=32);
        let d = rand::Rng::random_range(&mut r, n..=40);
        let v = random_set(&mut r, n, d, 1e4);
        let y = gram_schmidt(&v).unwrap();
        let oracle = modified_gram_schmidt(v.matrix());
        let worst = (y.vectors() - &oracle).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(worst <= 1e-9, "N={n} d={d}: {worst:e}");
    }
}

#[test]
fn definition_equivalence_over_random_unitaries() {
    // 1000 instances, N ≤ 8, d ≤ 16
    let sets = ensemble(100, 77, 8, 16, 1e6);
    let mut count = 0;
    for (i, v) in sets.iter().enumerate() {
        let e = eigh(&gram(v)).unwrap();
        let w = schweinler_wigner(v).unwrap();
        for j in 0..10 {
            let rot = random_unitary(v.count(), (i * 10 + j) as u64);
            let z = orthogonalize_custom(v, &(w.s_matrix() * rot.entries())).unwrap();
            let direct = m_functional(&z, v).unwrap();
            let via = m_via_unitary(&rot, e.p()).unwrap();
            assert!((direct - via).abs() <= 1e-9 * direct, "{direct} vs {via}");
            count += 1;
        }
    }
    assert_eq!(count, 1000);
}

#[test]
fn extremal_identities_on_random_sets() {
    for v in ensemble(60, 9, 8, 16, 1e6) {
        let n = v.count() as f64;
        let m = gram(&v);
        let (tr, tr2) = (m.trace(), m.trace_sq());
        let e = eigh(&m).unwrap();
        let sum_p2: f64 = e.p().iter().map(|p| p * p).sum();
        let frame_sq: f64 = script_m_operator(&v).iter().map(|c| c.norm_sqr()).sum();
        assert_relative_eq!(sum_p2, tr2, max_relative = 1e-8);
        assert_relative_eq!(frame_sq, tr2, max_relative = 1e-8);

        let w = schweinler_wigner(&v).unwrap();
        let x = min_m(&v).unwrap();
        let y = gram_schmidt(&v).unwrap();
        assert_relative_eq!(m_functional(&w, &v).unwrap(), tr2, max_relative = 1e-8);
        assert_relative_eq!(m_functional(&x, &v).unwrap(), tr * tr / n, max_relative = 1e-8);
        for z in [&w, &x, &y] {
            let mv = m_functional(z, &v).unwrap();
            let nv = n_functional(z, &v).unwrap();
            assert!((mv + nv - tr2).abs() <= 1e-8 * tr2);
            assert!(mv >= tr * tr / n - 1e-8 * tr2 && mv <= tr2 + 1e-8 * tr2);
            let r = report(&v, z).unwrap();
            assert!(r.all_pass(), "{:?}", r.certificates);
        }

        // equal diagonal of F†PF
        let f = dft_unitary(v.count());
        let fpf = f.entries().adjoint() * CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            v.count(),
            e.p().iter().map(|&p| Complex64::new(p, 0.0)),
        )) * f.entries();
        for k in 0..v.count() {
            assert!((fpf[(k, k)].re - tr / n).abs() <= 1e-9 * tr / n);
        }
    }
}

#[test]
fn connecting_unitary_matches_closed_form() {
    for v in ensemble(40, 31, 8, 16, 1e6) {
        let m = gram(&v);
        let e = eigh(&m).unwrap();
        let t = triangular_factor(&m).unwrap();
        let w = schweinler_wigner(&v).unwrap();
        let y = gram_schmidt(&v).unwrap();
        let a = connecting_unitary(&w, &y).unwrap();
        let closed = sw_to_gs_unitary(&e, &t);
        assert!((a.entries() - &closed).norm() <= 1e-9 * (v.count() as f64).sqrt());
        assert!(is_unitary(&closed, 1e-9).0);
        let f = connecting_unitary(&w, &min_m(&v).unwrap()).unwrap();
        assert!((f.entries() - dft_unitary(v.count()).entries()).norm() <= 1e-9);
    }
}

#[test]
fn gram_schmidt_formula_matches_direct() {
    for v in ensemble(40, 17, 8, 16, 1e6) {
        let t = triangular_factor(&gram(&v)).unwrap();
        let direct = m_functional(&gram_schmidt(&v).unwrap(), &v).unwrap();
        assert_relative_eq!(m_gram_schmidt_formula(&t).unwrap(), direct, max_relative = 1e-9);
    }
}

#[test]
fn schweinler_wigner_is_democratic_gram_schmidt_is_not() {
    let mut r = rng(404);
    for v in ensemble(20, 13, 8, 16, 1e6) {
        let perm = shuffled(&mut r, v.count());
        let pv = v.permuted(&perm).unwrap();
        let a = phase_fixed_columns(schweinler_wigner(&v).unwrap().vectors());
        let b = phase_fixed_columns(schweinler_wigner(&pv).unwrap().vectors());
        assert!(unordered_distance(&a, &b) <= 1e-9);

        let rev: Vec<usize> = (0..v.count()).rev().collect();
        let g = phase_fixed_columns(gram_schmidt(&v).unwrap().vectors());
        let h = phase_fixed_columns(gram_schmidt(&v.permuted(&rev).unwrap()).unwrap().vectors());
        assert!(unordered_distance(&g, &h) > 1e-6);
    }
}

#[test]
fn sweep_respects_bounds_and_trace_identity() {
    for (i, v) in ensemble(10, 55, 6, 10, 1e6).iter().enumerate() {
        let s = sweep(v, 500, i as u64).unwrap();
        assert_eq!(s.bound_violations, 0);
        assert!(s.m_values.max <= s.m_max_bound * (1.0 + 1e-8));
        assert!(s.m_values.min >= s.m_min_bound - 1e-8 * s.trace_m2);
        assert!(s.trace_identity_residual <= 1e-8);
        assert!(s.named.min_m <= s.m_values.min + 1e-8 * s.trace_m2);
        assert!(s.named.schweinler_wigner >= s.m_values.max - 1e-8 * s.trace_m2);
    }
}
