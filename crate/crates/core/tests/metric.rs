use proptest::prelude::*;
use ptwell::metric::*;
use ptwell::WellConfig;

fn system(xi: f64, n: usize) -> BiorthogonalSystem {
    build_biorthogonal(&WellConfig::new(0.5, xi).unwrap(), n).unwrap()
}

/// Composite Simpson on each smooth piece.
fn simpson(f: impl Fn(f64) -> num_complex::Complex64, lo: f64, hi: f64) -> num_complex::Complex64 {
    let n = 2000;
    let h = (hi - lo) / n as f64;
    let mut s = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += f(lo + i as f64 * h) * w;
    }
    s * (h / 3.0)
}

#[test]
fn hermitian_limit() {
    let s = system(0.0, 6);
    assert!(s.gram_tolerance < 1e-12);
    for (n, p) in s.parity_overlaps.iter().enumerate() {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        assert!((p - sign).abs() < 1e-12);
    }
    let m = build_metric(&s, &[1.0; 6]).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let t = if i == j { 1.0 } else { 0.0 };
            assert!((m.representation[(i, j)].re - t).abs() < 1e-12);
        }
    }
    assert!(quasi_hermiticity_residual(&m, &s) < 1e-12);
    assert_eq!(
        cutoff_estimate(&WellConfig::new(0.5, 0.0).unwrap(), 1e-3, 10)
            .unwrap()
            .n_cutoff,
        0
    );
}

#[test]
fn right_states_are_not_orthogonal() {
    let s = system(2.0, 2);
    let v = inner_product(&s.right[0], &s.right[1]).unwrap();
    assert!(v.norm() > 1e-3);
    let (a, b) = (&s.right[0], &s.right[1]);
    let f = |x: f64| a.eval(x).conj() * b.eval(x);
    let q = simpson(f, -1.0, -0.5) + simpson(f, -0.5, 0.5) + simpson(f, 0.5, 1.0);
    assert!((q - v).norm() < 1e-10);
}

#[test]
fn metric_at_reference_point() {
    let s = system(2.0, 8);
    assert!(s.gram_tolerance < 1e-9);
    assert!(s.mixed_signs());
    let m = build_metric(&s, &[1.0; 8]).unwrap();
    assert!(m.hermiticity < 1e-12);
    assert!(m.min_eigenvalue > 0.0);
    assert!(quasi_hermiticity_residual(&m, &s) < 1e-8);
    assert!(resolution_of_identity(&s).unwrap() < 1e-8);
}

#[test]
fn doubling_a_weight_doubles_its_contribution() {
    let s = system(2.0, 6);
    let base = build_metric(&s, &[1.0; 6]).unwrap();
    let mut w = [1.0; 6];
    w[2] = 2.0;
    let doubled = build_metric(&s, &w).unwrap();
    let only = {
        let mut w = [1e-300; 6];
        w[2] = 1.0;
        build_metric(&s, &w)
    };
    // eta(w) - eta(1) is the single k = 3 term
    let diff = &doubled.representation - &base.representation;
    let l = &s.gram;
    for i in 0..6 {
        for j in 0..6 {
            let term = l[(2, i)].conj() * l[(2, j)];
            assert!((diff[(i, j)] - term).norm() < 1e-12);
        }
    }
    assert!(only.is_err() || only.unwrap().min_eigenvalue < 1e-10);
}

#[test]
fn separable_form_is_positive() {
    let s = system(2.0, 6);
    let m = separable_metric(&s, &[1.0; 6], 30).unwrap();
    assert!(m.hermiticity < 1e-12);
    assert!(m.min_eigenvalue > 0.0);
}

#[test]
fn cutoff_grows_with_coupling() {
    let mut last = 0;
    for xi in [1.0, 2.0, 3.0, 4.0] {
        let c = cutoff_estimate(&WellConfig::new(0.5, xi).unwrap(), 1e-3, 40).unwrap();
        assert!(c.n_cutoff >= last && c.n_cutoff < 40);
        last = c.n_cutoff;
    }
}

#[test]
fn csv_export_pairs_components() {
    let s = system(1.0, 2);
    let csv = matrix_to_csv(&s.gram);
    assert_eq!(csv.lines().count(), 2);
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 4);
}

#[test]
fn rejects_non_positive_weights() {
    let s = system(1.0, 3);
    assert!(build_metric(&s, &[1.0, 0.0, 1.0]).is_err());
    assert!(build_metric(&s, &[1.0, 1.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn any_positive_weights_give_a_metric(
        xi in 0.0f64..4.0,
        w in proptest::collection::vec(0.05f64..20.0, 8),
    ) {
        let s = system(xi, 8);
        prop_assert!(s.gram_tolerance < 1e-9);
        let m = build_metric(&s, &w).unwrap();
        prop_assert!(m.hermiticity < 1e-12);
        prop_assert!(m.min_eigenvalue > 0.0);
        prop_assert!(quasi_hermiticity_residual(&m, &s) < 1e-8);
    }
}
