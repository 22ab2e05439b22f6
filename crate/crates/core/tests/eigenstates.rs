use std::f64::consts::PI;

use proptest::prelude::*;
use ptwell::eigenstates::{coefficients_at, Eigenstate};
use ptwell::error::Error;
use ptwell::secular::find_spectrum;
use ptwell::WellConfig;

fn states(a: f64, xi: f64, n: usize) -> Vec<Eigenstate> {
    let c = WellConfig::new(a, xi).unwrap();
    find_spectrum(&c, n)
        .unwrap()
        .roots
        .iter()
        .map(|r| Eigenstate::new(&c, r).unwrap())
        .collect()
}

#[test]
fn schrodinger_equation_holds_between_deltas() {
    let h = 1e-4;
    for s in states(0.3, 2.5, 6) {
        let scale = s.eval(0.0).norm().max(s.eval(0.65).norm());
        for x in [-0.8, -0.1, 0.2, 0.65] {
            let d2 = (s.eval(x + h) - 2.0 * s.eval(x) + s.eval(x - h)) / (h * h);
            let r = (d2 + s.energy() * s.eval(x)).norm();
            assert!(r < 1e-5 * s.energy() * scale, "n = {}, x = {x}: {r}", s.n);
        }
    }
}

#[test]
fn s_zero_level_ignores_coupling() {
    let s = &states(0.5, 3.0, 4)[3];
    assert!((s.kappa - 2.0 * PI).abs() < 1e-12);
    assert!(s.coeffs.alpha.abs() < 1e-12 && s.coeffs.gamma.abs() < 1e-12);
    assert!((s.coeffs.beta + s.coeffs.delta).abs() < 1e-12);
}

#[test]
fn c_zero_level_imaginary_part_grows_with_coupling() {
    let im = |xi: f64| {
        // the centre cosine is the only part that feels the coupling
        let s = &states(0.5, xi, 2)[1];
        (s.coeffs.gamma / s.coeffs.delta).abs()
    };
    let (r1, r2) = (im(0.5), im(1.0));
    assert!((r2 / r1 - 2.0).abs() < 1e-9, "{r1} {r2}");
    assert!(states(0.5, 1.0, 2)[1].coeffs.alpha.abs() < 1e-12);
}

#[test]
fn non_root_is_rejected() {
    let c = WellConfig::new(0.5, 2.0).unwrap();
    assert!(matches!(coefficients_at(&c, 2.0), Err(Error::Residual(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pt_symmetry_boundaries_and_jumps(a in 0.1f64..0.9, xi in 0.1f64..2.0, x in 0.0f64..1.0) {
        let c = WellConfig::new(a, xi).unwrap();
        for s in states(a, xi, 5) {
            let scale = s.eval(0.0).norm() + s.eval(0.5 * (1.0 + a)).norm() + 1.0;
            prop_assert!((s.eval(-x) - s.eval(x).conj()).norm() < 1e-10 * scale);
            prop_assert!(s.eval(1.0).norm() < 1e-10 * scale);
            prop_assert!(s.eval(-1.0).norm() < 1e-10 * scale);
            let e = 1e-9;
            let jump = s.derivative(a + e) - s.derivative(a - e);
            let expected = num_complex::Complex64::new(0.0, c.xi()) * s.eval(a);
            prop_assert!((jump - expected).norm() < 1e-6 * scale * s.kappa);
        }
    }
}
