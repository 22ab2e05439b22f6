use std::f64::consts::PI;

use proptest::prelude::*;
use ptwell::perturbation::*;
use ptwell::secular::find_spectrum;
use ptwell::series::rational;
use ptwell::WellConfig;

fn exact_kappa(xi: f64, n: usize) -> f64 {
    let c = WellConfig::new(0.5, xi).unwrap();
    find_spectrum(&c, n).unwrap().kappas()[n - 1]
}

#[test]
fn z_residual_order_is_at_least_nine() {
    let rep = verify_z_series(1.0, &[0.04, 0.02, 0.01]).unwrap();
    for p in rep.empirical_orders() {
        assert!(p > 8.5, "order {p}");
    }
}

#[test]
fn x_branch_outruns_y_branch() {
    for m in 1..=6u32 {
        for mu in [0.25, 0.5, 1.0] {
            let x = root_from_series(BranchTag::new(Branch::X, m).unwrap(), mu, Z_ORDER).unwrap();
            let y = root_from_series(BranchTag::new(Branch::Y, m).unwrap(), mu, Z_ORDER).unwrap();
            assert!(x.displacement > y.displacement, "m = {m}, mu = {mu}");
            if m == 1 && mu > 0.5 {
                continue;
            }
            let nx = 4 * m as usize - 3;
            let ex = exact_kappa(2.0 * mu, nx) - nx as f64 * PI / 2.0;
            let ey = (nx + 2) as f64 * PI / 2.0 - exact_kappa(2.0 * mu, nx + 2);
            assert!(ex > ey, "exact, m = {m}, mu = {mu}");
        }
    }
}

#[test]
fn y_branch_series_tracks_exact_root() {
    let tag = BranchTag::new(Branch::Y, 2).unwrap();
    let r = root_from_series(tag, 0.8, Z_ORDER).unwrap();
    let exact = exact_kappa(1.6, tag.level());
    assert!((r.kappa - exact).abs() < 3.0 * r.first_omitted);
}

#[test]
fn tau_branches_mirror() {
    let t = tau_series(6).unwrap();
    for (tau, mu) in [(0.2, 0.5), (0.33, 0.1), (0.1, 1.0)] {
        let x = t.eval(Branch::X, tau, mu);
        let y = t.eval(Branch::Y, -tau, mu);
        assert!((x - y).abs() < 1e-15);
    }
    assert_eq!(t.x.coeff([5, 4, 5]), rational(-2, 1));
    assert_eq!(t.y.coeff([5, 4, 5]), rational(2, 1));
}

#[test]
fn tau_series_degrades_with_coupling() {
    let t = tau_series(6).unwrap();
    let err = |mu: f64| {
        let tag = BranchTag::new(Branch::X, 3).unwrap();
        let exact = exact_kappa(2.0 * mu, tag.level()) - tag.unperturbed_kappa();
        (t.eval(Branch::X, tag.tau(), mu) - exact).abs() / exact
    };
    assert!(err(0.2) < err(1.0));
}

#[test]
fn branch_consistent_matrix_elements_match_exact_roots() {
    // rho = xi / kappa exactly when rho^2 uses (1 - lambda z)
    let minus = lambda_mu_matrix_elements(8, ShiftSign::Minus).unwrap();
    let plus = lambda_mu_matrix_elements(8, ShiftSign::Plus).unwrap();
    let mu = 0.5;
    let tag = BranchTag::new(Branch::X, 2).unwrap();
    let kappa = exact_kappa(2.0 * mu, tag.level());
    let rho = 2.0 * mu / kappa;
    let (s, c) = sc_closed(rho, Branch::X).unwrap();
    let p = [lambda_of(tag), mu];
    let e_minus = (minus.sqrt2_s.evaluate(&p) - 2f64.sqrt() * s).abs();
    let e_plus = (plus.sqrt2_s.evaluate(&p) - 2f64.sqrt() * s).abs();
    assert!(e_minus < 1e-7, "{e_minus}");
    assert!(e_plus > 10.0 * e_minus);
    assert!((minus.sqrt2_c.evaluate(&p) - 2f64.sqrt() * c).abs() < 1e-7);
    // the product identity 2 S C = cos(z) on the consistent form
    let z = z_series(8).unwrap();
    let prod = minus.sqrt2_s.mul(&minus.sqrt2_c).truncate(8);
    let zv = z.evaluate(&p);
    assert!((prod.evaluate(&p) - zv.cos()).abs() < 1e-7);
}

#[test]
fn series_exports_as_table() {
    let z = z_series(4).unwrap();
    assert_eq!(z.to_table(), "2 2 1/1\n4 4 1/1\n");
}

proptest! {
    #[test]
    fn sc_series_match_closed_forms(rho in 0.0f64..0.5) {
        let sc = sc_expansions(40).unwrap();
        let (s, c) = sc_closed(rho, Branch::X).unwrap();
        let r2 = 2f64.sqrt();
        prop_assert!((sc.sqrt2_s.evaluate(&[rho]) - r2 * s).abs() < 1e-12);
        prop_assert!((sc.sqrt2_c.evaluate(&[rho]) - r2 * c).abs() < 1e-12);
        prop_assert!((sc.s_over_c.evaluate(&[rho]) - s / c).abs() < 1e-12);
        let y = sc.for_branch(Branch::Y);
        prop_assert!((y.sqrt2_c.evaluate(&[rho]) + r2 * c).abs() < 1e-12);
    }

    #[test]
    fn sigma_approximant_is_exact_at_zero(k in 0.5f64..12.0, xi in 0.0f64..5.0) {
        let a = approx_secular_sigma(k, xi, 0.0);
        let e = exact_secular_sigma(k, xi, 0.0).unwrap();
        prop_assert!((a - e).abs() < 1e-12 * (1.0 + xi * xi));
    }
}
