use std::f64::consts::PI;

use ptwell::criticality::*;
use ptwell::oracle::oracle_spectrum;
use ptwell::WellConfig;

#[test]
fn boundary_search_agrees_with_tangency_solution() {
    let ep = solve_exceptional_half().unwrap();
    let cc = critical_coupling(0.5, 10).unwrap();
    assert!((cc.xi_crit - ep.xi_crit).abs() < 1e-6);
    assert_eq!(cc.pair, ep.level_pair);
    assert!(!cc.window_limited);
    assert!((cc.kappa - ep.nu0).abs() < 1e-2);
}

#[test]
fn crossing_precedes_complexification() {
    let ep = solve_exceptional_half().unwrap();
    assert!(crossing_strength(1).unwrap() < ep.xi_crit);
    for m in 1..=3 {
        let r = verify_crossing(m, 1e-3).unwrap();
        assert!(r.secular_value.abs() < 1e-12, "m = {m}");
        assert!(r.factor_value.abs() < 1e-12, "m = {m}");
    }
    assert!(verify_crossing(1, 1e-3).unwrap().separates());
}

#[test]
fn quarter_boundary_matches_oracle() {
    let cc = critical_coupling(0.25, 10).unwrap();
    assert!((cc.xi_crit - 2.6847).abs() < 2e-3, "{}", cc.xi_crit);
    let lowest_complex = |xi: f64| {
        let s = oracle_spectrum(&WellConfig::new(0.25, xi).unwrap(), 512).unwrap();
        s.complex_among_lowest(10, 1e-8).len()
    };
    assert_eq!(lowest_complex(cc.xi_crit - 1e-3), 0);
    assert_eq!(lowest_complex(cc.xi_crit + 1e-3), 2);
}

#[test]
fn boundary_jumps_are_flagged() {
    let samples: Vec<_> = [0.4, 0.5]
        .iter()
        .map(|&a| critical_coupling(a, 10).unwrap())
        .collect();
    let jumps = boundary_jumps(&samples, 1.0);
    assert_eq!(jumps.len(), 1);
    assert!(jumps[0].jump > 2.0);
    assert!(boundary_jumps(&samples, 10.0).is_empty());
}

#[test]
fn exceptional_point_exceeds_pi() {
    let ep = solve_exceptional_half().unwrap();
    assert!(ep.nu0 > PI && ep.nu0 < 1.5 * PI);
    assert!((ep.xi_crit - 2.0 * ep.mu0).abs() < 1e-15);
}
