//! Exceptional points, unavoided crossings and the reality boundary in `xi`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::WellConfig;
use crate::rootfind;
use crate::secular::{self, find_spectrum};

/// Residual bound on the two tangency equations.
pub const TANGENCY_TOL: f64 = 1e-12;
/// Width in `xi` to which boundaries are bisected.
pub const XI_TOL: f64 = 1e-8;
/// Coarse step of the boundary search in `xi`.
pub const XI_STEP: f64 = 0.02;
/// Upper end of the boundary search.
pub const XI_SEARCH_MAX: f64 = 100.0;

/// The lowest symmetry-breaking point at `a = 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceptionalPoint {
    pub nu0: f64,
    pub mu0: f64,
    pub xi_crit: f64,
    pub level_pair: (usize, usize),
    /// Residuals of `cos nu = -mu^2/(nu^2 - mu^2)` and `-sin nu = 2 mu^2 nu/(nu^2 - mu^2)^2`.
    pub residuals: [f64; 2],
}

/// `f(nu) = nu - 2 tan(nu/2) cos nu` and its derivative.
fn reduced(nu: f64) -> f64 {
    nu - 2.0 * (0.5 * nu).tan() * nu.cos()
}

fn reduced_derivative(nu: f64) -> f64 {
    let t = (0.5 * nu).tan();
    1.0 - (1.0 + t * t) * nu.cos() + 2.0 * t * nu.sin()
}

/// Residuals of the coupled tangency equations at `(nu, mu)`.
pub fn tangency_residuals(nu: f64, mu: f64) -> [f64; 2] {
    let m2 = mu * mu;
    let den = nu * nu - m2;
    [nu.cos() + m2 / den, -nu.sin() - 2.0 * m2 * nu / (den * den)]
}

pub fn solve_exceptional_half() -> Result<ExceptionalPoint> {
    // f -> -inf as nu -> pi+, f(3 pi/2) = 3 pi/2
    let r = rootfind::hybrid(
        reduced,
        reduced_derivative,
        PI + 1e-9,
        1.5 * PI,
        1e-3,
        1e-14,
    )?;
    let nu0 = r.root;
    let mu0 = (-2.0 * nu0 * nu0.cos().powi(2) / nu0.sin()).sqrt();
    let residuals = tangency_residuals(nu0, mu0);
    if residuals.iter().any(|x| !(x.abs() < TANGENCY_TOL)) {
        return Err(Error::Residual(residuals[0].abs().max(residuals[1].abs())));
    }
    let xi_crit = 2.0 * mu0;
    // just below the merger the two levels closest to nu0 are the pair
    let below = WellConfig::new(0.5, xi_crit * (1.0 - 1e-6))?;
    let spec = find_spectrum(&below, 4)?;
    let mut idx: Vec<(usize, f64)> = spec
        .kappas()
        .iter()
        .enumerate()
        .map(|(i, k)| (i + 1, (k - nu0).abs()))
        .collect();
    idx.sort_by(|x, y| x.1.total_cmp(&y.1));
    let (p, q) = (idx[0].0.min(idx[1].0), idx[0].0.max(idx[1].0));
    Ok(ExceptionalPoint {
        nu0,
        mu0,
        xi_crit,
        level_pair: (p, q),
        residuals,
    })
}

/// `xi` at which level `4m - 3` crosses the fixed level `(2m - 1) pi` at `a = 1/2`.
pub fn crossing_strength(m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain {
            what: "crossing index m",
            value: 0.0,
        });
    }
    Ok(2f64.sqrt() * PI * (2.0 * m as f64 - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalCoupling {
    pub a: f64,
    pub window: usize,
    pub xi_crit: f64,
    /// Location of the merged pair just above the boundary.
    pub kappa: f64,
    /// Levels that merge, counted in the unbroken phase.
    pub pair: (usize, usize),
    /// The merging pair is the highest tracked one; a larger window may lower the boundary.
    pub window_limited: bool,
}

/// `Some(gap location)` when a pair among the first `window` levels has left the real axis.
fn merged(a: f64, xi: f64, window: usize) -> Result<Option<(f64, usize)>> {
    let config = WellConfig::new(a, xi)?;
    match find_spectrum(&config, window) {
        Ok(_) => Ok(None),
        Err(Error::Merger { found, gaps, .. }) => {
            let g = gaps.first().copied().unwrap_or(f64::NAN);
            Ok(Some((g, found)))
        }
        Err(e) => Err(e),
    }
}

/// Smallest `xi` at which two of the first `window` real levels merge.
pub fn critical_coupling(a: f64, window: usize) -> Result<CriticalCoupling> {
    if window < 2 {
        return Err(Error::Domain {
            what: "level window",
            value: window as f64,
        });
    }
    WellConfig::new(a, 0.0)?;
    let mut lo = 0.0;
    let mut hi = None;
    let mut xi = XI_STEP;
    while xi <= XI_SEARCH_MAX {
        if merged(a, xi, window)?.is_some() {
            hi = Some(xi);
            break;
        }
        lo = xi;
        xi += XI_STEP;
    }
    let mut hi = hi.ok_or(Error::NoConvergence {
        routine: "critical_coupling search",
        iterations: (XI_SEARCH_MAX / XI_STEP) as usize,
    })?;
    while hi - lo > XI_TOL {
        let mid = 0.5 * (lo + hi);
        if merged(a, mid, window)?.is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (kappa, _) = merged(a, hi, window)?.expect("boundary bracket lost its merger");
    let below = find_spectrum(&WellConfig::new(a, lo)?, window)?;
    let kappas = below.kappas();
    let below_count = kappas.iter().filter(|&&k| k < kappa).count();
    let first = below_count.max(1);
    let pair = (first, first + 1);
    Ok(CriticalCoupling {
        a,
        window,
        xi_crit: 0.5 * (lo + hi),
        kappa,
        pair,
        window_limited: pair.1 >= window,
    })
}

/// A step in `a` whose boundary jumps by more than the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryJump {
    pub a_lo: f64,
    pub a_hi: f64,
    pub jump: f64,
}

/// Flags non-smooth behaviour of a sampled boundary; not an error.
pub fn boundary_jumps(samples: &[CriticalCoupling], threshold: f64) -> Vec<BoundaryJump> {
    samples
        .windows(2)
        .filter_map(|w| {
            let jump = (w[1].xi_crit - w[0].xi_crit).abs();
            (jump > threshold).then_some(BoundaryJump {
                a_lo: w[0].a,
                a_hi: w[1].a,
                jump,
            })
        })
        .collect()
}

/// Check of the crossing at `xi = crossing_strength(m)` for `a = 1/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingReport {
    pub m: u32,
    pub xi: f64,
    /// The fixed level `(2m - 1) pi`.
    pub kappa_fixed: f64,
    /// `D` and `D'` at the fixed level.
    pub secular_value: f64,
    pub secular_derivative: f64,
    /// `cos k + (xi^2 / 4k^2)(1 - cos k)` at the fixed level.
    pub factor_value: f64,
    /// Level `4m - 3` from the spectrum solver, when the spectrum below it is real.
    pub kappa_solver: Option<f64>,
    /// Real roots within a quarter period of the fixed level at `xi -+ offset`.
    pub below: Vec<f64>,
    pub above: Vec<f64>,
    pub offset: f64,
}

impl CrossingReport {
    /// Two distinct real roots nearest the crossing on each side.
    pub fn separates(&self) -> bool {
        self.below.len() == 2
            && self.above.len() == 2
            && self.below[0] < self.below[1]
            && self.above[0] < self.above[1]
    }
}

fn roots_near(config: &WellConfig, centre: f64, half_width: f64) -> Result<Vec<f64>> {
    let scan = secular::bracket_roots(config, centre + half_width)?;
    let mut out = Vec::new();
    for b in scan.brackets.iter().filter(|b| b.hi > centre - half_width) {
        let r = secular::refine_bracket(config, b)?;
        if (r.root - centre).abs() < half_width {
            out.push(r.root);
        }
    }
    for t in scan.touching() {
        if (t.kappa - centre).abs() < half_width {
            out.push(t.kappa);
            out.push(t.kappa);
        }
    }
    // the crossing pair; other branches can enter the window at large m
    out.sort_by(|x, y| (x - centre).abs().total_cmp(&(y - centre).abs()));
    out.truncate(2);
    out.sort_by(f64::total_cmp);
    Ok(out)
}

pub fn verify_crossing(m: u32, offset: f64) -> Result<CrossingReport> {
    let xi = crossing_strength(m)?;
    let config = WellConfig::new(0.5, xi)?;
    let kappa_fixed = (2.0 * m as f64 - 1.0) * PI;
    let secular_value = secular::eval_secular(&config, kappa_fixed)?;
    let secular_derivative = secular::eval_secular_derivative(&config, kappa_fixed)?;
    let c = kappa_fixed.cos();
    let factor_value = c + xi * xi / (4.0 * kappa_fixed * kappa_fixed) * (1.0 - c);
    let level = 4 * m as usize - 3;
    let kappa_solver = match find_spectrum(&config, level) {
        Ok(s) => Some(s.kappas()[level - 1]),
        Err(Error::Merger { .. }) => None,
        Err(e) => return Err(e),
    };
    let half = 0.25 * PI;
    let below = roots_near(&config.with_xi(xi - offset)?, kappa_fixed, half)?;
    let above = roots_near(&config.with_xi(xi + offset)?, kappa_fixed, half)?;
    Ok(CrossingReport {
        m,
        xi,
        kappa_fixed,
        secular_value,
        secular_derivative,
        factor_value,
        kappa_solver,
        below,
        above,
        offset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exceptional_point_values() {
        let ep = solve_exceptional_half().unwrap();
        assert!((ep.nu0 - 3.874366817).abs() < 1e-8);
        assert!((ep.mu0 - 2.529882472).abs() < 1e-8);
        assert!((ep.xi_crit - 5.059764944).abs() < 1e-8);
        assert!(ep.nu0 > PI);
        assert_eq!(ep.level_pair, (2, 3));
    }

    #[test]
    fn crossing_strengths() {
        assert!((crossing_strength(1).unwrap() - 4.442882938158366).abs() < 1e-12);
        assert!((crossing_strength(2).unwrap() - 3.0 * 2f64.sqrt() * PI).abs() < 1e-12);
        assert!(crossing_strength(0).is_err());
    }

    #[test]
    fn first_crossing() {
        let r = verify_crossing(1, 0.01).unwrap();
        assert!(r.secular_value.abs() < 1e-14);
        assert!(r.factor_value.abs() < 1e-14);
        assert!((r.kappa_solver.unwrap() - PI).abs() < 1e-10);
        assert!(r.separates());
        assert!(r.below[0] < PI && r.below[1] >= PI - 1e-12);
    }
}
