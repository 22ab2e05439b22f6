//! Weak-coupling series for the symmetric well (`a = 1/2`, `mu = xi / 2`).
//!
//! Near the square-well levels `(4m-3) pi/2` and `(4m-1) pi/2` the root
//! displacement `z` solves `sin z = lambda^2 mu^2 / ((1 - lambda z)^2 - lambda^2 mu^2)`
//! with a branch-dependent `lambda`. Everything here is built from that
//! fixed point in exact rational arithmetic.

use std::f64::consts::PI;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::WellConfig;
use crate::rootfind;
use crate::secular;
use crate::series::{
    asin_coeffs, binomial_coeffs, rational, rescale_coeffs, SeriesPoly, Variables,
};

/// Default order of the `z` expansion in `lambda`.
pub const Z_ORDER: u32 = 11;

/// Order of the truncated `z` used for residual checks.
pub const VERIFY_ORDER: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Levels `4m - 3`, pushed up by the coupling.
    X,
    /// Levels `4m - 1`, pushed down by the coupling.
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BranchTag {
    pub branch: Branch,
    pub m: u32,
}

impl BranchTag {
    pub fn new(branch: Branch, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain {
                what: "branch index m",
                value: 0.0,
            });
        }
        Ok(Self { branch, m })
    }

    /// Level index `n` of the root this tag follows.
    pub fn level(&self) -> usize {
        let m = self.m as usize;
        match self.branch {
            Branch::X => 4 * m - 3,
            Branch::Y => 4 * m - 1,
        }
    }

    /// Square-well momentum `n pi / 2`.
    pub fn unperturbed_kappa(&self) -> f64 {
        self.level() as f64 * PI / 2.0
    }

    /// `tau = 1 / (2m - 1)`.
    pub fn tau(&self) -> f64 {
        1.0 / (2.0 * self.m as f64 - 1.0)
    }
}

pub fn lambda_of(tag: BranchTag) -> f64 {
    match tag.branch {
        Branch::X => -2.0 / ((4.0 * tag.m as f64 - 3.0) * PI),
        Branch::Y => 2.0 / ((4.0 * tag.m as f64 - 1.0) * PI),
    }
}

fn lm_vars(order: u32) -> (SeriesPoly, SeriesPoly) {
    (
        SeriesPoly::variable(Variables::LambdaMu, order, 0),
        SeriesPoly::variable(Variables::LambdaMu, order, 1),
    )
}

/// Right-hand side of the fixed-point equation for a given `z` series.
fn z_map(z: &SeriesPoly, asin: &[BigRational]) -> Result<SeriesPoly> {
    let order = z.order();
    let (l, m) = lm_vars(order);
    let lm2 = l.mul(&m).powi(2);
    let one = SeriesPoly::one(Variables::LambdaMu, order);
    let shifted = one.sub(&l.mul(z));
    let den = shifted.mul(&shifted).sub(&lm2);
    lm2.mul(&den.reciprocal()?).compose(asin)
}

/// `z(lambda, mu)` through `lambda^order`, by fixed-point iteration from `z = 0`.
pub fn z_series(order: u32) -> Result<SeriesPoly> {
    let asin = asin_coeffs(order);
    let mut z = SeriesPoly::zero(Variables::LambdaMu, order);
    // Each sweep fixes at least one more order in lambda.
    for _ in 0..=order + 1 {
        let next = z_map(&z, &asin)?;
        if next.terms().eq(z.terms()) {
            return Ok(next);
        }
        z = next;
    }
    Err(Error::NoConvergence {
        routine: "z_series fixed point",
        iterations: order as usize + 2,
    })
}

/// Right-hand side `lambda^2 mu^2 / ((1 - lambda z)^2 - lambda^2 mu^2)`.
pub fn z_equation_rhs(lambda: f64, mu: f64, z: f64) -> f64 {
    let lm = lambda * mu;
    let shifted = 1.0 - lambda * z;
    lm * lm / (shifted * shifted - lm * lm)
}

#[derive(Debug, Clone, Serialize)]
pub struct ZResidual {
    pub lambda: f64,
    pub z: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZSeriesReport {
    pub mu: f64,
    pub order: u32,
    pub points: Vec<ZResidual>,
}

impl ZSeriesReport {
    /// `log2` of successive residual ratios.
    pub fn empirical_orders(&self) -> Vec<f64> {
        self.points
            .windows(2)
            .map(|w| {
                (w[0].residual / w[1].residual).abs().log2()
                    / (w[0].lambda / w[1].lambda).abs().log2()
            })
            .collect()
    }

    /// Successive residual ratios.
    pub fn ratios(&self) -> Vec<f64> {
        self.points
            .windows(2)
            .map(|w| (w[0].residual / w[1].residual).abs())
            .collect()
    }
}

/// Residual `sin z - rhs` of the series truncated at `lambda^8`.
pub fn verify_z_series(mu: f64, lambdas: &[f64]) -> Result<ZSeriesReport> {
    let z = z_series(VERIFY_ORDER)?;
    let mut points = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let zv = z.evaluate(&[lambda, mu]);
        let rhs = z_equation_rhs(lambda, mu, zv);
        if !(rhs.abs() < 1.0) {
            return Err(Error::Domain {
                what: "fixed-point right-hand side",
                value: rhs,
            });
        }
        points.push(ZResidual {
            lambda,
            z: zv,
            residual: zv.sin() - rhs,
        });
    }
    Ok(ZSeriesReport {
        mu,
        order: VERIFY_ORDER,
        points,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesRoot {
    pub tag: BranchTag,
    pub mu: f64,
    pub order: u32,
    pub kappa: f64,
    /// Root displacement from the square-well level, positive by convention.
    pub displacement: f64,
    /// Magnitude of the first omitted order of `z`.
    pub first_omitted: f64,
    /// `|lambda| mu < 1`; outside this the series is not trusted.
    pub convergent: bool,
}

/// Approximate root `kappa` of the tagged level from the `z` series.
pub fn root_from_series(tag: BranchTag, mu: f64, order: u32) -> Result<SeriesRoot> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::Coupling(2.0 * mu));
    }
    let z = z_series(order + 1)?;
    let lambda = lambda_of(tag);
    let point = [lambda, mu];
    let displacement = z.truncate(order).evaluate(&point);
    let first_omitted = z.slice(order + 1).evaluate(&point).abs();
    let kappa = match tag.branch {
        Branch::X => tag.unperturbed_kappa() + displacement,
        Branch::Y => tag.unperturbed_kappa() - displacement,
    };
    Ok(SeriesRoot {
        tag,
        mu,
        order,
        kappa,
        displacement,
        first_omitted,
        convergent: lambda.abs() * mu < 1.0,
    })
}

/// `x(tau, mu)` and `y(tau, mu)` over `(tau, mu, 1/pi)`.
#[derive(Debug, Clone)]
pub struct TauSeries {
    pub x: SeriesPoly,
    pub y: SeriesPoly,
}

impl TauSeries {
    pub fn eval(&self, branch: Branch, tau: f64, mu: f64) -> f64 {
        let point = [tau, mu, 1.0 / PI];
        match branch {
            Branch::X => self.x.evaluate(&point),
            Branch::Y => self.y.evaluate(&point),
        }
    }
}

/// `lambda` as a series in `tau`: `s (tau/pi) / (1 + s tau/2)`, with `s = -1` on x.
fn lambda_in_tau(branch: Branch, order: u32) -> SeriesPoly {
    let sign: i64 = match branch {
        Branch::X => -1,
        Branch::Y => 1,
    };
    let mut s = SeriesPoly::zero(Variables::TauMu, order);
    for k in 0..order {
        // s tau/pi (-s tau/2)^k
        let c = rational(sign * (-sign).pow(k), 1i64 << k);
        s.add_term([k + 1, 0, 1], c);
    }
    s
}

pub fn tau_series(order: u32) -> Result<TauSeries> {
    let z = z_series(order)?;
    Ok(TauSeries {
        x: z.substitute_leading(&lambda_in_tau(Branch::X, order))?,
        y: z.substitute_leading(&lambda_in_tau(Branch::Y, order))?,
    })
}

/// `sqrt(2) S`, `sqrt(2) C` and `S/C` as series in `rho`.
#[derive(Debug, Clone)]
pub struct ScExpansions {
    pub branch: Branch,
    pub sqrt2_s: SeriesPoly,
    pub sqrt2_c: SeriesPoly,
    pub s_over_c: SeriesPoly,
}

impl ScExpansions {
    /// The y-branch variant, with the sign of `C` flipped.
    pub fn for_branch(&self, branch: Branch) -> Self {
        if branch == self.branch {
            return self.clone();
        }
        Self {
            branch,
            sqrt2_s: self.sqrt2_s.clone(),
            sqrt2_c: self.sqrt2_c.neg(),
            s_over_c: self.s_over_c.neg(),
        }
    }
}

/// Coefficients in `u` of `(1 - u/4)^(-1/2)`, `(1 - u/2)^(1/2)`, `(1 - u/2)^(-1/2)`.
fn sc_generators(n: u32) -> [Vec<BigRational>; 3] {
    let half = rational(1, 2);
    let neg_half = rational(-1, 2);
    [
        rescale_coeffs(&binomial_coeffs(&neg_half, n), &rational(-1, 4)),
        rescale_coeffs(&binomial_coeffs(&half, n), &rational(-1, 2)),
        rescale_coeffs(&binomial_coeffs(&neg_half, n), &rational(-1, 2)),
    ]
}

/// Composes the three closed forms with a series `u = rho^2`.
fn sc_of_u(u: &SeriesPoly) -> Result<[SeriesPoly; 3]> {
    let [s, root, inv_root] = sc_generators(u.order());
    let sqrt2_s = u.compose(&s)?;
    let sqrt2_c = u.compose(&root)?.mul(&sqrt2_s);
    let s_over_c = u.compose(&inv_root)?;
    Ok([sqrt2_s, sqrt2_c, s_over_c])
}

/// Taylor expansions in `rho` of the x-branch matrix-element factors.
pub fn sc_expansions(order: u32) -> Result<ScExpansions> {
    let rho = SeriesPoly::variable(Variables::Rho, order, 0);
    let [sqrt2_s, sqrt2_c, s_over_c] = sc_of_u(&rho.powi(2))?;
    Ok(ScExpansions {
        branch: Branch::X,
        sqrt2_s,
        sqrt2_c,
        s_over_c,
    })
}

/// Closed forms `S = (2 - rho^2/2)^(-1/2)` and `C = ((1 - rho^2/2)/(2 - rho^2/2))^(1/2)`
/// on the x-branch; the y-branch flips `C`.
pub fn sc_closed(rho: f64, branch: Branch) -> Result<(f64, f64)> {
    let u = rho * rho;
    if !(u < 2.0) {
        return Err(Error::Pole(u));
    }
    let s = (2.0 - u / 2.0).powf(-0.5);
    let c = ((1.0 - u / 2.0) / (2.0 - u / 2.0)).sqrt();
    Ok(match branch {
        Branch::X => (s, c),
        Branch::Y => (s, -c),
    })
}

/// Sign inside `rho^2 = 4 lambda^2 mu^2 / (1 -/+ lambda z)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftSign {
    /// `(1 - lambda z)`: `rho = xi / kappa` on both branches.
    Minus,
    /// `(1 + lambda z)`: the form whose expansion matches the reference
    /// matrix-element tables term by term.
    Plus,
}

/// `rho^2` as a series in `(lambda, mu)`.
pub fn rho_squared_series(order: u32, shift: ShiftSign) -> Result<SeriesPoly> {
    let z = z_series(order)?;
    let (l, m) = lm_vars(order);
    let lz = l.mul(&z);
    let one = SeriesPoly::one(Variables::LambdaMu, order);
    let base = match shift {
        ShiftSign::Minus => one.sub(&lz),
        ShiftSign::Plus => one.add(&lz),
    };
    let four = rational(4, 1);
    Ok(l.mul(&m)
        .powi(2)
        .scale(&four)
        .mul(&base.mul(&base).reciprocal()?))
}

#[derive(Debug, Clone)]
pub struct MatrixElementSeries {
    pub shift: ShiftSign,
    pub sqrt2_s: SeriesPoly,
    pub sqrt2_c: SeriesPoly,
}

/// `sqrt(2) S` and `sqrt(2) C` composed with `rho(lambda, mu)`.
pub fn lambda_mu_matrix_elements(order: u32, shift: ShiftSign) -> Result<MatrixElementSeries> {
    let u = rho_squared_series(order, shift)?;
    let [sqrt2_s, sqrt2_c, _] = sc_of_u(&u)?;
    Ok(MatrixElementSeries {
        shift,
        sqrt2_s,
        sqrt2_c,
    })
}

/// `S / C` composed with `rho(lambda, mu)`.
pub fn tan_kappa_series(order: u32, shift: ShiftSign) -> Result<SeriesPoly> {
    let u = rho_squared_series(order, shift)?;
    let [_, _, s_over_c] = sc_of_u(&u)?;
    Ok(s_over_c)
}

/// Left side of the secular equation expanded to second order in `sigma`,
/// where `a = 1/2 + sigma / (2 kappa)`.
pub fn approx_secular_sigma(kappa: f64, xi: f64, sigma: f64) -> f64 {
    let (s, c) = kappa.sin_cos();
    let bracket = s * (1.0 - c) - sigma * (1.0 - c) - 0.5 * sigma * sigma * s;
    (2.0 * kappa).sin() + xi * xi / (2.0 * kappa * kappa) * bracket
}

/// `-2 D(kappa)` with the displacement tied to `kappa` by `a = 1/2 + sigma / (2 kappa)`.
pub fn exact_secular_sigma(kappa: f64, xi: f64, sigma: f64) -> Result<f64> {
    let config = WellConfig::new(0.5 + sigma / (2.0 * kappa), xi)?;
    Ok(-2.0 * secular::eval_secular(&config, kappa)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaRoot {
    pub sigma: f64,
    pub approximate: f64,
    pub exact: f64,
}

impl SigmaRoot {
    pub fn error(&self) -> f64 {
        (self.approximate - self.exact).abs()
    }
}

/// Roots of the approximant and of the exact equation inside `(lo, hi)`.
pub fn sigma_roots(xi: f64, sigma: f64, lo: f64, hi: f64) -> Result<SigmaRoot> {
    let approximate = rootfind::bisect(|k| approx_secular_sigma(k, xi, sigma), lo, hi, 1e-14)?;
    let exact_f = |k: f64| exact_secular_sigma(k, xi, sigma).unwrap_or(f64::NAN);
    let exact = rootfind::bisect(exact_f, lo, hi, 1e-14)?;
    Ok(SigmaRoot {
        sigma,
        approximate,
        exact,
    })
}

/// Coefficient of `lambda^i mu^j`.
pub fn coefficient(series: &SeriesPoly, exps: [u32; 2]) -> BigRational {
    series.coeff([exps[0], exps[1], 0])
}

/// `true` when `a` and `b` agree term by term through `order` in the leading variable.
pub fn agree_through(a: &SeriesPoly, b: &SeriesPoly, order: u32) -> bool {
    a.truncate(order).sub(&b.truncate(order)).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        rational(n, d)
    }

    #[test]
    fn lambda_values() {
        let x1 = BranchTag::new(Branch::X, 1).unwrap();
        let y1 = BranchTag::new(Branch::Y, 1).unwrap();
        assert!((lambda_of(x1) + 2.0 / PI).abs() < 1e-15);
        assert!((lambda_of(y1) - 2.0 / (3.0 * PI)).abs() < 1e-15);
        assert!(BranchTag::new(Branch::X, 0).is_err());
        for m in 1..6 {
            for b in [Branch::X, Branch::Y] {
                let t = BranchTag { branch: b, m };
                let u = BranchTag {
                    branch: b,
                    m: m + 1,
                };
                assert!(lambda_of(u).abs() < lambda_of(t).abs());
            }
        }
    }

    #[test]
    fn z_leading_coefficients() {
        let z = z_series(11).unwrap();
        assert_eq!(coefficient(&z, [2, 2]), r(1, 1));
        assert_eq!(coefficient(&z, [6, 6]), r(7, 6));
        assert_eq!(coefficient(&z, [9, 8]), r(40, 3));
        assert_eq!(coefficient(&z, [10, 10]), r(83, 40));
        assert_eq!(coefficient(&z, [3, 2]), r(0, 1));
    }

    #[test]
    fn zero_lambda_is_unperturbed() {
        let rep = verify_z_series(1.0, &[0.0]).unwrap();
        assert_eq!(rep.points[0].z, 0.0);
        assert_eq!(rep.points[0].residual, 0.0);
        let root = root_from_series(BranchTag::new(Branch::X, 3).unwrap(), 0.0, 11).unwrap();
        assert_eq!(root.kappa, 9.0 * PI / 2.0);
    }

    #[test]
    fn tau_series_leading_terms() {
        let t = tau_series(5).unwrap();
        // mu^2 / pi^2 tau^2 on both branches
        assert_eq!(t.x.coeff([2, 2, 2]), r(1, 1));
        assert_eq!(t.y.coeff([2, 2, 2]), r(1, 1));
        assert_eq!(t.x.coeff([3, 2, 2]), r(1, 1));
        assert_eq!(t.y.coeff([3, 2, 2]), r(-1, 1));
        assert_eq!(t.x.coeff([5, 4, 5]), r(-2, 1));
    }

    #[test]
    fn sc_closed_pole() {
        assert!(matches!(sc_closed(1.5, Branch::X), Err(Error::Pole(_))));
        let (s, c) = sc_closed(0.3, Branch::Y).unwrap();
        assert!((s * s + c * c - 1.0).abs() < 1e-14);
        assert!(c < 0.0);
    }

    #[test]
    fn sigma_zero_matches_symmetric_determinant() {
        let cfg = WellConfig::new(0.5, 1.3).unwrap();
        for k in [0.7, 2.2, 5.1] {
            let d = secular::eval_secular(&cfg, k).unwrap();
            assert!((approx_secular_sigma(k, 1.3, 0.0) + 2.0 * d).abs() < 1e-13);
        }
    }
}
