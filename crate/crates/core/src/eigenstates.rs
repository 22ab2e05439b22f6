//! Matching system, amplitudes and the piecewise wave function.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CoefficientChain, NormConvention, SpectralRoot, WaveCoeffs, WellConfig};
use crate::secular;

/// Denominators below this magnitude disqualify a closed-formula chain.
pub const DEGENERATE_TOL: f64 = 1e-6;
/// Relative `|D(kappa)|` accepted as a root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-9;
/// Relative `|D'(kappa)|` below which a root counts as double.
pub const DOUBLE_ROOT_TOL: f64 = 1e-8;
/// Relative residual of the amplitudes in the matching system.
pub const MATCHING_TOL: f64 = 1e-10;
/// Agreement required between the two chains when both apply, beyond the
/// part explained by rounding of `kappa`.
pub const CHAIN_CONSISTENCY_TOL: f64 = 1e-10;

/// The 4x4 real system acting on `(alpha, beta, gamma, delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchingMatrix {
    pub entries: [[f64; 4]; 4],
    pub kappa: f64,
    pub config: WellConfig,
}

pub fn matching_matrix(config: &WellConfig, kappa: f64) -> Result<MatchingMatrix> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::Domain {
            what: "kappa",
            value: kappa,
        });
    }
    let a = config.a();
    let g = config.xi() / kappa;
    let (s1, c1) = (kappa * (1.0 - a)).sin_cos();
    let (sa, ca) = (kappa * a).sin_cos();
    Ok(MatchingMatrix {
        entries: [
            [s1, 0.0, -ca, 0.0],
            [0.0, s1, 0.0, -sa],
            [-c1, g * s1, sa, 0.0],
            [g * s1, c1, 0.0, ca],
        ],
        kappa,
        config: *config,
    })
}

fn minor3(m: &[[f64; 4]; 4], skip_row: usize, skip_col: usize) -> f64 {
    let rows: Vec<usize> = (0..4).filter(|&r| r != skip_row).collect();
    let cols: Vec<usize> = (0..4).filter(|&c| c != skip_col).collect();
    let e = |i: usize, j: usize| m[rows[i]][cols[j]];
    e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
        - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
}

impl MatchingMatrix {
    pub fn determinant(&self) -> f64 {
        (0..4)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * self.entries[0][j] * minor3(&self.entries, 0, j)
            })
            .sum()
    }

    pub fn apply(&self, v: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (o, row) in out.iter_mut().zip(&self.entries) {
            *o = row.iter().zip(&v).map(|(m, x)| m * x).sum();
        }
        out
    }

    fn norm_inf(&self) -> f64 {
        self.entries
            .iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `|M v|_inf / (|M|_inf |v|_inf)`.
    pub fn residual(&self, v: [f64; 4]) -> f64 {
        let mv = self.apply(v);
        let num = mv.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let vn = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if vn == 0.0 {
            return f64::INFINITY;
        }
        num / (self.norm_inf() * vn)
    }

    /// Largest column of the adjugate; spans the null space when the rank is three.
    pub fn adjugate_null_vector(&self) -> [f64; 4] {
        let mut best = [0.0; 4];
        let mut best_norm = -1.0;
        for row in 0..4 {
            let mut col = [0.0; 4];
            for (j, c) in col.iter_mut().enumerate() {
                let sign = if (row + j) % 2 == 0 { 1.0 } else { -1.0 };
                *c = sign * minor3(&self.entries, row, j);
            }
            let n: f64 = col.iter().map(|x| x * x).sum();
            if n > best_norm {
                best_norm = n;
                best = col;
            }
        }
        best
    }
}

fn amplitude_scale(config: &WellConfig, kappa: f64) -> f64 {
    let r = config.xi() / kappa;
    0.5 * (1.0 + r * r)
}

fn normalize(v: [f64; 4], chain: CoefficientChain) -> WaveCoeffs {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let pinned = |x: f64| x.abs() > DEGENERATE_TOL * max;
    let (factor, norm_convention) = if pinned(v[0]) {
        (v[0], NormConvention::AlphaUnit)
    } else if pinned(v[3]) {
        (v[3], NormConvention::DeltaUnit)
    } else {
        (v[2], NormConvention::GammaUnit)
    };
    WaveCoeffs {
        alpha: v[0] / factor,
        beta: v[1] / factor,
        gamma: v[2] / factor,
        delta: v[3] / factor,
        norm_convention,
        chain,
    }
}

/// Amplitudes of a real-regime eigenstate.
pub fn coefficients(config: &WellConfig, root: &SpectralRoot) -> Result<WaveCoeffs> {
    let kappa = root.real_kappa()?;
    coefficients_at(config, kappa)
}

/// Amplitudes at a real root `kappa` of `D`.
pub fn coefficients_at(config: &WellConfig, kappa: f64) -> Result<WaveCoeffs> {
    let m = matching_matrix(config, kappa)?;
    let scale = amplitude_scale(config, kappa);
    let d = secular::eval_secular(config, kappa)?;
    if d.abs() > ROOT_RESIDUAL_TOL * scale {
        return Err(Error::Residual(d.abs() / scale));
    }
    let dd = secular::eval_secular_derivative(config, kappa)?;
    if dd.abs() < DOUBLE_ROOT_TOL * scale {
        return Err(Error::ExceptionalPoint { kappa });
    }

    let a = config.a();
    let g = config.xi() / kappa;
    let (sk, ck) = kappa.sin_cos();
    let (s1, c1) = (kappa * (1.0 - a)).sin_cos();
    let (sa, ca) = (kappa * a).sin_cos();

    let from_gamma = || {
        let gamma = 1.0;
        let delta = -g * ca * s1 / sk * gamma;
        [ca / s1 * gamma, sa / s1 * delta, gamma, delta]
    };
    let from_delta = || {
        let delta = 1.0;
        let gamma = g * sa * s1 / ck * delta;
        [gamma * ca / s1, sa / s1 * delta, gamma, delta]
    };

    let outer_ok = s1.abs() > DEGENERATE_TOL;
    let gamma_ok = outer_ok && sk.abs() > DEGENERATE_TOL;
    let delta_ok = outer_ok && ck.abs() > DEGENERATE_TOL;

    let (v, chain) = if gamma_ok {
        let v = from_gamma();
        if delta_ok {
            // the other chain must give the same gamma / delta ratio
            let w = from_delta();
            let lhs = v[2] * w[3];
            let rhs = w[2] * v[3];
            let size = lhs.abs().max(rhs.abs()).max(1.0);
            let diff = (lhs - rhs).abs() / size;
            // the gap is D / (sin k cos k); allow for kappa known only to an ulp
            let floor = 4.0 * f64::EPSILON * kappa * dd.abs() / (sk * ck).abs();
            if diff > CHAIN_CONSISTENCY_TOL + floor {
                return Err(Error::Residual(diff));
            }
        }
        (v, CoefficientChain::FromGamma)
    } else if delta_ok {
        (from_delta(), CoefficientChain::FromDelta)
    } else if !outer_ok && sa.abs() < DEGENERATE_TOL {
        // gamma = alpha = 0
        ([0.0, -ca / c1, 0.0, 1.0], CoefficientChain::OuterNode)
    } else if !outer_ok && ca.abs() < DEGENERATE_TOL {
        // delta = beta = 0
        ([sa / c1, 0.0, 1.0, 0.0], CoefficientChain::OuterNode)
    } else {
        (m.adjugate_null_vector(), CoefficientChain::Adjugate)
    };

    let coeffs = normalize(v, chain);
    let res = m.residual(coeffs.as_array());
    if !(res < MATCHING_TOL) {
        let fallback = normalize(m.adjugate_null_vector(), CoefficientChain::Adjugate);
        let res_fb = m.residual(fallback.as_array());
        if res_fb < MATCHING_TOL {
            return Ok(fallback);
        }
        return Err(Error::Residual(res.min(res_fb)));
    }
    Ok(coeffs)
}

/// Which one-sided limit to take at an interaction point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Piece {
    Left,
    Centre,
    Right,
}

fn piece_at(a: f64, x: f64, side: Side) -> Piece {
    let lower = match side {
        Side::Left => x <= -a,
        Side::Right => x < -a,
    };
    let upper = match side {
        Side::Left => x > a,
        Side::Right => x >= a,
    };
    if lower {
        Piece::Left
    } else if upper {
        Piece::Right
    } else {
        Piece::Centre
    }
}

fn lr(c: &WaveCoeffs) -> (Complex64, Complex64) {
    (
        Complex64::new(c.alpha, -c.beta),
        Complex64::new(c.alpha, c.beta),
    )
}

fn psi_piece(c: &WaveCoeffs, kappa: f64, piece: Piece, x: f64) -> Complex64 {
    let (l, r) = lr(c);
    match piece {
        Piece::Left => l * (kappa * (x + 1.0)).sin(),
        Piece::Centre => {
            let (s, co) = (kappa * x).sin_cos();
            Complex64::new(c.gamma * co, c.delta * s)
        }
        Piece::Right => r * (kappa * (1.0 - x)).sin(),
    }
}

fn dpsi_piece(c: &WaveCoeffs, kappa: f64, piece: Piece, x: f64) -> Complex64 {
    let (l, r) = lr(c);
    match piece {
        Piece::Left => l * kappa * (kappa * (x + 1.0)).cos(),
        Piece::Centre => {
            let (s, co) = (kappa * x).sin_cos();
            Complex64::new(-kappa * c.gamma * s, kappa * c.delta * co)
        }
        Piece::Right => -r * kappa * (kappa * (1.0 - x)).cos(),
    }
}

/// `psi(x)` on `[-1, 1]`; the central formula is used at `x = +-a`.
pub fn eval_wavefunction(
    coeffs: &WaveCoeffs,
    kappa: f64,
    config: &WellConfig,
    x: f64,
) -> Complex64 {
    let a = config.a();
    let piece = if x < -a {
        Piece::Left
    } else if x > a {
        Piece::Right
    } else {
        Piece::Centre
    };
    psi_piece(coeffs, kappa, piece, x)
}

/// `psi'(x)`; at `x = +-a` the central one-sided limit.
pub fn eval_derivative(coeffs: &WaveCoeffs, kappa: f64, config: &WellConfig, x: f64) -> Complex64 {
    let a = config.a();
    let piece = if x < -a {
        Piece::Left
    } else if x > a {
        Piece::Right
    } else {
        Piece::Centre
    };
    dpsi_piece(coeffs, kappa, piece, x)
}

/// One-sided values `(psi, psi')` at `x`, taking the limit from `side`.
pub fn eval_sided(
    coeffs: &WaveCoeffs,
    kappa: f64,
    config: &WellConfig,
    x: f64,
    side: Side,
) -> (Complex64, Complex64) {
    let piece = piece_at(config.a(), x, side);
    (
        psi_piece(coeffs, kappa, piece, x),
        dpsi_piece(coeffs, kappa, piece, x),
    )
}

/// `A sin(kx) + B cos(kx)` on one interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub sin: Complex64,
    pub cos: Complex64,
}

impl Segment {
    pub fn eval(&self, kappa: f64, x: f64) -> Complex64 {
        let (s, c) = (kappa * x).sin_cos();
        self.sin * s + self.cos * c
    }
}

/// A real-regime eigenstate with its three segments.
#[derive(Debug, Clone, Serialize)]
pub struct Eigenstate {
    pub n: usize,
    pub kappa: f64,
    pub config: WellConfig,
    pub coeffs: WaveCoeffs,
    pub segments: [Segment; 3],
}

impl Eigenstate {
    pub fn new(config: &WellConfig, root: &SpectralRoot) -> Result<Self> {
        let kappa = root.real_kappa()?;
        let coeffs = coefficients_at(config, kappa)?;
        Ok(Self::from_coeffs(root.n, kappa, config, coeffs))
    }

    pub fn from_coeffs(n: usize, kappa: f64, config: &WellConfig, coeffs: WaveCoeffs) -> Self {
        let a = config.a();
        let (sk, ck) = kappa.sin_cos();
        let (l, r) = lr(&coeffs);
        let segments = [
            Segment {
                lo: -1.0,
                hi: -a,
                sin: l * ck,
                cos: l * sk,
            },
            Segment {
                lo: -a,
                hi: a,
                sin: Complex64::new(0.0, coeffs.delta),
                cos: Complex64::new(coeffs.gamma, 0.0),
            },
            Segment {
                lo: a,
                hi: 1.0,
                sin: -r * ck,
                cos: r * sk,
            },
        ];
        Self {
            n,
            kappa,
            config: *config,
            coeffs,
            segments,
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        eval_wavefunction(&self.coeffs, self.kappa, &self.config, x)
    }

    pub fn derivative(&self, x: f64) -> Complex64 {
        eval_derivative(&self.coeffs, self.kappa, &self.config, x)
    }

    pub fn energy(&self) -> f64 {
        self.kappa * self.kappa
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::secular::find_spectrum;
    use std::f64::consts::PI;

    #[test]
    fn determinant_equals_secular_function() {
        let cfg = WellConfig::new(0.37, 2.3).unwrap();
        for k in [0.4, 1.9, 3.3, 7.7, 12.1] {
            let det = matching_matrix(&cfg, k).unwrap().determinant();
            let d = secular::eval_secular(&cfg, k).unwrap();
            assert!((det - d).abs() < 1e-13, "{det} vs {d}");
        }
    }

    #[test]
    fn zero_coupling_decouples() {
        let cfg = WellConfig::new(0.5, 0.0).unwrap();
        let m = matching_matrix(&cfg, 1.3).unwrap();
        assert_eq!(m.entries[2][1], 0.0);
        assert_eq!(m.entries[3][0], 0.0);
    }

    #[test]
    fn symmetric_generic_root_relations() {
        let cfg = WellConfig::new(0.5, 2.0).unwrap();
        let spec = find_spectrum(&cfg, 5).unwrap();
        for (n, k) in spec.kappas().into_iter().enumerate() {
            if (n + 1) % 2 == 0 {
                continue;
            }
            let c = coefficients_at(&cfg, k).unwrap();
            let t = (k / 2.0).tan();
            assert_eq!(c.norm_convention, NormConvention::AlphaUnit);
            assert!((c.beta - c.delta).abs() < 1e-10);
            assert!((c.gamma - t).abs() < 1e-10 * t.abs().max(1.0));
            assert!((c.delta + 2.0 / (2.0 * k) * t).abs() < 1e-10 * t.abs().max(1.0));
        }
    }

    #[test]
    fn special_levels_at_half() {
        let cfg = WellConfig::new(0.5, 3.0).unwrap();
        let c = coefficients_at(&cfg, 2.0 * PI).unwrap();
        assert_eq!(c.chain, CoefficientChain::OuterNode);
        assert!(c.alpha.abs() < 1e-12 && c.gamma.abs() < 1e-12);
        assert!((c.beta + c.delta).abs() < 1e-12);
        assert_eq!(c.delta, 1.0);

        let c = coefficients_at(&cfg, PI).unwrap();
        assert_eq!(c.norm_convention, NormConvention::DeltaUnit);
        assert!(c.alpha.abs() < 1e-12);
        assert!((c.beta - 1.0).abs() < 1e-12);
        assert!((c.gamma + 3.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn double_root_is_rejected() {
        let xi = 2f64.sqrt() * PI;
        let cfg = WellConfig::new(0.5, xi).unwrap();
        assert!(matches!(
            coefficients_at(&cfg, PI),
            Err(Error::ExceptionalPoint { .. })
        ));
    }

    #[test]
    fn jump_condition() {
        let cfg = WellConfig::new(0.3, 1.7).unwrap();
        let spec = find_spectrum(&cfg, 4).unwrap();
        for k in spec.kappas() {
            let c = coefficients_at(&cfg, k).unwrap();
            let a = cfg.a();
            let (pl, dl) = eval_sided(&c, k, &cfg, a, Side::Left);
            let (pr, dr) = eval_sided(&c, k, &cfg, a, Side::Right);
            assert!((pl - pr).norm() < 1e-12);
            let jump = dr - dl - Complex64::new(0.0, cfg.xi()) * pl;
            assert!(jump.norm() < 1e-10 * k.max(1.0) * pl.norm().max(1.0));
        }
    }
}
