//! The secular determinant and its roots.
//!
//! ```text
//! D(k) = -1/2 { sin 2k + (xi^2 / k^2) sin(2ka) sin^2[k(1 - a)] }
//! ```
//!
//! Real roots are bracketed on a uniform scan, every interior extremum of `D`
//! is located and classified, and brackets are refined by a bisection/Newton
//! hybrid. Beyond the symmetry-breaking threshold pairs of real roots merge
//! and continue as complex-conjugate pairs, which are followed by complex
//! Newton iteration on the analytic continuation of `D`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::{Complex64, ComplexFloat};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Regime, SpectralRoot, WellConfig};
use crate::rootfind;

/// Scan step for bracketing; roots are spaced by roughly `pi/2`.
pub const SCAN_STEP: f64 = PI / 64.0;
/// Required `|D|` at a refined real root.
pub const ROOT_TOL: f64 = 1e-12;
/// Required bracket width around a refined real root.
pub const WIDTH_TOL: f64 = 1e-12;
/// An extremum with `|D|` below this is a double root.
pub const TOUCH_TOL: f64 = 1e-12;
/// Extremum values below this fraction of the local amplitude are flagged.
pub const NEAR_MERGER: f64 = 1e-4;
/// Required `|D|` at a continued complex root.
pub const COMPLEX_TOL: f64 = 1e-10;

fn secular_generic<T>(a: f64, xi: f64, k: T) -> T
where
    T: ComplexFloat<Real = f64>,
{
    let two_k = k + k;
    let s = (k * T::from(1.0 - a).unwrap()).sin();
    let coupling = T::from(xi * xi).unwrap() / (k * k);
    (two_k.sin() + coupling * (two_k * T::from(a).unwrap()).sin() * s * s) * T::from(-0.5).unwrap()
}

fn secular_derivative_generic<T>(a: f64, xi: f64, k: T) -> T
where
    T: ComplexFloat<Real = f64>,
{
    let c = |x: f64| T::from(x).unwrap();
    let two_k = k + k;
    let s = (k * c(1.0 - a)).sin();
    let co = (k * c(1.0 - a)).cos();
    let sin2a = (two_k * c(a)).sin();
    let cos2a = (two_k * c(a)).cos();
    let inner = c(-2.0) / (k * k * k) * sin2a * s * s
        + (c(2.0 * a) * cos2a * s * s + sin2a * c(2.0 * (1.0 - a)) * s * co) / (k * k);
    (c(2.0) * two_k.cos() + c(xi * xi) * inner) * c(-0.5)
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "kappa",
            value: kappa,
        })
    }
}

/// `D(kappa)` for real `kappa > 0`. The zero root at `kappa = 0` is spurious
/// and excluded from the domain.
pub fn eval_secular(config: &WellConfig, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(secular_generic(config.a(), config.xi(), kappa))
}

/// `dD/dkappa` for real `kappa > 0`.
pub fn eval_secular_derivative(config: &WellConfig, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(secular_derivative_generic(config.a(), config.xi(), kappa))
}

/// Analytic continuation of `D` to complex `kappa != 0`.
pub fn eval_secular_complex(config: &WellConfig, kappa: Complex64) -> Result<Complex64> {
    if kappa.norm() == 0.0 || !kappa.is_finite() {
        return Err(Error::Domain {
            what: "|kappa|",
            value: kappa.norm(),
        });
    }
    Ok(secular_generic(config.a(), config.xi(), kappa))
}

pub fn eval_secular_complex_derivative(config: &WellConfig, kappa: Complex64) -> Result<Complex64> {
    if kappa.norm() == 0.0 || !kappa.is_finite() {
        return Err(Error::Domain {
            what: "|kappa|",
            value: kappa.norm(),
        });
    }
    Ok(secular_derivative_generic(config.a(), config.xi(), kappa))
}

// Unchecked fast paths for the scan loops.
fn d(config: &WellConfig, k: f64) -> f64 {
    secular_generic(config.a(), config.xi(), k)
}

fn dd(config: &WellConfig, k: f64) -> f64 {
    secular_derivative_generic(config.a(), config.xi(), k)
}

fn curvature(config: &WellConfig, k: f64) -> f64 {
    let h = 1e-5 * k.max(1.0);
    (dd(config, k + h) - dd(config, k - h)) / (2.0 * h)
}

/// Natural size of `D` near `kappa`; used to judge "small" extremum values.
fn amplitude(config: &WellConfig, k: f64) -> f64 {
    0.5 * (1.0 + config.xi() * config.xi() / (k * k))
}

/// A sign change of `D` on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    /// Tentative level index from the unperturbed ladder `n pi / 2`.
    pub hint_index: usize,
}

/// How an interior extremum of `D` relates to the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TangencyKind {
    /// The lobe crosses zero: two real roots on either side, close together.
    Split,
    /// The extremum touches zero: a real double root.
    Touching,
    /// The lobe stops short of zero: a pair of roots has left the real axis.
    Gap,
}

/// A flagged extremum of `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tangency {
    pub kappa: f64,
    pub value: f64,
    pub curvature: f64,
    pub kind: TangencyKind,
    /// `|D|` at the extremum is within [`NEAR_MERGER`] of the local amplitude.
    pub near_merger: bool,
}

impl Tangency {
    /// Quadratic-model estimate of the complex root next to a gap.
    pub fn complex_seed(&self) -> Option<Complex64> {
        let ratio = 2.0 * self.value / self.curvature;
        (ratio > 0.0).then(|| Complex64::new(self.kappa, ratio.sqrt()))
    }
}

/// Result of [`bracket_roots`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketScan {
    pub kappa_max: f64,
    pub brackets: Vec<RootBracket>,
    /// Touching and gap extrema always; split extrema only when near a merger.
    pub tangencies: Vec<Tangency>,
}

impl BracketScan {
    pub fn gaps(&self) -> impl Iterator<Item = &Tangency> {
        self.tangencies
            .iter()
            .filter(|t| t.kind == TangencyKind::Gap)
    }

    pub fn touching(&self) -> impl Iterator<Item = &Tangency> {
        self.tangencies
            .iter()
            .filter(|t| t.kind == TangencyKind::Touching)
    }

    pub fn has_merger_flag(&self) -> bool {
        self.tangencies
            .iter()
            .any(|t| t.near_merger || t.kind == TangencyKind::Touching)
    }

    /// Real roots counted with multiplicity (touching extrema count twice).
    pub fn real_root_count(&self) -> usize {
        self.brackets.len() + 2 * self.touching().count()
    }
}

fn hint(k: f64) -> usize {
    ((2.0 * k / PI).round() as usize).max(1)
}

fn locate_extremum(config: &WellConfig, lo: f64, hi: f64) -> f64 {
    rootfind::bisect(|k| dd(config, k), lo, hi, 0.0).unwrap_or(0.5 * (lo + hi))
}

/// Scans `(0, kappa_max]` for sign changes of `D`.
///
/// Every interior extremum is located from the sign changes of `D'` and
/// classified: a lobe that dips across zero inside one scan cell yields two
/// brackets, an extremum touching zero is a double root, and a lobe that
/// falls short of zero (`D * D'' > 0` at the extremum) marks a merged pair.
pub fn bracket_roots(config: &WellConfig, kappa_max: f64) -> Result<BracketScan> {
    check_kappa(kappa_max)?;
    let cells = (kappa_max / SCAN_STEP).ceil().max(1.0) as usize;
    let step = kappa_max / cells as f64;
    // D(k) ~ -k (1 + xi^2 a (1-a)^2) near zero, so a tiny first node is safe
    let start = 1e-3 * step;
    let grid: Vec<f64> = (0..=cells)
        .map(|i| if i == 0 { start } else { i as f64 * step })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&k| d(config, k)).collect();
    let slopes: Vec<f64> = grid.iter().map(|&k| dd(config, k)).collect();

    let mut brackets = Vec::new();
    let mut tangencies = Vec::new();
    for i in 0..cells {
        let (lo, hi) = (grid[i], grid[i + 1]);
        let (flo, fhi) = (values[i], values[i + 1]);
        // a grid node sitting on a double root was already recorded by the cell to its left
        let claimed = flo == 0.0 && tangencies.last().is_some_and(|t: &Tangency| t.kappa == lo);
        let sign_change = !claimed && (flo == 0.0 || flo.signum() != fhi.signum());
        let extremum = slopes[i].signum() != slopes[i + 1].signum();

        if !extremum {
            if sign_change && fhi != 0.0 {
                brackets.push(RootBracket {
                    lo,
                    hi,
                    hint_index: hint(0.5 * (lo + hi)),
                });
            }
            continue;
        }

        let k = locate_extremum(config, lo, hi);
        let v = d(config, k);
        let curv = curvature(config, k);
        let near = v.abs() <= NEAR_MERGER * amplitude(config, k);

        if v.abs() <= TOUCH_TOL {
            tangencies.push(Tangency {
                kappa: k,
                value: v,
                curvature: curv,
                kind: TangencyKind::Touching,
                near_merger: true,
            });
            continue;
        }

        if sign_change && fhi != 0.0 {
            // one root and one extremum in the cell
            let (a, b) = if v.signum() != flo.signum() {
                (lo, k)
            } else {
                (k, hi)
            };
            brackets.push(RootBracket {
                lo: a,
                hi: b,
                hint_index: hint(0.5 * (a + b)),
            });
            if near {
                tangencies.push(Tangency {
                    kappa: k,
                    value: v,
                    curvature: curv,
                    kind: TangencyKind::Split,
                    near_merger: true,
                });
            }
            continue;
        }

        if v.signum() != flo.signum() {
            // the lobe crosses zero twice within the cell
            brackets.push(RootBracket {
                lo,
                hi: k,
                hint_index: hint(0.5 * (lo + k)),
            });
            brackets.push(RootBracket {
                lo: k,
                hi,
                hint_index: hint(0.5 * (k + hi)),
            });
            if near {
                tangencies.push(Tangency {
                    kappa: k,
                    value: v,
                    curvature: curv,
                    kind: TangencyKind::Split,
                    near_merger: true,
                });
            }
        } else if v * curv > 0.0 {
            tangencies.push(Tangency {
                kappa: k,
                value: v,
                curvature: curv,
                kind: TangencyKind::Gap,
                near_merger: near,
            });
        }
    }
    Ok(BracketScan {
        kappa_max,
        brackets,
        tangencies,
    })
}

/// Refines one bracket to `|D| < ROOT_TOL (1 + xi^2/kappa^2)` and width `< WIDTH_TOL`.
pub fn refine_bracket(config: &WellConfig, bracket: &RootBracket) -> Result<rootfind::Refined> {
    let refined = rootfind::hybrid(
        |k| d(config, k),
        |k| dd(config, k),
        bracket.lo,
        bracket.hi,
        1e-6,
        WIDTH_TOL,
    )?;
    let amplitude = 1.0 + (config.xi() / refined.root).powi(2);
    if refined.residual >= ROOT_TOL * amplitude {
        return Err(Error::NoConvergence {
            routine: "secular root refinement",
            iterations: 0,
        });
    }
    Ok(refined)
}

/// Real spectrum with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub config: WellConfig,
    pub roots: Vec<SpectralRoot>,
    /// `|D(kappa_n)|` for each root.
    pub residuals: Vec<f64>,
    pub tangencies: Vec<Tangency>,
}

impl Spectrum {
    pub fn kappas(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.kappa.re).collect()
    }

    pub fn has_merger_flag(&self) -> bool {
        self.tangencies
            .iter()
            .any(|t| t.near_merger || t.kind == TangencyKind::Touching)
    }
}

/// Number of unperturbed levels to scan so that at least `n_max` are covered
/// and the scan end `(levels + 1/2) pi/2` exceeds `xi` (then `D` cannot
/// vanish there and the root count below it is conserved).
fn scan_levels(config: &WellConfig, n_max: usize) -> usize {
    let by_xi = (1.05 * config.xi() / FRAC_PI_2).ceil() as usize + 1;
    (n_max + 2).max(by_xi)
}

fn real_roots(config: &WellConfig, scan: &BracketScan) -> Result<Vec<(f64, f64)>> {
    let mut found = Vec::with_capacity(scan.real_root_count());
    for b in &scan.brackets {
        let r = refine_bracket(config, b)?;
        found.push((r.root, r.residual));
    }
    for t in scan.touching() {
        found.push((t.kappa, t.value.abs()));
        found.push((t.kappa, t.value.abs()));
    }
    found.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(found)
}

/// The first `n_max` real levels, ascending in `kappa`.
///
/// A real double root (an unavoided crossing) is returned twice and flagged.
/// When a complex pair sits below the requested levels the call fails with
/// [`Error::Merger`]; use [`find_spectrum_with_pairs`] in the broken phase.
pub fn find_spectrum(config: &WellConfig, n_max: usize) -> Result<Spectrum> {
    if n_max == 0 {
        return Err(Error::Domain {
            what: "n_max",
            value: 0.0,
        });
    }
    let levels = scan_levels(config, n_max);
    let kappa_max = (levels as f64 + 0.5) * FRAC_PI_2;
    let scan = bracket_roots(config, kappa_max)?;
    let found = real_roots(config, &scan)?;
    let gaps: Vec<f64> = scan.gaps().map(|t| t.kappa).collect();
    let missing = levels.saturating_sub(found.len());

    if found.len() < n_max {
        return Err(Error::Merger {
            requested: n_max,
            found: found.len(),
            gaps,
        });
    }
    let top = found[n_max - 1].0;
    let blocking = missing > 0 && (gaps.len() * 2 < missing || gaps.iter().any(|&g| g < top));
    if blocking {
        return Err(Error::Merger {
            requested: n_max,
            found: found
                .iter()
                .filter(|r| gaps.iter().all(|&g| r.0 < g))
                .count(),
            gaps,
        });
    }
    let roots = found[..n_max]
        .iter()
        .enumerate()
        .map(|(i, &(k, _))| SpectralRoot::real(i + 1, k))
        .collect();
    let residuals = found[..n_max].iter().map(|r| r.1).collect();
    Ok(Spectrum {
        config: *config,
        roots,
        residuals,
        tangencies: scan.tangencies,
    })
}

/// Complex Newton on the continued determinant.
pub fn complex_newton(config: &WellConfig, seed: Complex64) -> Result<Complex64> {
    let mut k = seed;
    for it in 0..100 {
        let f = secular_generic(config.a(), config.xi(), k);
        let df = secular_derivative_generic(config.a(), config.xi(), k);
        let mut step = f / df;
        if !step.is_finite() {
            break;
        }
        if step.norm() > 0.25 {
            step *= 0.25 / step.norm();
        }
        k -= step;
        if step.norm() <= 1e-15 * k.norm().max(1.0) || (it > 2 && f.norm() < 1e-14) {
            let r = secular_generic(config.a(), config.xi(), k).norm();
            if r < COMPLEX_TOL {
                return Ok(k);
            }
        }
    }
    let r = secular_generic(config.a(), config.xi(), k).norm();
    if r < COMPLEX_TOL && k.is_finite() {
        Ok(k)
    } else {
        Err(Error::NoConvergence {
            routine: "complex Newton",
            iterations: 100,
        })
    }
}

/// The first `n_levels` levels including complex-conjugate pairs, ordered by
/// `Re(kappa)`; a pair straddling the cut is kept whole.
pub fn find_spectrum_with_pairs(config: &WellConfig, n_levels: usize) -> Result<Vec<SpectralRoot>> {
    let levels = scan_levels(config, n_levels);
    let kappa_max = (levels as f64 + 0.5) * FRAC_PI_2;
    let scan = bracket_roots(config, kappa_max)?;
    let mut entries: Vec<(Complex64, Regime)> = real_roots(config, &scan)?
        .into_iter()
        .map(|(k, _)| (Complex64::new(k, 0.0), Regime::Real))
        .collect();
    for gap in scan.gaps() {
        let seed = gap
            .complex_seed()
            .unwrap_or(Complex64::new(gap.kappa, 1e-3));
        let k = complex_newton(config, seed)?;
        if k.im.abs() <= 1e-12 {
            continue;
        }
        let k = if k.im < 0.0 { k.conj() } else { k };
        if entries
            .iter()
            .any(|(e, r)| *r == Regime::ComplexPair && (*e - k).norm() < 1e-8)
        {
            continue;
        }
        entries.push((k, Regime::ComplexPair));
        entries.push((k.conj(), Regime::ComplexPair));
    }
    entries.sort_by(|x, y| x.0.re.total_cmp(&y.0.re).then(y.0.im.total_cmp(&x.0.im)));
    if entries.len() < n_levels {
        return Err(Error::Merger {
            requested: n_levels,
            found: entries.len(),
            gaps: scan.gaps().map(|t| t.kappa).collect(),
        });
    }
    let mut cut = n_levels;
    if entries[cut - 1].1 == Regime::ComplexPair
        && entries[cut - 1].0.im > 0.0
        && cut < entries.len()
    {
        cut += 1;
    }
    Ok(entries[..cut]
        .iter()
        .enumerate()
        .map(|(i, &(k, regime))| match regime {
            Regime::Real => SpectralRoot::real(i + 1, k.re),
            Regime::ComplexPair => SpectralRoot::complex(i + 1, k),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PairState {
    Real(f64, f64),
    Complex(Complex64),
}

fn pair_center(state: PairState) -> (f64, f64) {
    match state {
        PairState::Real(a, b) => (0.5 * (a + b), (b - a).abs()),
        PairState::Complex(k) => (k.re, 2.0 * k.im.abs()),
    }
}

/// Nearest extremum of `D` to `center`, searched on a fine local grid.
fn nearest_extremum(config: &WellConfig, center: f64, half_width: f64) -> Option<f64> {
    let lo = (center - half_width).max(1e-6);
    let hi = center + half_width;
    let n = 256;
    let h = (hi - lo) / n as f64;
    let mut best: Option<f64> = None;
    let mut prev = dd(config, lo);
    for i in 1..=n {
        let k1 = lo + i as f64 * h;
        let cur = dd(config, k1);
        if prev.signum() != cur.signum() {
            let k = locate_extremum(config, k1 - h, k1);
            if best.is_none_or(|b| (k - center).abs() < (b - center).abs()) {
                best = Some(k);
            }
        }
        prev = cur;
    }
    best
}

fn expand_bracket(config: &WellConfig, from: f64, dir: f64, max_reach: f64) -> Option<(f64, f64)> {
    let f0 = d(config, from);
    let mut reach = 1e-9;
    while reach <= max_reach {
        let k = from + dir * reach;
        if k <= 0.0 {
            return None;
        }
        if d(config, k).signum() != f0.signum() {
            return Some(if dir > 0.0 {
                (from + dir * reach * 0.5, k)
            } else {
                (k, from + dir * reach * 0.5)
            });
        }
        reach *= 1.5;
    }
    None
}

fn advance_pair(config: &WellConfig, prev: PairState) -> Result<PairState> {
    let (center, spread) = pair_center(prev);
    if let PairState::Complex(k) = prev {
        if let Ok(next) = complex_newton(config, k) {
            if next.im.abs() > 1e-9 {
                let next = if next.im < 0.0 { next.conj() } else { next };
                return Ok(PairState::Complex(next));
            }
        }
    }
    let half = (2.0 * spread).clamp(0.05, 0.6);
    let k =
        nearest_extremum(config, center, half).ok_or(Error::Continuation { xi: config.xi() })?;
    let v = d(config, k);
    let curv = curvature(config, k);
    if v.abs() <= TOUCH_TOL {
        return Ok(PairState::Real(k, k));
    }
    if v * curv < 0.0 {
        let left = expand_bracket(config, k, -1.0, 1.0);
        let right = expand_bracket(config, k, 1.0, 1.0);
        match (left, right) {
            (Some((a0, b0)), Some((a1, b1))) => {
                let r0 = refine_bracket(
                    config,
                    &RootBracket {
                        lo: a0,
                        hi: b0,
                        hint_index: 0,
                    },
                )?;
                let r1 = refine_bracket(
                    config,
                    &RootBracket {
                        lo: a1,
                        hi: b1,
                        hint_index: 0,
                    },
                )?;
                Ok(PairState::Real(r0.root, r1.root))
            }
            _ => Err(Error::Continuation { xi: config.xi() }),
        }
    } else {
        let ratio = 2.0 * v / curv;
        let seed = Complex64::new(k, ratio.sqrt());
        let next = complex_newton(config, seed)?;
        let next = if next.im < 0.0 { next.conj() } else { next };
        Ok(PairState::Complex(next))
    }
}

fn advance_with_halving(
    from: &WellConfig,
    to: &WellConfig,
    prev: PairState,
    depth: usize,
) -> Result<PairState> {
    let attempt = advance_pair(to, prev);
    let (c0, _) = pair_center(prev);
    match attempt {
        Ok(next) if (pair_center(next).0 - c0).abs() < 0.5 => return Ok(next),
        _ if depth == 0 => return Err(Error::Continuation { xi: to.xi() }),
        _ => {}
    }
    let mid = from.with_xi(0.5 * (from.xi() + to.xi()))?;
    let half = advance_with_halving(from, &mid, prev, depth - 1)?;
    advance_with_halving(&mid, to, half, depth - 1)
}

fn state_to_roots(state: PairState, n: usize) -> [SpectralRoot; 2] {
    match state {
        PairState::Real(a, b) => {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            [SpectralRoot::real(n, a), SpectralRoot::real(n + 1, b)]
        }
        PairState::Complex(k) => {
            let upper = SpectralRoot::complex(n, k);
            [
                upper,
                SpectralRoot {
                    n: n + 1,
                    ..upper.conj()
                },
            ]
        }
    }
}

/// Follows a merging pair of levels along `path` (increasing `xi`, same `a`).
///
/// While real, the pair is re-bracketed around the extremum of `D` that
/// separates it. Once that lobe no longer reaches zero, the quadratic model
/// at the extremum seeds complex Newton, and the complex member is carried
/// forward. The conjugate partner is produced by conjugation.
pub fn track_complex_pair(
    path: &[WellConfig],
    seed: [SpectralRoot; 2],
) -> Result<Vec<[SpectralRoot; 2]>> {
    let n = seed[0].n.min(seed[1].n);
    let mut state = match (seed[0].regime, seed[1].regime) {
        (Regime::Real, Regime::Real) => PairState::Real(seed[0].kappa.re, seed[1].kappa.re),
        _ => {
            let k = if seed[0].kappa.im >= 0.0 {
                seed[0].kappa
            } else {
                seed[1].kappa
            };
            PairState::Complex(k)
        }
    };
    let mut out = Vec::with_capacity(path.len());
    let mut previous: Option<WellConfig> = None;
    for config in path {
        state = match previous {
            None => advance_pair(config, state)?,
            Some(prev) => advance_with_halving(&prev, config, state, 12)?,
        };
        out.push(state_to_roots(state, n));
        previous = Some(*config);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(a: f64, xi: f64) -> WellConfig {
        WellConfig::new(a, xi).unwrap()
    }

    #[test]
    fn square_well_root_of_sin_2k() {
        assert!(eval_secular(&cfg(0.5, 0.0), FRAC_PI_2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_kappa() {
        assert!(eval_secular(&cfg(0.5, 1.0), 0.0).is_err());
        assert!(eval_secular(&cfg(0.5, 1.0), -1.0).is_err());
        assert!(eval_secular_complex(&cfg(0.5, 1.0), Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn half_displacement_factorizes() {
        let c = cfg(0.5, 2.7);
        for i in 1..400 {
            let k = 0.05 * i as f64;
            let mu2 = c.xi() * c.xi() / (4.0 * k * k);
            let factored = -k.sin() * (k.cos() + mu2 * (1.0 - k.cos()));
            assert!((eval_secular(&c, k).unwrap() - factored).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let c = cfg(0.3, 3.1);
        for &k in &[0.7, 2.2, 5.9, 11.3] {
            let h = 1e-6;
            let fd = (d(&c, k + h) - d(&c, k - h)) / (2.0 * h);
            assert!((fd - dd(&c, k)).abs() < 1e-7, "k = {k}");
        }
    }

    #[test]
    fn complex_agrees_on_real_axis_and_conjugates() {
        let c = cfg(0.37, 2.3);
        for &k in &[0.4, 1.9, 7.7] {
            let z = eval_secular_complex(&c, Complex64::new(k, 0.0)).unwrap();
            assert!((z.re - eval_secular(&c, k).unwrap()).abs() < 1e-14);
            assert_eq!(z.im, 0.0);
            let w = Complex64::new(k, 0.3);
            let lhs = eval_secular_complex(&c, w.conj()).unwrap();
            let rhs = eval_secular_complex(&c, w).unwrap().conj();
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn brackets_square_well_ladder() {
        let scan = bracket_roots(&cfg(0.5, 0.0), 7.0).unwrap();
        assert_eq!(scan.brackets.len(), 4);
        for (i, b) in scan.brackets.iter().enumerate() {
            let root = (i + 1) as f64 * FRAC_PI_2;
            assert!(b.lo <= root && root <= b.hi);
            assert_eq!(b.hint_index, i + 1);
        }
        assert!(scan.tangencies.is_empty());
    }

    #[test]
    fn merger_flag_at_printed_critical_strength() {
        let scan = bracket_roots(&cfg(0.5, 5.059764944), 8.0).unwrap();
        let flagged: Vec<_> = scan.tangencies.iter().filter(|t| t.near_merger).collect();
        assert!(!flagged.is_empty());
        assert!(flagged.iter().any(|t| (t.kappa - 3.8744).abs() < 1e-3));
    }

    #[test]
    fn spectrum_reports_merger_in_broken_phase() {
        match find_spectrum(&cfg(0.5, 5.5), 4) {
            Err(Error::Merger { gaps, .. }) => {
                assert!(gaps.iter().any(|g| (g - 3.9).abs() < 0.3));
            }
            other => panic!("expected merger, got {other:?}"),
        }
    }

    #[test]
    fn complex_pair_found_in_broken_phase() {
        let levels = find_spectrum_with_pairs(&cfg(0.5, 5.5), 4).unwrap();
        let complex: Vec<_> = levels
            .iter()
            .filter(|r| r.regime == Regime::ComplexPair)
            .collect();
        assert_eq!(complex.len(), 2);
        assert!(complex[0].kappa.im > 0.0);
        assert!((complex[0].kappa.conj() - complex[1].kappa).norm() < 1e-15);
        let residual = eval_secular_complex(&cfg(0.5, 5.5), complex[0].kappa).unwrap();
        assert!(residual.norm() < COMPLEX_TOL);
    }

    #[test]
    fn crossing_returns_double_root() {
        let xi = 2f64.sqrt() * PI;
        let s = find_spectrum(&cfg(0.5, xi), 2).unwrap();
        assert!((s.roots[0].kappa.re - PI).abs() < 1e-10);
        assert!((s.roots[1].kappa.re - PI).abs() < 1e-10);
        assert!(s.has_merger_flag());
    }

    #[test]
    fn odd_parity_levels_do_not_move() {
        let s = find_spectrum(&cfg(0.5, 3.0), 6).unwrap();
        assert!((s.roots[1].kappa.re - PI).abs() < 1e-12);
        assert!((s.roots[3].kappa.re - 2.0 * PI).abs() < 1e-12);
    }
}
