//! Biorthogonal eigenbasis and a positive metric on its span.
//!
//! Operators are represented in the basis of the first `N` unit-normalized
//! right eigenstates. Left states are `|n>> = q_n P |n>` with `q_n = 1/p_n`,
//! `p_n = <n|P|n>`, so that `<<n|n> = 1`.

use faer::{c64, Mat, Side};
use num_complex::Complex64;
use serde::Serialize;

use crate::eigenstates::{Eigenstate, Segment};
use crate::error::{Error, Result};
use crate::model::WellConfig;
use crate::secular::find_spectrum;

/// Largest accepted imaginary part of a parity overlap.
pub const PARITY_IMAG_TOL: f64 = 1e-10;
/// `|p_n|` below this marks a nearly self-orthogonal state.
pub const SELF_ORTHOGONAL_TOL: f64 = 1e-6;
/// Closed-form and quadrature overlaps must agree to this, relative to the state norms.
pub const QUADRATURE_AGREEMENT: f64 = 1e-9;
/// Target absolute error of the quadrature cross-check.
pub const QUADRATURE_TOL: f64 = 1e-12;
/// Levels closer than this in `kappa` count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// A function made of three `A sin(kx) + B cos(kx)` pieces on `[-1, -a]`, `[-a, a]`, `[a, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PiecewiseState {
    pub kappa: f64,
    pub segments: [Segment; 3],
}

impl PiecewiseState {
    pub fn from_eigenstate(state: &Eigenstate) -> Self {
        Self {
            kappa: state.kappa,
            segments: state.segments,
        }
    }

    /// Unit-normalized square-well state `sin(n pi (x + 1)/2)`.
    pub fn square_well(n: usize, a: f64) -> Self {
        let kappa = n as f64 * std::f64::consts::FRAC_PI_2;
        let (s, c) = kappa.sin_cos();
        let seg = |lo, hi| Segment {
            lo,
            hi,
            sin: Complex64::new(c, 0.0),
            cos: Complex64::new(s, 0.0),
        };
        Self {
            kappa,
            segments: [seg(-1.0, -a), seg(-a, a), seg(a, 1.0)],
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let seg = self
            .segments
            .iter()
            .find(|s| x <= s.hi)
            .unwrap_or(&self.segments[2]);
        seg.eval(self.kappa, x)
    }

    /// `x -> psi(-x)`.
    pub fn reflect(&self) -> Self {
        let r = |s: &Segment| Segment {
            lo: -s.hi,
            hi: -s.lo,
            sin: -s.sin,
            cos: s.cos,
        };
        Self {
            kappa: self.kappa,
            segments: [
                r(&self.segments[2]),
                r(&self.segments[1]),
                r(&self.segments[0]),
            ],
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = *self;
        for s in &mut out.segments {
            s.sin *= factor;
            s.cos *= factor;
        }
        out
    }

    pub fn norm(&self) -> f64 {
        overlap_closed(self, self).re.max(0.0).sqrt()
    }
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sin() / t
    }
}

/// `int_lo^hi cos(w x) dx` and `int_lo^hi sin(w x) dx`, stable at `w = 0`.
fn trig_integrals(w: f64, lo: f64, hi: f64) -> (f64, f64) {
    let m = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let base = 2.0 * h * sinc(w * h);
    let (s, c) = (w * m).sin_cos();
    (base * c, base * s)
}

fn segment_overlap(k1: f64, a: &Segment, k2: f64, b: &Segment) -> Complex64 {
    let (lo, hi) = (a.lo, a.hi);
    let d = k1 - k2;
    let s = k1 + k2;
    let (cd, sd) = trig_integrals(d, lo, hi);
    let (cs, ss) = trig_integrals(s, lo, hi);
    let i_ss = 0.5 * (cd - cs);
    let i_cc = 0.5 * (cd + cs);
    let i_sc = 0.5 * (ss + sd);
    let i_cs = 0.5 * (ss - sd);
    a.sin.conj() * b.sin * i_ss
        + a.sin.conj() * b.cos * i_sc
        + a.cos.conj() * b.sin * i_cs
        + a.cos.conj() * b.cos * i_cc
}

/// `int conj(psi_a) psi_b` from the piecewise antiderivatives.
pub fn overlap_closed(a: &PiecewiseState, b: &PiecewiseState) -> Complex64 {
    a.segments
        .iter()
        .zip(&b.segments)
        .map(|(sa, sb)| segment_overlap(a.kappa, sa, b.kappa, sb))
        .sum()
}

/// The same integral by adaptive double-exponential quadrature on each piece.
pub fn overlap_quadrature(a: &PiecewiseState, b: &PiecewiseState) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for (sa, sb) in a.segments.iter().zip(&b.segments) {
        let f = |x: f64| sa.eval(a.kappa, x).conj() * sb.eval(b.kappa, x);
        let re = quadrature::integrate(|x| f(x).re, sa.lo, sa.hi, QUADRATURE_TOL).integral;
        let im = quadrature::integrate(|x| f(x).im, sa.lo, sa.hi, QUADRATURE_TOL).integral;
        total += Complex64::new(re, im);
    }
    total
}

/// `<a|b>` in closed form, checked against quadrature.
pub fn inner_product(a: &PiecewiseState, b: &PiecewiseState) -> Result<Complex64> {
    if a.segments[1].hi != b.segments[1].hi {
        return Err(Error::Domain {
            what: "states built for different displacements, a",
            value: b.segments[1].hi,
        });
    }
    let closed = overlap_closed(a, b);
    let quad = overlap_quadrature(a, b);
    let scale = (a.norm() * b.norm()).max(f64::MIN_POSITIVE);
    let difference = (closed - quad).norm();
    if difference > QUADRATURE_AGREEMENT * scale {
        return Err(Error::Integration { difference, scale });
    }
    Ok(closed)
}

/// `<n|P|n> = int conj(psi(x)) psi(-x) dx`; must be real.
pub fn parity_overlap(state: &PiecewiseState, n: usize) -> Result<f64> {
    let p = inner_product(state, &state.reflect())?;
    let scale = state.norm().powi(2);
    if p.im.abs() > PARITY_IMAG_TOL * scale {
        return Err(Error::NonRealOverlap {
            n,
            im: p.im / scale,
        });
    }
    Ok(p.re)
}

/// Right eigenstates with their left partners.
#[derive(Debug, Clone)]
pub struct BiorthogonalSystem {
    pub config: WellConfig,
    pub states: Vec<Eigenstate>,
    /// Unit-normalized right states.
    pub right: Vec<PiecewiseState>,
    pub energies: Vec<f64>,
    pub parity_overlaps: Vec<f64>,
    pub q_norms: Vec<f64>,
    /// `S_ij = <i|j>`.
    pub overlap: Mat<c64>,
    /// `L_nk = <<n|k>`; the identity up to `gram_tolerance`.
    pub gram: Mat<c64>,
    pub gram_tolerance: f64,
}

impl BiorthogonalSystem {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `|n>> = q_n P |n>`.
    pub fn left(&self, n: usize) -> PiecewiseState {
        self.right[n].reflect().scaled(self.q_norms[n])
    }

    /// Parity overlaps take both signs.
    pub fn mixed_signs(&self) -> bool {
        let pos = self.parity_overlaps.iter().any(|&p| p > 0.0);
        let neg = self.parity_overlaps.iter().any(|&p| p < 0.0);
        pos && neg
    }
}

fn max_abs_deviation_from_identity(m: &Mat<c64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - c64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub fn build_biorthogonal(config: &WellConfig, n: usize) -> Result<BiorthogonalSystem> {
    let spectrum = find_spectrum(config, n)?;
    let kappas = spectrum.kappas();
    for (i, w) in kappas.windows(2).enumerate() {
        if w[1] - w[0] < DEGENERACY_TOL {
            return Err(Error::Degenerate {
                n: i + 1,
                m: i + 2,
                kappa: w[0],
            });
        }
    }
    let states = spectrum
        .roots
        .iter()
        .map(|r| Eigenstate::new(config, r))
        .collect::<Result<Vec<_>>>()?;
    let right: Vec<PiecewiseState> = states
        .iter()
        .map(|s| {
            let p = PiecewiseState::from_eigenstate(s);
            p.scaled(1.0 / p.norm())
        })
        .collect();

    let mut parity_overlaps = Vec::with_capacity(n);
    for (i, r) in right.iter().enumerate() {
        let p = parity_overlap(r, i + 1)?;
        if p.abs() < SELF_ORTHOGONAL_TOL {
            return Err(Error::SelfOrthogonal {
                n: i + 1,
                overlap: p,
            });
        }
        parity_overlaps.push(p);
    }
    let q_norms: Vec<f64> = parity_overlaps.iter().map(|p| 1.0 / p).collect();

    let reflected: Vec<PiecewiseState> = right.iter().map(|r| r.reflect()).collect();
    let mut overlap = Mat::<c64>::zeros(n, n);
    let mut gram = Mat::<c64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            overlap[(i, j)] = inner_product(&right[i], &right[j])?;
            gram[(i, j)] = inner_product(&right[i], &reflected[j])? * q_norms[i];
        }
    }
    let gram_tolerance = max_abs_deviation_from_identity(&gram);
    let energies = kappas.iter().map(|k| k * k).collect();
    Ok(BiorthogonalSystem {
        config: *config,
        states,
        right,
        energies,
        parity_overlaps,
        q_norms,
        overlap,
        gram,
        gram_tolerance,
    })
}

fn frobenius(m: &Mat<c64>) -> f64 {
    m.norm_l2()
}

fn hermitian_eigenvalues(m: &Mat<c64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

/// Truncated metric `sum_n |n>> eta_n <<n|` as the form `<j|eta|k>`.
#[derive(Debug, Clone)]
pub struct MetricTruncation {
    pub weights: Vec<f64>,
    pub representation: Mat<c64>,
    /// `|Theta - Theta^dagger|_F / |Theta|_F`.
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub cutoff: Option<CutoffEstimate>,
}

impl MetricTruncation {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn with_cutoff(mut self, cutoff: CutoffEstimate) -> Self {
        self.cutoff = Some(cutoff);
        self
    }
}

fn check_weights(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::Length {
            expected: n,
            actual: weights.len(),
        });
    }
    for (index, &value) in weights.iter().enumerate() {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Weight { index, value });
        }
    }
    Ok(())
}

pub fn build_metric(system: &BiorthogonalSystem, weights: &[f64]) -> Result<MetricTruncation> {
    let n = system.len();
    check_weights(weights, n)?;
    let l = &system.gram;
    let eta_l = Mat::<c64>::from_fn(n, n, |i, j| l[(i, j)] * weights[i]);
    let theta = l.adjoint() * &eta_l;
    let skew = &theta - theta.adjoint();
    let hermiticity = frobenius(&skew) / frobenius(&theta);
    let eig = hermitian_eigenvalues(&theta)?;
    let min_eigenvalue = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max_eigenvalue = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(min_eigenvalue > 0.0) {
        return Err(Error::NotPositive(min_eigenvalue));
    }
    Ok(MetricTruncation {
        weights: weights.to_vec(),
        representation: theta,
        hermiticity,
        min_eigenvalue,
        max_eigenvalue,
        cutoff: None,
    })
}

/// `H` on the span: `sum_n |n> E_n <<n|`, as coefficients `E_n <<n|k>`.
pub fn hamiltonian_coefficients(system: &BiorthogonalSystem) -> Mat<c64> {
    let n = system.len();
    Mat::<c64>::from_fn(n, n, |i, j| system.gram[(i, j)] * system.energies[i])
}

/// `|eta H - H^dagger eta|_F / (|eta|_F |H|_F)` on the span.
pub fn quasi_hermiticity_residual(metric: &MetricTruncation, system: &BiorthogonalSystem) -> f64 {
    let h = hamiltonian_coefficients(system);
    let theta = &metric.representation;
    let r = theta * &h - h.adjoint() * theta;
    frobenius(&r) / (frobenius(theta) * frobenius(&h))
}

/// Worst relative error of `sum_n |n><<n|` acting on the projections of the
/// first `N` square-well states onto the span.
pub fn resolution_of_identity(system: &BiorthogonalSystem) -> Result<f64> {
    use faer::linalg::solvers::Solve;
    let n = system.len();
    let a = system.config.a();
    let lu = system.overlap.partial_piv_lu();
    let mut worst = 0.0f64;
    for k in 1..=n {
        let phi = PiecewiseState::square_well(k, a);
        let mut b = Mat::<c64>::zeros(n, 1);
        for i in 0..n {
            b[(i, 0)] = inner_product(&system.right[i], &phi)?;
        }
        let c = lu.solve(&b);
        let lc = &system.gram * &c;
        let err = frobenius(&(&lc - &c)) / frobenius(&c).max(f64::MIN_POSITIVE);
        worst = worst.max(err);
    }
    Ok(worst)
}

/// `I - sum_{n<=N} |n,0><n,0| + sum_{n<=N} |n>> eta_n <<n|` on the first
/// `basis_size` square-well states.
#[derive(Debug, Clone)]
pub struct SeparableMetric {
    pub basis_size: usize,
    pub matrix: Mat<c64>,
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
}

/// `sum_i eta_i |i>><<i|` in the first `basis_size` square-well states, with
/// the identity added on the states beyond the first `N`.
pub fn separable_metric(
    system: &BiorthogonalSystem,
    weights: &[f64],
    basis_size: usize,
) -> Result<SeparableMetric> {
    let n = system.len();
    check_weights(weights, n)?;
    if basis_size < n {
        return Err(Error::Length {
            expected: n,
            actual: basis_size,
        });
    }
    let a = system.config.a();
    let basis: Vec<PiecewiseState> = (1..=basis_size)
        .map(|k| PiecewiseState::square_well(k, a))
        .collect();
    let lefts: Vec<PiecewiseState> = (0..n).map(|i| system.left(i)).collect();
    // c[j][i] = <phi_j | i>>
    let c = Mat::<c64>::from_fn(basis_size, n, |j, i| overlap_closed(&basis[j], &lefts[i]));
    let matrix = Mat::<c64>::from_fn(basis_size, basis_size, |j, k| {
        let identity = if j == k && j >= n { 1.0 } else { 0.0 };
        let mut v = c64::new(identity, 0.0);
        for i in 0..n {
            v += c[(j, i)] * weights[i] * c[(k, i)].conj();
        }
        v
    });
    let skew = &matrix - matrix.adjoint();
    let hermiticity = frobenius(&skew) / frobenius(&matrix);
    let eig = hermitian_eigenvalues(&matrix)?;
    let min_eigenvalue = eig.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(SeparableMetric {
        basis_size,
        matrix,
        hermiticity,
        min_eigenvalue,
    })
}

/// Level beyond which eigenstates match the square-well states within `tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffEstimate {
    pub tolerance: f64,
    pub n_cutoff: usize,
    /// `1 - |<n,0|n,xi>| / |n,xi|` for `n = 1..=levels`.
    pub deficits: Vec<f64>,
}

pub fn cutoff_estimate(
    config: &WellConfig,
    tolerance: f64,
    levels: usize,
) -> Result<CutoffEstimate> {
    let spectrum = find_spectrum(config, levels)?;
    let a = config.a();
    let mut deficits = Vec::with_capacity(levels);
    for root in &spectrum.roots {
        let state = PiecewiseState::from_eigenstate(&Eigenstate::new(config, root)?);
        let phi = PiecewiseState::square_well(root.n, a);
        let ov = overlap_closed(&phi, &state).norm();
        deficits.push((1.0 - ov / state.norm()).max(0.0));
    }
    let n_cutoff = deficits
        .iter()
        .rposition(|&d| d >= tolerance)
        .map_or(0, |i| i + 1);
    Ok(CutoffEstimate {
        tolerance,
        n_cutoff,
        deficits,
    })
}

/// Row-major CSV, each complex entry written as `re,im`.
pub fn matrix_to_csv(m: &Mat<c64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:e},{:e}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Nested rows for JSON output.
pub fn matrix_rows(m: &Mat<c64>) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}
