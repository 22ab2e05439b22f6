//! Reference spectrum from the square-well sine basis.
//!
//! `H_mn = (n pi/2)^2 delta_mn + i xi (phi_m(a) phi_n(a) - phi_m(-a) phi_n(-a))`
//! with `phi_n(x) = sin(n pi (x + 1)/2)`, diagonalized densely. Shares no
//! code with the secular-equation path.

use std::f64::consts::FRAC_PI_2;

use faer::{c64, Mat};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::WellConfig;

pub fn basis_value(n: usize, x: f64) -> f64 {
    (n as f64 * FRAC_PI_2 * (x + 1.0)).sin()
}

pub fn build_hamiltonian_matrix(config: &WellConfig, m: usize) -> Result<Mat<c64>> {
    if m == 0 {
        return Err(Error::Domain {
            what: "basis size",
            value: 0.0,
        });
    }
    let a = config.a();
    let xi = config.xi();
    let u: Vec<f64> = (1..=m).map(|n| basis_value(n, a)).collect();
    let v: Vec<f64> = (1..=m).map(|n| basis_value(n, -a)).collect();
    Ok(Mat::<c64>::from_fn(m, m, |i, j| {
        let kinetic = if i == j {
            let k = (i + 1) as f64 * FRAC_PI_2;
            k * k
        } else {
            0.0
        };
        c64::new(kinetic, xi * (u[i] * u[j] - v[i] * v[j]))
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSpectrum {
    pub config: WellConfig,
    pub m: usize,
    /// Sorted by real part.
    pub eigenvalues: Vec<Complex64>,
    /// Frobenius norm of the matrix.
    pub scale: f64,
}

impl OracleSpectrum {
    pub fn lowest(&self, count: usize) -> &[Complex64] {
        &self.eigenvalues[..count.min(self.eigenvalues.len())]
    }

    /// Largest imaginary part, relative to `scale`, that has no conjugate partner.
    pub fn conjugate_pair_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for e in &self.eigenvalues {
            let partner = self
                .eigenvalues
                .iter()
                .map(|f| (f - e.conj()).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(partner.min(e.im.abs()));
        }
        worst / self.scale
    }

    /// Eigenvalues among the lowest `count` with imaginary part above `rel_tol * |E|`.
    pub fn complex_among_lowest(&self, count: usize, rel_tol: f64) -> Vec<Complex64> {
        self.lowest(count)
            .iter()
            .copied()
            .filter(|e| e.im.abs() > rel_tol * e.norm())
            .collect()
    }
}

pub fn oracle_spectrum(config: &WellConfig, m: usize) -> Result<OracleSpectrum> {
    let h = build_hamiltonian_matrix(config, m)?;
    let scale = h.norm_l2();
    let mut eigenvalues: Vec<Complex64> = h
        .eigenvalues()
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?
        .into_iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect();
    eigenvalues.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(OracleSpectrum {
        config: *config,
        m,
        eigenvalues,
        scale,
    })
}

/// `2 E_fine - E_coarse` for the lowest `count` levels, assuming error `O(1/M)`
/// and `fine.m = 2 coarse.m`.
pub fn richardson(
    coarse: &OracleSpectrum,
    fine: &OracleSpectrum,
    count: usize,
) -> Result<Vec<Complex64>> {
    if fine.m != 2 * coarse.m {
        return Err(Error::Length {
            expected: 2 * coarse.m,
            actual: fine.m,
        });
    }
    Ok(coarse
        .lowest(count)
        .iter()
        .zip(fine.lowest(count))
        .map(|(c, f)| 2.0 * f - c)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelMatch {
    pub n: usize,
    pub reference: Complex64,
    pub oracle: Complex64,
    pub relative_error: f64,
}

/// Assigns each reference value the oracle value nearest in real part.
///
/// Two references claiming the same oracle value is an error, so that a
/// mislabelled level cannot pass silently.
pub fn match_levels(reference: &[Complex64], oracle: &[Complex64]) -> Result<Vec<LevelMatch>> {
    let mut used: Vec<Option<usize>> = vec![None; oracle.len()];
    let mut out = Vec::with_capacity(reference.len());
    for (i, r) in reference.iter().enumerate() {
        let (j, o) = oracle
            .iter()
            .enumerate()
            .min_by(|x, y| {
                let dx = (x.1.re - r.re).abs() + (x.1.im - r.im).abs();
                let dy = (y.1.re - r.re).abs() + (y.1.im - r.im).abs();
                dx.total_cmp(&dy)
            })
            .ok_or(Error::Length {
                expected: reference.len(),
                actual: 0,
            })?;
        if let Some(prev) = used[j] {
            return Err(Error::Degenerate {
                n: prev + 1,
                m: i + 1,
                kappa: o.re.max(0.0).sqrt(),
            });
        }
        used[j] = Some(i);
        out.push(LevelMatch {
            n: i + 1,
            reference: *r,
            oracle: *o,
            relative_error: (o - r).norm() / r.norm(),
        });
    }
    Ok(out)
}

/// `log2(|e_k| / |e_{k+1}|)` for errors at successively doubled basis sizes.
pub fn empirical_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}
