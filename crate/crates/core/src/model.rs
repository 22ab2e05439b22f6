//! Domain types shared by every other module.
//!
//! The model is the infinite square well on (-1, 1) with the point
//! interactions `-i xi delta(x + a) + i xi delta(x - a)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The two model parameters: displacement `a` of the interactions and the
/// coupling magnitude `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellConfig {
    a: f64,
    xi: f64,
}

impl WellConfig {
    /// Validates `0 < a < 1` and `xi >= 0`.
    ///
    /// The sign pattern of the couplings is fixed by the model, so a negative
    /// `xi` is rejected instead of being folded into the positions.
    pub fn new(a: f64, xi: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::Displacement(a));
        }
        if !(xi.is_finite() && xi >= 0.0) {
            return Err(Error::Coupling(xi));
        }
        Ok(Self { a, xi })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Half coupling `mu = xi / 2`, the natural variable at `a = 1/2`.
    pub fn mu(&self) -> f64 {
        0.5 * self.xi
    }

    /// Same displacement, different coupling.
    pub fn with_xi(&self, xi: f64) -> Result<Self> {
        Self::new(self.a, xi)
    }

    pub fn is_symmetric_half(&self) -> bool {
        self.a == 0.5
    }
}

/// Whether a level sits on the real axis or belongs to a conjugate pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Real,
    ComplexPair,
}

/// One level of the spectrum: `E_n = kappa_n^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralRoot {
    /// 1-based index by ascending `Re(kappa)`.
    pub n: usize,
    pub kappa: Complex64,
    pub energy: Complex64,
    pub regime: Regime,
}

impl SpectralRoot {
    pub fn real(n: usize, kappa: f64) -> Self {
        Self {
            n,
            kappa: Complex64::new(kappa, 0.0),
            energy: Complex64::new(kappa * kappa, 0.0),
            regime: Regime::Real,
        }
    }

    pub fn complex(n: usize, kappa: Complex64) -> Self {
        Self {
            n,
            kappa,
            energy: kappa * kappa,
            regime: Regime::ComplexPair,
        }
    }

    /// The real momentum, or an error for a member of a complex pair.
    pub fn real_kappa(&self) -> Result<f64> {
        match self.regime {
            Regime::Real => Ok(self.kappa.re),
            Regime::ComplexPair => Err(Error::ComplexRoot {
                n: self.n,
                re: self.kappa.re,
                im: self.kappa.im,
            }),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            kappa: self.kappa.conj(),
            energy: self.energy.conj(),
            ..*self
        }
    }
}

/// Which amplitude of the ansatz was pinned to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormConvention {
    AlphaUnit,
    DeltaUnit,
    GammaUnit,
}

/// Closed-formula chain used to produce a set of amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientChain {
    /// From `gamma`: `alpha` and `delta` first, then `beta`.
    FromGamma,
    /// From `delta`: `gamma` and `beta` first, then `alpha`.
    FromDelta,
    /// `sin kappa(1 - a) = 0`: the outer sines have a node at the interaction points.
    OuterNode,
    /// No closed chain applies; null vector from the adjugate of the matching matrix.
    Adjugate,
}

/// Real amplitudes of the PT-symmetric ansatz
///
/// ```text
/// psi_L = (alpha - i beta) sin k(x + 1)           on (-1, -a)
/// psi_C = gamma cos kx + i delta sin kx           on (-a, a)
/// psi_R = (alpha + i beta) sin k(1 - x)           on (a, 1)
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveCoeffs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub norm_convention: NormConvention,
    pub chain: CoefficientChain,
}

impl WaveCoeffs {
    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            alpha: self.alpha * factor,
            beta: self.beta * factor,
            gamma: self.gamma * factor,
            delta: self.delta * factor,
            ..*self
        }
    }
}
