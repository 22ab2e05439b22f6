//! Spectral analysis of the PT-symmetric infinite square well on (-1, 1)
//! with two imaginary point interactions `-i xi delta(x + a) + i xi delta(x - a)`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod criticality;
pub mod eigenstates;
pub mod error;
pub mod metric;
pub mod model;
pub mod oracle;
pub mod perturbation;
pub mod rootfind;
pub mod secular;
pub mod series;

pub use error::{Error, Result};
pub use model::{CoefficientChain, NormConvention, Regime, SpectralRoot, WaveCoeffs, WellConfig};
