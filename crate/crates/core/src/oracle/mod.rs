//! Numeric checks: contour residues, Morse-integral scaling, bubble
//! quadrature near threshold, a Monte Carlo QED estimate, and the log-log
//! fits used to compare against predicted exponents.

pub mod bubble;
pub mod fit;
pub mod morse;
pub mod qed;
pub mod quad;
pub mod residue;

use thiserror::Error;

use crate::pinch::PinchError;

pub use bubble::{bubble_direct, bubble_numeric, bubble_scan, BubbleScan};
pub use fit::{fit_log, fit_slope, geometric_eps, LogFit, SlopeFit};
pub use morse::{morse_check, morse_integral, MorseCheck};
pub use qed::{qed_reduced_numeric, qed_scan, McConfig, McEstimate, QedCheck};
pub use residue::{residue_kernel, residue_kernel_exact};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("contour ambiguous: {0}")]
    ContourAmbiguous(String),
    #[error("quadratic form is not positive definite")]
    NotPositiveDefinite,
    #[error("not convergent: {0}")]
    NonConvergent(String),
    #[error("insufficient samples: standard error {std_err:.3e} exceeds 10% of mean {mean:.3e}")]
    InsufficientSamples { mean: f64, std_err: f64 },
    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("symbolic stage: {0}")]
    Symbolic(String),
    #[error(transparent)]
    Pinch(#[from] PinchError),
}
