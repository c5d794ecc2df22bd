use thiserror::Error;

/// Errors raised by the optical and optomechanical models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("degenerate denominator at psi = {psi}")]
    DegenerateDenominator { psi: f64 },

    #[error("no zero-dispersive point: {0}")]
    NoZeroDispersivePoint(String),

    #[error("singular fluctuation system (|det| = {det_abs:e})")]
    SingularSystem { det_abs: f64 },

    #[error("both coupling constants vanish")]
    ZeroCoupling,

    #[error("no resonance root in window [{lo}, {hi}]")]
    NoRootInWindow { lo: f64, hi: f64 },

    #[error("branch ambiguity: cos^2(kl - 2kx) = 1 at k = {k}")]
    BranchAmbiguity { k: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
