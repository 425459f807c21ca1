use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Numeric and validation failures of the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time {t} outside schedule domain [0, {duration}]")]
    Domain { t: f64, duration: f64 },

    #[error("coupling magnitude g0 vanishes at t = {t}")]
    VanishingCoupling { t: f64 },

    #[error("eigenvector residual {residual:e} exceeds tolerance (defective matrix?)")]
    Defective { residual: f64 },

    #[error("dark mode selection ambiguous: overlaps {first} and {second}")]
    AmbiguousDarkMode { first: f64, second: f64 },

    #[error("eigenvector tracking lost continuity near t = {t} (overlap {overlap})")]
    Tracking { t: f64, overlap: f64 },

    #[error("adaptive quadrature exceeded {panels} panels")]
    Quadrature { panels: usize },

    #[error("first-order fidelity expansion invalid: {reason}; use the numeric fidelity")]
    ExpansionBreakdown { reason: String },

    #[error("unphysical Gaussian state at t = {t}: smallest eigenvalue {min_eigenvalue:e}")]
    Unphysical { t: f64, min_eigenvalue: f64 },

    #[error("singular covariance sum in fidelity")]
    SingularCovariance,

    #[error("Fock truncation did not converge below cutoff {cutoff}")]
    Cutoff { cutoff: usize },

    #[error("no half-width crossing of |T31| in (0, {upper}]")]
    NoCrossing { upper: f64 },

    #[error("denominator of the resonant transmission vanishes")]
    ZeroDenominator,

    #[error("pulse edge amplitude {edge:e} exceeds window tolerance {limit:e}")]
    Window { edge: f64, limit: f64 },

    #[error("pulse has zero norm")]
    ZeroNorm,

    #[error("{quantity} is not finite")]
    NonFinite { quantity: String },

    #[error("grid mismatch: {0}")]
    Grid(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
