use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("{function}: pole at {at}")]
    Pole { function: &'static str, at: String },

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "quadrature did not converge ({what}): best estimate {best_estimate:e}, error estimate {error_estimate:e}"
    )]
    NoConvergence {
        what: String,
        best_estimate: f64,
        error_estimate: f64,
    },

    #[error("tail integral diverges: residual decays like v^{exponent:.3}, next tail term missing")]
    Divergence { exponent: f64 },

    #[error("integrand does not decay along the contour (|g| = {magnitude:e} at height {height})")]
    InsufficientDecay { height: f64, magnitude: f64 },

    #[error("Hankel contour sum has imaginary residual {residual:e} above tolerance {tolerance:e}")]
    ImaginaryResidual { residual: f64, tolerance: f64 },

    #[error("relative trace has an eigenvalue pole at kappa = {kappa}")]
    EigenvaluePole { kappa: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("root bracketing failed: {0}")]
    Bracketing(String),

    #[error("invalid relative model: {0}")]
    InvalidModel(String),

    #[error(
        "operator has a negative eigenvalue E = {energy:.12} (s-wave equation 4πα − γF_γ(γ/2√−E) = 0); \
         the zeta machinery requires purely continuous spectrum"
    )]
    BoundStateRegion { energy: f64 },

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    #[error("branch-cut evaluation mismatch at v = {v}: two-sided {two_sided:e}, reduced {reduced:e}")]
    BranchMismatch {
        v: f64,
        two_sided: f64,
        reduced: f64,
    },

    #[error("s = {s} is within {distance:e} of the pole at {pole}")]
    PoleProximity { s: f64, pole: f64, distance: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn pole(function: &'static str, at: impl std::fmt::Display) -> Self {
        Error::Pole {
            function,
            at: at.to_string(),
        }
    }
}
