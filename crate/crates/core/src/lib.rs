//! Relative zeta regularization for pairs of Schrödinger operators.
//!
//! The crate evaluates, for the pair `H_α = −Δ + γ/|x| + αδ₀` and
//! `H₀ = −Δ + γ/|x|` on ℝ³, the trace of the relative resolvent, the relative
//! spectral measure, the meromorphically continued relative zeta function and
//! the regularized relative partition function on `S¹ × ℝ³`.
//!
//! Layout:
//!
//! * [`specfun`]: complex log-gamma, digamma, trigamma, Bernoulli numbers.
//! * [`quadrature`]: adaptive Gauss–Kronrod integration, tail subtraction,
//!   vertical-line and Hankel contour integrals.
//! * [`model`]: the Coulomb plus point-interaction pair, its asymptotic
//!   expansions and bound states.
//! * [`relative`]: the generic [`RelativeModel`](relative::RelativeModel)
//!   contract consumed by the zeta engine.
//! * [`spectral`]: the relative spectral measure and its expansion coefficients.
//! * [`zeta`]: analytic continuation, Laurent data, residua on `S¹ × W`,
//!   relative Dedekind eta and `log Z_R`.
//! * [`verify`]: the oracle suite behind the `verify` CLI command.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fit;
pub mod model;
pub mod quadrature;
pub mod relative;
pub mod roots;
pub mod specfun;
pub mod spectral;
pub mod verify;
pub mod zeta;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Complex scalar used for κ, λ, s and z throughout the crate.
pub type ComplexScalar = Complex64;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
