//! The contract an operator pair `(A, A₀)` must satisfy to feed the zeta
//! engine: a relative resolvent trace plus its small- and large-λ expansions.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Expansion, ExpansionRegime, ExpansionVariable};

/// `r(λ; A, A₀)` as a function of `κ = √(−λ)`, `Re κ ≥ 0`.
pub trait ResolventTrace: Send + Sync {
    fn trace(&self, kappa: Complex64) -> Result<Complex64>;

    /// `e(v) = (v/πi)[r(κ = iv) − r(κ = −iv)] = (2v/π) Im r(iv)`.
    fn spectral_density(&self, v: f64) -> Result<f64> {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("spectral variable v = {v} must be positive")));
        }
        Ok(2.0 * v / PI * self.trace(Complex64::new(0.0, v))?.im)
    }

    /// Negative eigenvalues of `A` (those of `A₀` are assumed absent).
    fn point_spectrum(&self) -> Result<Vec<f64>> {
        Ok(Vec::new())
    }
}

/// An operator pair with validated expansion metadata.
#[derive(Clone)]
pub struct RelativeModel {
    name: String,
    trace: Arc<dyn ResolventTrace>,
    small: Expansion,
    large: Expansion,
}

impl fmt::Debug for RelativeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RelativeModel")
            .field("name", &self.name)
            .field("small", &self.small)
            .field("large", &self.large)
            .finish_non_exhaustive()
    }
}

impl RelativeModel {
    /// Checks the orderings of both expansions, `β₀ ≥ −1` and `α₀ < β₀`.
    pub fn new(
        name: impl Into<String>,
        trace: Arc<dyn ResolventTrace>,
        small: Expansion,
        large: Expansion,
    ) -> Result<Self> {
        if small.regime != ExpansionRegime::Small || large.regime != ExpansionRegime::Large {
            return Err(Error::InvalidModel("expansions passed in the wrong slots".into()));
        }
        for e in [&small, &large] {
            if e.variable != ExpansionVariable::MinusLambda {
                return Err(Error::InvalidModel(
                    "model expansions must be written in powers of −λ".into(),
                ));
            }
            e.validate()?;
        }
        if let Some(beta0) = small.leading_exponent() {
            if beta0 < -1.0 {
                return Err(Error::InvalidModel(format!(
                    "leading small-λ exponent β₀ = {beta0} is below −1"
                )));
            }
            if let Some(alpha0) = large.leading_exponent() {
                if !(alpha0 < beta0) {
                    return Err(Error::InvalidModel(format!(
                        "need α₀ < β₀, got α₀ = {alpha0}, β₀ = {beta0}"
                    )));
                }
            }
        }
        Ok(Self {
            name: name.into(),
            trace,
            small,
            large,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn small(&self) -> &Expansion {
        &self.small
    }

    pub fn large(&self) -> &Expansion {
        &self.large
    }

    pub fn trace(&self, kappa: Complex64) -> Result<Complex64> {
        self.trace.trace(kappa)
    }

    pub fn spectral_density(&self, v: f64) -> Result<f64> {
        self.trace.spectral_density(v)
    }

    pub fn point_spectrum(&self) -> Result<Vec<f64>> {
        self.trace.point_spectrum()
    }

    /// Same trace with different large-λ metadata (used to probe
    /// subtraction sets and fault injection).
    pub fn with_large(&self, large: Expansion) -> Result<Self> {
        Self::new(self.name.clone(), self.trace.clone(), self.small.clone(), large)
    }

    /// The pair `(A₀, A₀)`: `r ≡ 0`.
    pub fn zero() -> Self {
        Self {
            name: "zero".into(),
            trace: Arc::new(ZeroTrace),
            small: Expansion::empty(ExpansionRegime::Small),
            large: Expansion::empty(ExpansionRegime::Large),
        }
    }

    /// A model specified directly by its spectral density. The trace itself is
    /// not available, so only the spectral-side operations apply.
    pub fn from_density(
        name: impl Into<String>,
        density: impl Fn(f64) -> Result<f64> + Send + Sync + 'static,
        small: Expansion,
        large: Expansion,
    ) -> Result<Self> {
        Self::new(name, Arc::new(DensityOnly(Box::new(density))), small, large)
    }
}

/// `r ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroTrace;

impl ResolventTrace for ZeroTrace {
    fn trace(&self, _kappa: Complex64) -> Result<Complex64> {
        Ok(Complex64::new(0.0, 0.0))
    }
}

type DensityFn = Box<dyn Fn(f64) -> Result<f64> + Send + Sync>;

struct DensityOnly(DensityFn);

impl ResolventTrace for DensityOnly {
    fn trace(&self, _kappa: Complex64) -> Result<Complex64> {
        Err(Error::Unsupported(
            "this model is defined by its spectral density only".into(),
        ))
    }

    fn spectral_density(&self, v: f64) -> Result<f64> {
        (self.0)(v)
    }
}
