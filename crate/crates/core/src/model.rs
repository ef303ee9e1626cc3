//! The Coulomb plus point-interaction pair `H_α = −Δ + γ/|x| + αδ₀`,
//! `H₀ = −Δ + γ/|x|` on ℝ³.
//!
//! With `κ = √(−λ)`, `Re κ > 0` and `z = γ/(2κ)` the relative resolvent trace
//! is
//!
//! ```text
//! r(λ) = −z I(z) / (γ (4πα − γ F(z)))
//! F(z) = ψ(1+z) − log z − 1/(2z) − ψ(1) − ψ(2)
//! I(z) = 1 − 2z + 2z² ψ'(1+z)
//! ```
//!
//! and for `γ = 0` it reduces to `r = −1/(2κ(4πα + κ))`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_vertical_line, AccuracyBudget, Estimate};
use crate::relative::{RelativeModel, ResolventTrace};
use crate::roots::brent;
use crate::specfun::{bernoulli, digamma, trigamma, zeta_integer};
use crate::EULER_GAMMA;

/// `−ψ(1) − ψ(2) = 2C − 1`.
const PSI_SHIFT: f64 = 2.0 * EULER_GAMMA - 1.0;

/// `|z|` above which `F` and `I` are summed from their asymptotic series.
const ASYMPTOTIC_RADIUS: f64 = 20.0;

/// Relative size of the denominator below which a trace evaluation is treated
/// as sitting on an eigenvalue.
pub const POLE_GUARD: f64 = 1e-12;

/// Couplings of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    /// Coulomb coupling `γ ≥ 0`.
    pub gamma: f64,
    /// Point-interaction strength `α`.
    pub alpha: f64,
}

impl ModelParams {
    pub fn new(gamma: f64, alpha: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidInput(format!(
                "Coulomb coupling must be finite and non-negative, got γ = {gamma}"
            )));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidInput(format!("α = {alpha} is not finite")));
        }
        Ok(Self { gamma, alpha })
    }

    /// True when `α < α*(γ)`, i.e. `H_α` has a negative eigenvalue.
    pub fn has_bound_state(&self) -> bool {
        self.alpha < bound_state_threshold(self.gamma)
    }

    /// `4πα + γ(1 − 2C)`, the denominator at `λ = 0`.
    pub fn threshold_denominator(&self) -> f64 {
        4.0 * PI * self.alpha - self.gamma * PSI_SHIFT
    }
}

/// Which variable an [`Expansion`] is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionVariable {
    /// `Σ a (−λ)^q log^k(−λ)`.
    MinusLambda,
    /// `Σ e v^q log^k v`.
    SpectralV,
}

/// Whether the terms describe `λ → 0` or `λ → −∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionRegime {
    /// Increasing exponents, no logarithms.
    Small,
    /// Decreasing exponents, logarithms allowed.
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionTerm {
    pub exponent: f64,
    pub log_power: u32,
    pub coefficient: f64,
}

impl ExpansionTerm {
    pub fn new(exponent: f64, log_power: u32, coefficient: f64) -> Self {
        Self {
            exponent,
            log_power,
            coefficient,
        }
    }
}

/// An asymptotic expansion with its truncation order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expansion {
    pub variable: ExpansionVariable,
    pub regime: ExpansionRegime,
    pub terms: Vec<ExpansionTerm>,
    /// `(q, k)`: the first omitted order is `O(x^q log^k x)`.
    pub remainder: Option<(f64, u32)>,
}

impl Expansion {
    /// Small-argument expansion `Σ b_j (−λ)^{β_j}`.
    pub fn small(terms: Vec<ExpansionTerm>, remainder: Option<f64>) -> Result<Self> {
        let e = Self {
            variable: ExpansionVariable::MinusLambda,
            regime: ExpansionRegime::Small,
            terms,
            remainder: remainder.map(|q| (q, 0)),
        };
        e.validate()?;
        Ok(e)
    }

    /// Large-argument expansion `Σ a_{j,k} (−λ)^{α_j} log^k(−λ)`.
    pub fn large(terms: Vec<ExpansionTerm>, remainder: Option<(f64, u32)>) -> Result<Self> {
        let e = Self {
            variable: ExpansionVariable::MinusLambda,
            regime: ExpansionRegime::Large,
            terms,
            remainder,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn empty(regime: ExpansionRegime) -> Self {
        Self {
            variable: ExpansionVariable::MinusLambda,
            regime,
            terms: Vec::new(),
            remainder: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.terms {
            if !t.coefficient.is_finite() || !t.exponent.is_finite() {
                return Err(Error::InvalidModel(format!("non-finite expansion term {t:?}")));
            }
        }
        match self.regime {
            ExpansionRegime::Small => {
                if let Some(t) = self.terms.iter().find(|t| t.log_power != 0) {
                    return Err(Error::InvalidModel(format!(
                        "small-λ expansions carry no logarithms, found {t:?}"
                    )));
                }
                if self.terms.windows(2).any(|w| w[0].exponent >= w[1].exponent) {
                    return Err(Error::InvalidModel(
                        "small-λ exponents must increase strictly".into(),
                    ));
                }
                if let (Some(last), Some((q, _))) = (self.terms.last(), self.remainder) {
                    if q <= last.exponent {
                        return Err(Error::InvalidModel("remainder order below last term".into()));
                    }
                }
            }
            ExpansionRegime::Large => {
                let ordered = self.terms.windows(2).all(|w| {
                    w[0].exponent > w[1].exponent
                        || (w[0].exponent == w[1].exponent && w[0].log_power > w[1].log_power)
                });
                if !ordered {
                    return Err(Error::InvalidModel(
                        "large-λ exponents must decrease (log powers decreasing within an exponent)"
                            .into(),
                    ));
                }
                if let (Some(last), Some((q, _))) = (self.terms.last(), self.remainder) {
                    if q >= last.exponent {
                        return Err(Error::InvalidModel("remainder order above last term".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Leading exponent (`β₀` or `α₀`).
    pub fn leading_exponent(&self) -> Option<f64> {
        self.terms.first().map(|t| t.exponent)
    }

    /// Sum of the terms at `x = −λ` (complex, principal branches).
    pub fn eval(&self, x: Complex64) -> Complex64 {
        let log = x.ln();
        self.terms
            .iter()
            .map(|t| x.powf(t.exponent) * log.powu(t.log_power) * t.coefficient)
            .sum()
    }
}

/// `F(z) = ψ(1+z) − log z − 1/(2z) + 2C − 1`.
pub fn f_gamma(z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::pole("F", z));
    }
    if z.im == 0.0 && z.re < 0.0 {
        if z.re == z.re.floor() {
            return Err(Error::pole("F", z));
        }
        return Err(Error::Domain(format!(
            "F({z}) lies on the branch cut of log z"
        )));
    }
    if use_asymptotic(z) {
        // ψ(1+z) − log z − 1/(2z) = −Σ B₂ₖ/(2k z²ᵏ)
        let w = (z * z).inv();
        let mut term = w;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 1..=8u32 {
            sum -= term * (bernoulli(2 * k)? / (2 * k) as f64);
            term *= w;
        }
        return Ok(sum + PSI_SHIFT);
    }
    Ok(digamma(z + 1.0)? - z.ln() - 0.5 / z + PSI_SHIFT)
}

fn use_asymptotic(z: Complex64) -> bool {
    z.norm() >= ASYMPTOTIC_RADIUS && z.re > -0.5 * z.norm()
}

/// `z I(z)`; the asymptotic form `2 Σ B₂ₖ z^{2−2k}` avoids the cancellation
/// of the closed form at large `|z|`.
fn z_times_i(z: Complex64) -> Result<Complex64> {
    if use_asymptotic(z) {
        let w = (z * z).inv();
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 1..=8u32 {
            sum += term * (2.0 * bernoulli(2 * k)?);
            term *= w;
        }
        return Ok(sum);
    }
    Ok(z * i_closed(z)?)
}

/// `I(z) = 1 − 2z + 2z² ψ'(1+z)`.
pub fn i_closed(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= -1.0 && z.re == z.re.floor() {
        return Err(Error::pole("I", z));
    }
    if use_asymptotic(z) {
        return Ok(z_times_i(z)? / z);
    }
    Ok(1.0 - 2.0 * z + 2.0 * z * z * trigamma(z + 1.0)?)
}

/// `I(z)` from its defining contour integral
///
/// ```text
/// I(z) = z/(2πi) ∫_L (1−s)s / ((s+z)(s−1+z)) · π²/sin²(πs) ds
/// ```
///
/// along the vertical line halfway between `max(0, 1 − Re z)` and `1`.
pub fn i_contour(z: Complex64, budget: &AccuracyBudget) -> Result<Estimate<Complex64>> {
    if !(z.re > 0.0) {
        return Err(Error::Domain(format!(
            "the contour representation of I needs Re z > 0, got z = {z}"
        )));
    }
    let lo = (1.0 - z.re).max(0.0);
    let x0 = 0.5 * (lo + 1.0);
    let g = move |s: Complex64| -> Result<Complex64> {
        let sine = (s * PI).sin();
        let rational = (1.0 - s) * s / ((s + z) * (s - 1.0 + z));
        Ok(rational * PI * PI / (sine * sine))
    };
    // I = z · line, so the line integral needs |z| times more accuracy
    let inner = budget.scaled(1.0 / z.norm().max(1.0));
    let line = integrate_vertical_line(&g, x0, &inner)?;
    Ok(Estimate {
        value: z * line.value,
        error: z.norm() * line.error,
        evaluations: line.evaluations,
    })
}

fn check_denominator(den: Complex64, scale: f64, kappa: Complex64) -> Result<()> {
    if den.norm() < POLE_GUARD * (1.0 + scale) {
        return Err(Error::EigenvaluePole {
            kappa: kappa.to_string(),
        });
    }
    Ok(())
}

/// Relative resolvent trace `r(λ; H_α, H₀)` at `κ = √(−λ)`, `Re κ ≥ 0`.
pub fn relative_trace(params: &ModelParams, kappa: Complex64) -> Result<Complex64> {
    if kappa.norm() == 0.0 || !kappa.re.is_finite() || !kappa.im.is_finite() {
        return Err(Error::Domain(format!("relative trace needs κ ≠ 0, got {kappa}")));
    }
    if kappa.re < 0.0 {
        return Err(Error::Domain(format!(
            "κ = {kappa} is on the unphysical sheet (Re κ < 0)"
        )));
    }
    let ModelParams { gamma, alpha } = *params;
    if gamma == 0.0 {
        let den = 4.0 * PI * alpha + kappa;
        check_denominator(den, kappa.norm(), kappa)?;
        return Ok(-1.0 / (2.0 * kappa * den));
    }
    let z = gamma / (2.0 * kappa);
    let gf = gamma * f_gamma(z)?;
    let den = 4.0 * PI * alpha - gf;
    check_denominator(den, gf.norm(), kappa)?;
    Ok(-z_times_i(z)? / (gamma * den))
}

/// `α*(γ) = −γ(ψ(1) + ψ(2))/(4π) = γ(2C − 1)/(4π)`.
pub fn bound_state_threshold(gamma: f64) -> f64 {
    gamma * PSI_SHIFT / (4.0 * PI)
}

/// The negative eigenvalue of `H_α`, if any.
///
/// Solves `4πα − γ F(γ/(2x)) = 0` for `x = √(−E) > 0`. The left side grows
/// monotonically from `4π(α − α*)` at `x → 0⁺` to `+∞`, so a root exists iff
/// `α < α*`.
pub fn find_bound_state(params: &ModelParams) -> Result<Option<f64>> {
    let ModelParams { gamma, alpha } = *params;
    if !params.has_bound_state() {
        return Ok(None);
    }
    if gamma == 0.0 {
        let x = -4.0 * PI * alpha;
        return Ok(Some(-x * x));
    }
    let g = |x: f64| -> Result<f64> {
        Ok(4.0 * PI * alpha - gamma * f_gamma(Complex64::new(gamma / (2.0 * x), 0.0))?.re)
    };
    let lo = 1e-8;
    if g(lo)? >= 0.0 {
        return Err(Error::Bracketing(format!(
            "eigenvalue equation is non-negative at x = {lo:e} although α < α*"
        )));
    }
    let mut hi = 1.0;
    let mut grown = 0;
    while g(hi)? <= 0.0 {
        hi *= 2.0;
        grown += 1;
        if grown > 2000 {
            return Err(Error::Bracketing(
                "no sign change of the eigenvalue equation found".into(),
            ));
        }
    }
    let x = brent(g, lo, hi, 1e-15 * hi, 500)?;
    Ok(Some(-x * x))
}

/// Maximum order served by [`small_lambda_expansion`] for `γ > 0`.
pub const MAX_SMALL_ORDER: usize = 14;

/// `r(λ) = Σ_{k<order} b_k (−λ)^{β_k}` as `λ → 0⁻`.
///
/// For `γ > 0`, `β_k = k` and the `b_k` are obtained exactly by dividing the
/// asymptotic series of `zI(z)` and `4πα − γF(z)` in `w = z⁻² = −4λ/γ²`; the
/// first two agree with
///
/// ```text
/// b₀ = −1/(3γD₀),  b₁ = (12D₀ + 5γ)/(45γ³D₀²),  D₀ = 4πα + γ(1 − 2C).
/// ```
///
/// For `γ = 0`, `β_k = (k−1)/2` and `b_k = (−1)^{k+1}/(2(4πα)^{k+1})`.
pub fn small_lambda_expansion(params: &ModelParams, order: usize) -> Result<Expansion> {
    let ModelParams { gamma, alpha } = *params;
    if order == 0 {
        return Expansion::small(Vec::new(), None);
    }
    if gamma == 0.0 {
        if alpha == 0.0 {
            return Err(Error::InvalidModel(
                "γ = α = 0: the trace −1/(2κ²) has no small-λ expansion of the required form \
                 (b₀ = −1/(3γ·(…)) is undefined)"
                    .into(),
            ));
        }
        let a = 4.0 * PI * alpha;
        let terms = (0..order)
            .map(|n| {
                let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
                ExpansionTerm::new((n as f64 - 1.0) / 2.0, 0, sign / (2.0 * a.powi(n as i32 + 1)))
            })
            .collect();
        return Expansion::small(terms, Some((order as f64 - 1.0) / 2.0));
    }
    if order > MAX_SMALL_ORDER + 1 {
        return Err(Error::OutOfRange {
            what: "small-λ expansion order",
            detail: format!("{order} > {}", MAX_SMALL_ORDER + 1),
        });
    }
    let d0 = params.threshold_denominator();
    if d0 == 0.0 {
        return Err(Error::InvalidModel(format!(
            "α = α*(γ): the trace diverges as λ → 0 (zero-energy resonance at γ = {gamma})"
        )));
    }
    // numerator Σ N_n w^n with N_n = 2 B_{2n+2}; denominator D₀ + γ Σ B_{2n}/(2n) wⁿ
    let mut num = Vec::with_capacity(order);
    let mut den = vec![d0];
    for n in 0..order {
        num.push(2.0 * bernoulli(2 * n as u32 + 2)?);
        if n >= 1 {
            den.push(gamma * bernoulli(2 * n as u32)? / (2 * n) as f64);
        }
    }
    let mut quotient: Vec<f64> = Vec::with_capacity(order);
    for n in 0..order {
        let mut acc = num[n];
        for j in 1..=n {
            acc -= den[j] * quotient[n - j];
        }
        quotient.push(acc / d0);
    }
    let scale = 4.0 / (gamma * gamma);
    let terms = quotient
        .iter()
        .enumerate()
        .map(|(n, q)| ExpansionTerm::new(n as f64, 0, -q * scale.powi(n as i32) / gamma))
        .collect();
    Expansion::small(terms, Some(order as f64))
}

/// `a_{3,0} = (4πα + (2 − C)γ + γ log(γ/2))/2`.
pub fn a30(params: &ModelParams) -> f64 {
    let ModelParams { gamma, alpha } = *params;
    let glog = if gamma == 0.0 { 0.0 } else { gamma * (gamma / 2.0).ln() };
    0.5 * (4.0 * PI * alpha + (2.0 - EULER_GAMMA) * gamma + glog)
}

/// `r(λ) = −½(−λ)⁻¹ + a_{3,1}(−λ)^{−3/2} log(−λ) + a_{3,0}(−λ)^{−3/2} + …`
/// with `a_{3,1} = −γ/4`.
pub fn large_lambda_expansion(params: &ModelParams) -> Result<Expansion> {
    large_lambda_expansion_to(params, 1)
}

/// Highest order served by [`large_lambda_expansion_to`].
pub const MAX_LARGE_ORDER: usize = 12;

/// Large-λ order attached to a [`CoulombDelta`] model.
pub const DEFAULT_LARGE_ORDER: usize = 3;

/// `κ² r = Σ_{n ≤ order} κ⁻ⁿ P_n(log κ)` with `deg P_n ≤ n`, rewritten in
/// powers of `−λ = κ²`: exponents `−1 − n/2`, log powers `m ≤ n` of
/// `log(−λ)`.
///
/// With `u = 1/κ`, `z = γu/2` and `A = 4πα + γ(1 − C + log(γ/2))`,
/// `κ² r = −½ I(z) / Q(u)` where `Q = 1 + u(A − γ log κ) − γ Σ_{k≥2}
/// (−1)^k ζ(k)(γ/2)^{k−1} u^k` is `(4πα − γF(z))/κ`; the quotient is taken
/// term by term.
pub fn large_lambda_expansion_to(params: &ModelParams, order: usize) -> Result<Expansion> {
    let ModelParams { gamma, alpha } = *params;
    if order > MAX_LARGE_ORDER {
        return Err(Error::OutOfRange {
            what: "large-λ expansion order",
            detail: format!("{order} > {MAX_LARGE_ORDER}"),
        });
    }
    let h = gamma / 2.0;
    // series in u with coefficients polynomial in L = log κ: s[n][m]
    let n_terms = order + 1;
    let mut num = vec![vec![0.0; n_terms]; n_terms];
    let mut den = vec![vec![0.0; n_terms]; n_terms];
    num[0][0] = 1.0;
    den[0][0] = 1.0;
    if n_terms > 1 {
        num[1][0] = -gamma;
        let glog = if gamma == 0.0 { 0.0 } else { gamma * h.ln() };
        den[1][0] = 4.0 * PI * alpha + gamma * (1.0 - EULER_GAMMA) + glog;
        den[1][1] = -gamma;
    }
    for n in 2..n_terms {
        // 2z²ψ′(1+z) = 2h²u² Σ (−1)^k (k+1) ζ(k+2) h^k u^k
        let k = n - 2;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        num[n][0] = 2.0 * h * h * sign * (k + 1) as f64 * zeta_integer(k as u32 + 2)? * h.powi(k as i32);
        let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
        den[n][0] = -gamma * sign_n * zeta_integer(n as u32)? * h.powi(n as i32 - 1);
    }
    let mut q = vec![vec![0.0; n_terms]; n_terms];
    for n in 0..n_terms {
        let mut acc = num[n].clone();
        for j in 1..=n {
            for (a, da) in den[j].iter().enumerate() {
                if *da == 0.0 {
                    continue;
                }
                for (b, qb) in q[n - j].iter().enumerate() {
                    if a + b < n_terms {
                        acc[a + b] -= da * qb;
                    }
                }
            }
        }
        q[n] = acc;
    }
    let mut terms = Vec::new();
    for (n, poly) in q.iter().enumerate() {
        let exponent = -1.0 - n as f64 / 2.0;
        for m in (0..=n).rev() {
            // L^m = (log(−λ)/2)^m
            terms.push(ExpansionTerm::new(exponent, m as u32, -0.5 * poly[m] / 2f64.powi(m as i32)));
        }
    }
    let next = order + 1;
    let remainder = (-1.0 - next as f64 / 2.0, if gamma == 0.0 { 0 } else { next as u32 });
    Expansion::large(terms, Some(remainder))
}

/// Fitted large-λ coefficients of `κ² r(κ) ≈ a₂₀ + (a₃₁ log κ² + a₃₀)/κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargeLambdaFit {
    pub a20: f64,
    pub a30: f64,
    pub a31: f64,
    pub residual: f64,
}

/// Least-squares fit of `κ² r` for real `κ` on `[k_min, k_max]` against
/// `{1, κ⁻¹, κ⁻¹ log κ²}`, with `κ⁻ⁿ logᵐ κ²` (`2 ≤ n ≤ 5`, `m ≤ n`)
/// correction columns added only as far as needed to reach rounding level.
pub fn fit_large_lambda(params: &ModelParams, k_min: f64, k_max: f64) -> Result<LargeLambdaFit> {
    use crate::fit::{least_squares_with_limit, log_grid};
    if !(k_min > 0.0) || !(k_max > k_min) {
        return Err(Error::InvalidInput(format!("fit window [{k_min}, {k_max}]")));
    }
    let grid = log_grid(k_min, k_max, 121);
    let y: Vec<f64> = grid
        .iter()
        .map(|&k| Ok(k * k * relative_trace(params, Complex64::new(k, 0.0))?.re))
        .collect::<Result<_>>()?;
    let logs: Vec<f64> = grid.iter().map(|k| 2.0 * k.ln()).collect();
    let scale = y.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut last = None;
    for order in 1..=5u32 {
        let mut columns = vec![
            vec![1.0; grid.len()],
            grid.iter().map(|k| 1.0 / k).collect::<Vec<_>>(),
            grid.iter().zip(&logs).map(|(k, l)| l / k).collect(),
        ];
        for n in 2..=order {
            for m in 0..=n {
                columns.push(
                    grid.iter()
                        .zip(&logs)
                        .map(|(k, l)| k.powi(-(n as i32)) * l.powi(m as i32))
                        .collect(),
                );
            }
        }
        let fit = least_squares_with_limit(&columns, &y, 1e15)?;
        let exact = fit.residual <= 64.0 * f64::EPSILON * scale;
        last = Some(LargeLambdaFit {
            a20: fit.coefficients[0],
            a30: fit.coefficients[1],
            a31: fit.coefficients[2],
            residual: fit.residual,
        });
        if exact {
            break;
        }
    }
    Ok(last.expect("at least one fit order"))
}

/// Number of small-λ terms attached to a [`CoulombDelta`] model.
pub const DEFAULT_SMALL_ORDER: usize = 3;

/// The Coulomb plus point-interaction trace as a [`ResolventTrace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombDelta {
    pub params: ModelParams,
}

impl CoulombDelta {
    pub fn new(params: ModelParams) -> Self {
        Self { params }
    }

    /// Packages the trace and its expansions as a [`RelativeModel`].
    pub fn relative_model(params: ModelParams) -> Result<RelativeModel> {
        let small = small_lambda_expansion(&params, DEFAULT_SMALL_ORDER)?;
        let large = large_lambda_expansion_to(&params, DEFAULT_LARGE_ORDER)?;
        let name = format!("coulomb-delta(gamma={}, alpha={})", params.gamma, params.alpha);
        RelativeModel::new(name, std::sync::Arc::new(Self::new(params)), small, large)
    }

    // e(v) for γ > 0 written in real arithmetic. With y = γ/(2v):
    //   Re(zI) = 2y² + 2y³ Im ψ'(1+iy),  Im(zI) = π²y³/sinh²(πy)
    //   Re D = 4πα − γ(Re ψ(1+iy) − log y + 2C − 1),  −Im D = γπ/(e^{2πy} − 1)
    // which keeps full relative accuracy where the complex quotient cancels.
    fn coulomb_density(&self, v: f64) -> Result<f64> {
        let ModelParams { gamma, alpha } = self.params;
        let y = gamma / (2.0 * v);
        let two_pi_y = 2.0 * PI * y;
        let (x_re, d_re) = if y >= ASYMPTOTIC_RADIUS {
            // z = iy: z^{−2k} = (−1)^k y^{−2k}
            let w = -1.0 / (y * y);
            let mut term = 1.0;
            let mut zi = 0.0;
            let mut f = 0.0;
            for k in 1..=8u32 {
                let b = bernoulli(2 * k)?;
                zi += 2.0 * b * term;
                term *= w;
                f -= b / (2 * k) as f64 * term;
            }
            (zi, 4.0 * PI * alpha - gamma * (f + PSI_SHIFT))
        } else {
            let iy = Complex64::new(1.0, y);
            let q = trigamma(iy)?.im;
            let psi_re = digamma(iy)?.re;
            (
                2.0 * y * y + 2.0 * y * y * y * q,
                4.0 * PI * alpha - gamma * (psi_re - y.ln() + PSI_SHIFT),
            )
        };
        let (x_im, d_im) = if two_pi_y > 700.0 {
            (0.0, 0.0)
        } else {
            let e = (-two_pi_y).exp();
            let one_minus = -(-two_pi_y).exp_m1();
            (
                4.0 * PI * PI * y * y * y * e / (one_minus * one_minus),
                gamma * PI * e / one_minus,
            )
        };
        let den = d_re * d_re + d_im * d_im;
        let scale = gamma * (d_re.abs() + d_im.abs()).max(1.0);
        if den.sqrt() < POLE_GUARD * scale {
            return Err(Error::EigenvaluePole {
                kappa: Complex64::new(0.0, v).to_string(),
            });
        }
        Ok(2.0 * v / PI * (x_re * d_im + x_im * d_re) / (gamma * den))
    }
}

impl ResolventTrace for CoulombDelta {
    fn trace(&self, kappa: Complex64) -> Result<Complex64> {
        relative_trace(&self.params, kappa)
    }

    fn spectral_density(&self, v: f64) -> Result<f64> {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("spectral variable v = {v} must be positive")));
        }
        let ModelParams { gamma, alpha } = self.params;
        if gamma == 0.0 {
            let a = 4.0 * PI * alpha;
            if alpha == 0.0 {
                // r = −1/(2κ²) is real on the cut
                return Ok(0.0);
            }
            return Ok(4.0 * alpha / (a * a + v * v));
        }
        self.coulomb_density(v)
    }

    fn point_spectrum(&self) -> Result<Vec<f64>> {
        Ok(find_bound_state(&self.params)?.into_iter().collect())
    }
}
