//! The generic relative zeta engine: analytic continuation near `s = −½`,
//! Laurent data there, residua of `ζ(s; L, L₀)` at `s = 0` on `S¹ × W`,
//! the relative Dedekind eta function and `log Z_R`.
//!
//! Everything is driven by the expansion metadata of a [`RelativeModel`];
//! pole locations and subtraction sets are read off the oriented spectral
//! coefficients rather than hard-coded.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::least_squares_with_limit;
use crate::model::{ExpansionRegime, ModelParams};
use crate::quadrature::{
    integrate_finite, integrate_tail, AccuracyBudget, Estimate, Integrand, Singularity, TailModel,
};
use crate::relative::RelativeModel;
use crate::spectral::{
    resolve_coefficients, LargeVTerm, ResolvedCoefficients, SignResolution, SmallVTerm,
    DEFAULT_FIT_WINDOW,
};
use crate::EULER_GAMMA;

/// Minimum distance between an evaluation point and a pole of the
/// continuation.
pub const POLE_EXCLUSION: f64 = 1e-6;

/// Large-`v` terms with `α_j` at or above this value are subtracted on `[1, ∞)`.
pub const TAIL_SUBTRACTION_FLOOR: f64 = -1.5;

/// Further available large-`v` terms are subtracted (and compensated
/// analytically) while `v^{−2s}` times the term decays slower than
/// `v^{DEEP_SUBTRACTION_DECAY}`. Without them the residual integrand near
/// `s = −1` decays so slowly that rounding noise in `e − Σ` dominates before
/// the tail integral converges.
pub const DEEP_SUBTRACTION_DECAY: f64 = -2.5;

/// Default ring radii for the numerical Laurent fit. Two radii leave the
/// `(s + ½)²` term in the finite part at the 1e−4 level; the middle one removes it.
pub const DEFAULT_RING: [f64; 3] = [1e-2, 5e-3, 1e-3];

/// What to do when `A` has negative eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumPolicy {
    /// Refuse with [`Error::BoundStateRegion`].
    #[default]
    RequireContinuous,
    /// Proceed with the continuous spectral measure only; bound-state
    /// energies are reported in diagnostics.
    ContinuousPartOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaOptions {
    pub budget: AccuracyBudget,
    pub policy: SpectrumPolicy,
    /// Extra large-`v` terms subtracted on `[1, ∞)` and compensated
    /// analytically. Only useful for checking the subtraction bookkeeping.
    pub extra_tail_terms: Vec<LargeVTerm>,
    /// Window used by the sign-resolution fit.
    pub fit_window: (f64, f64),
}

impl Default for ZetaOptions {
    fn default() -> Self {
        Self {
            budget: AccuracyBudget::default(),
            policy: SpectrumPolicy::default(),
            extra_tail_terms: Vec::new(),
            fit_window: DEFAULT_FIT_WINDOW,
        }
    }
}

impl ZetaOptions {
    pub fn with_tolerance(tol: f64) -> Result<Self> {
        Ok(Self {
            budget: AccuracyBudget::absolute(tol)?,
            ..Self::default()
        })
    }

    pub fn policy(mut self, policy: SpectrumPolicy) -> Self {
        self.policy = policy;
        self
    }
}

/// `ζ(s) = res2/(s−s₀)² + res1/(s−s₀) + res0 + O(s−s₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaurentData {
    pub center: f64,
    pub res2: f64,
    pub res1: f64,
    pub res0: f64,
}

/// One explicit pole term of the continuation, `weight / (p − s)^order`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleTerm {
    pub location: f64,
    pub order: u32,
    pub weight: f64,
}

impl PoleTerm {
    pub fn eval(&self, s: f64) -> f64 {
        self.weight / (self.location - s).powi(self.order as i32)
    }

    /// Coefficient of `(s − p)^{−order}`.
    pub fn laurent_coefficient(&self) -> f64 {
        if self.order.is_multiple_of(2) {
            self.weight
        } else {
            -self.weight
        }
    }
}

/// A named quadrature result kept for diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralRecord {
    pub name: String,
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl IntegralRecord {
    fn new(name: impl Into<String>, e: &Estimate<f64>) -> Self {
        Self {
            name: name.into(),
            value: e.value,
            error: e.error,
            evaluations: e.evaluations,
        }
    }
}

/// A value assembled from explicit terms and quadratures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assembled {
    pub value: f64,
    /// Sum of the quadrature error estimates.
    pub error: f64,
    pub integrals: Vec<IntegralRecord>,
}

/// Laurent data together with the quadratures behind `res0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaurentEstimate {
    pub data: LaurentData,
    pub error: f64,
    pub integrals: Vec<IntegralRecord>,
}

/// Residua of `ζ(s; L, L₀)` at `s = 0` for `L = −∂ᵤ² + A` on `S¹_{β/2π} × W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residua {
    /// Coefficient of `s^{−1}` in `ζ(s; L, L₀)`.
    pub res1: f64,
    /// Finite part of `ζ(s; L, L₀)`.
    pub res0: f64,
    /// Finite part of `ζ′(s; L, L₀)`.
    pub res0_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionDiagnostics {
    pub laurent: LaurentData,
    pub integrals: Vec<IntegralRecord>,
    /// Sum of all quadrature error estimates.
    pub error: f64,
    pub sign_resolution: SignResolution,
    pub policy: SpectrumPolicy,
    /// Negative eigenvalues excluded under [`SpectrumPolicy::ContinuousPartOnly`].
    pub excluded_bound_states: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionResult {
    pub beta: f64,
    pub ell: f64,
    #[serde(rename = "res1_zeta_L")]
    pub res1_zeta_l: f64,
    #[serde(rename = "res0_zeta_L")]
    pub res0_zeta_l: f64,
    #[serde(rename = "res0_zeta_prime_L")]
    pub res0_zeta_prime_l: f64,
    pub log_eta: f64,
    #[serde(rename = "log_ZR")]
    pub log_zr: f64,
    pub diagnostics: PartitionDiagnostics,
}

/// `log Z_R = ½ Res₀ζ′ − ½ Res₀ζ · log ℓ²`.
pub fn log_zr_from(res0: f64, res0_prime: f64, ell: f64) -> f64 {
    0.5 * res0_prime - 0.5 * res0 * (ell * ell).ln()
}

/// Numerical Laurent fit of [`RelativeZeta::zeta_continued`] on a ring.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaurentFit {
    pub data: LaurentData,
    /// All fitted coefficients, lowest power (`−2`) first.
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

/// The engine: a model, its oriented spectral coefficients and options.
#[derive(Debug, Clone)]
pub struct RelativeZeta {
    model: RelativeModel,
    coefficients: ResolvedCoefficients,
    options: ZetaOptions,
    bound_states: Vec<f64>,
}

impl RelativeZeta {
    /// Applies the spectrum policy and resolves the coefficient orientation.
    pub fn new(model: RelativeModel, options: ZetaOptions) -> Result<Self> {
        let coefficients = resolve_coefficients(&model, options.fit_window)?;
        Self::with_coefficients(model, coefficients, options)
    }

    /// Uses externally resolved coefficients (fault injection, reuse).
    pub fn with_coefficients(
        model: RelativeModel,
        coefficients: ResolvedCoefficients,
        options: ZetaOptions,
    ) -> Result<Self> {
        options.budget.validate()?;
        let bound_states = model.point_spectrum()?;
        if options.policy == SpectrumPolicy::RequireContinuous {
            if let Some(&energy) = bound_states.first() {
                return Err(Error::BoundStateRegion { energy });
            }
        }
        if model.small().regime != ExpansionRegime::Small {
            return Err(Error::InvalidModel("small-λ expansion expected".into()));
        }
        Ok(Self {
            model,
            coefficients,
            options,
            bound_states,
        })
    }

    pub fn model(&self) -> &RelativeModel {
        &self.model
    }

    pub fn coefficients(&self) -> &ResolvedCoefficients {
        &self.coefficients
    }

    pub fn options(&self) -> &ZetaOptions {
        &self.options
    }

    pub fn bound_states(&self) -> &[f64] {
        &self.bound_states
    }

    fn budget(&self) -> &AccuracyBudget {
        &self.options.budget
    }

    // Terms up to and including the first with β > −3/2.
    fn small_subtraction(&self) -> Vec<SmallVTerm> {
        let mut out = Vec::new();
        for t in &self.coefficients.oriented.small_v {
            out.push(*t);
            if t.beta > -1.5 {
                break;
            }
        }
        out
    }

    fn large_subtraction(&self, s: f64) -> Vec<LargeVTerm> {
        let mut out: Vec<LargeVTerm> = self
            .coefficients
            .oriented
            .large_v
            .iter()
            .filter(|t| subtracted_at(t, s))
            .copied()
            .chain(self.options.extra_tail_terms.iter().copied())
            .collect();
        out.sort_by(|a, b| b.alpha.total_cmp(&a.alpha).then(b.h.cmp(&a.h)));
        out
    }

    /// The explicit pole terms of the continuation as assembled at `s`.
    pub fn pole_terms(&self, s: f64) -> Vec<PoleTerm> {
        let mut poles = Vec::new();
        for t in self.small_subtraction() {
            if t.c != 0.0 {
                poles.push(PoleTerm {
                    location: t.beta + 1.0,
                    order: 1,
                    weight: 0.5 * t.c,
                });
            }
        }
        for t in self.large_subtraction(s) {
            if t.e != 0.0 {
                let h = t.h as i32;
                let fact: f64 = (1..=t.h).map(f64::from).product();
                let sign = if (h + 1) % 2 == 0 { 1.0 } else { -1.0 };
                poles.push(PoleTerm {
                    location: t.alpha + 1.0,
                    order: t.h + 1,
                    weight: fact * sign * t.e / 2f64.powi(h + 1),
                });
            }
        }
        poles
    }

    // Exponent (in v) of the leading unsubtracted small-v behaviour of e.
    fn small_remainder_exponent(&self) -> Option<f64> {
        let n = self.small_subtraction().len();
        let small = self.model.small();
        small
            .terms
            .get(n)
            .map(|t| 2.0 * t.exponent + 1.0)
            .or_else(|| small.remainder.map(|(q, _)| 2.0 * q + 1.0))
    }

    // (α, log power) of the leading unsubtracted large-v behaviour of e.
    fn large_remainder(&self, s: f64) -> Option<(f64, u32)> {
        self.coefficients
            .oriented
            .large_v
            .iter()
            .find(|t| !subtracted_at(t, s) && t.e != 0.0)
            .map(|t| (t.alpha, t.h))
            .or(self.model.large().remainder)
    }

    fn check_strip(&self, s: f64) -> Result<()> {
        if !s.is_finite() {
            return Err(Error::InvalidInput(format!("s = {s} is not finite")));
        }
        if let Some(p) = self.small_remainder_exponent() {
            if !(p - 2.0 * s > -1.0) {
                return Err(Error::OutOfRange {
                    what: "s",
                    detail: format!(
                        "s = {s}: the subtracted integral over (0, 1) needs more small-v terms \
                         (residual ~ v^{p})"
                    ),
                });
            }
        }
        if let Some((alpha, _)) = self.large_remainder(s) {
            if !(alpha < s - 1.0) {
                return Err(Error::OutOfRange {
                    what: "s",
                    detail: format!(
                        "s = {s}: the subtracted integral over (1, ∞) needs more large-v terms \
                         (residual ~ v^{})",
                        2.0 * alpha + 1.0
                    ),
                });
            }
        }
        Ok(())
    }

    fn check_poles(&self, s: f64, skip: Option<f64>) -> Result<()> {
        for p in self.pole_terms(s) {
            if Some(p.location) == skip {
                continue;
            }
            let distance = (s - p.location).abs();
            if distance < POLE_EXCLUSION {
                return Err(Error::PoleProximity {
                    s,
                    pole: p.location,
                    distance,
                });
            }
        }
        Ok(())
    }

    // ∫₀¹ v^{−2s}(e − Σ_{S₀}) dv and ∫₁^∞ v^{−2s}(e − Σ_{S∞}) dv.
    fn subtracted_integrals(&self, s: f64) -> Result<(Estimate<f64>, Estimate<f64>)> {
        let small = self.small_subtraction();
        let large = self.large_subtraction(s);
        let model = &self.model;
        let budget = self.budget().scaled(0.5);
        let near = || -> Result<Estimate<f64>> {
            let f = Integrand::new(|v: f64| {
                let sub: f64 = small.iter().map(|t| t.c * v.powf(t.v_exponent)).sum();
                Ok(v.powf(-2.0 * s) * (model.spectral_density(v)? - sub))
            });
            let f = match self.small_remainder_exponent() {
                Some(p) if p - 2.0 * s < 0.0 => {
                    f.with_singularity(Singularity::Algebraic(p - 2.0 * s))?
                }
                _ => f,
            };
            integrate_finite(&f, 0.0, 1.0, &budget)
        };
        let far = || -> Result<Estimate<f64>> {
            let f = Integrand::new(|v: f64| {
                let lv = v.ln();
                let sub: f64 = large
                    .iter()
                    .map(|t| t.e * v.powf(t.v_exponent) * lv.powi(t.h as i32))
                    .sum();
                Ok(v.powf(-2.0 * s) * (model.spectral_density(v)? - sub))
            });
            let rem = self
                .large_remainder(s)
                .map(|(alpha, h)| (2.0 * alpha + 1.0 - 2.0 * s, h));
            integrate_tail(&f, 1.0, &TailModel::new(Vec::new(), rem)?, &budget)
        };
        let (a, b) = rayon::join(near, far);
        Ok((a?, b?))
    }

    /// The meromorphic continuation at a real `s` away from its poles.
    pub fn zeta_continued(&self, s: f64) -> Result<Assembled> {
        self.check_strip(s)?;
        self.check_poles(s, None)?;
        let (near, far) = self.subtracted_integrals(s)?;
        let poles: f64 = self.pole_terms(s).iter().map(|p| p.eval(s)).sum();
        Ok(Assembled {
            value: poles + near.value + far.value,
            error: near.error + far.error,
            integrals: vec![
                IntegralRecord::new("near", &near),
                IntegralRecord::new("far", &far),
            ],
        })
    }

    /// Laurent data at `s₀ = −½`: double- and simple-pole coefficients from
    /// the pole terms located there, the finite part from everything else.
    pub fn laurent_at_minus_half(&self) -> Result<LaurentEstimate> {
        self.laurent_at(-0.5)
    }

    pub fn laurent_at(&self, center: f64) -> Result<LaurentEstimate> {
        self.check_strip(center)?;
        self.check_poles(center, Some(center))?;
        let (mut res2, mut res1, mut regular) = (0.0, 0.0, 0.0);
        for p in self.pole_terms(center) {
            if p.location == center {
                match p.order {
                    1 => res1 += p.laurent_coefficient(),
                    2 => res2 += p.laurent_coefficient(),
                    n => {
                        return Err(Error::Unsupported(format!(
                            "pole of order {n} at s = {center}"
                        )))
                    }
                }
            } else {
                regular += p.eval(center);
            }
        }
        let (near, far) = self.subtracted_integrals(center)?;
        Ok(LaurentEstimate {
            data: LaurentData {
                center,
                res2,
                res1,
                res0: regular + near.value + far.value,
            },
            error: near.error + far.error,
            integrals: vec![
                IntegralRecord::new("near", &near),
                IntegralRecord::new("far", &far),
            ],
        })
    }

    /// Fits `Σ_{k=−2}^{2n−3} c_k (s − s₀)^k` to the continuation at
    /// `s₀ ± δ` for each of the `n` radii.
    pub fn laurent_ring_fit(&self, center: f64, radii: &[f64]) -> Result<LaurentFit> {
        if radii.is_empty() || radii.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::InvalidInput("ring radii must be positive".into()));
        }
        let points: Vec<f64> = radii.iter().flat_map(|d| [center - d, center + d]).collect();
        let values: Vec<f64> = points
            .iter()
            .map(|&s| Ok(self.zeta_continued(s)?.value))
            .collect::<Result<_>>()?;
        let powers: Vec<i32> = (-2..(2 * radii.len() as i32 - 2)).collect();
        let columns: Vec<Vec<f64>> = powers
            .iter()
            .map(|&k| points.iter().map(|s| (s - center).powi(k)).collect())
            .collect();
        let fit = least_squares_with_limit(&columns, &values, 1e15)?;
        Ok(LaurentFit {
            data: LaurentData {
                center,
                res2: fit.coefficients[0],
                res1: fit.coefficients[1],
                res0: fit.coefficients[2],
            },
            coefficients: fit.coefficients,
            residual: fit.residual,
        })
    }

    /// `log η(τ) = ∫₀^∞ log(1 − e^{−τv}) e(v) dv`.
    pub fn log_eta(&self, tau: f64) -> Result<Estimate<f64>> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidInput(format!("tau = {tau} must be positive")));
        }
        let model = &self.model;
        let f = move |v: f64| -> Result<f64> {
            let x = tau * v;
            let weight = if x < 1.0 { (-(-x).exp_m1()).ln() } else { (-(-x).exp()).ln_1p() };
            if weight == 0.0 {
                return Ok(0.0);
            }
            Ok(weight * model.spectral_density(v)?)
        };
        let budget = self.budget().scaled(0.5);
        let near = Integrand::new(f).with_singularity(Singularity::LogLeft)?;
        let far = Integrand::new(f);
        // log(1 − e^{−x}) underflows to zero beyond x ≈ 745
        let end = (750.0 / tau).max(1.0);
        let (a, b) = rayon::join(
            || integrate_finite(&near, 0.0, 1.0, &budget),
            || {
                if end > 1.0 {
                    integrate_finite(&far, 1.0, end, &budget)
                } else {
                    Ok(Estimate { value: 0.0, error: 0.0, evaluations: 0 })
                }
            },
        );
        let (a, b) = (a?, b?);
        Ok(Estimate {
            value: a.value + b.value,
            error: a.error + b.error,
            evaluations: a.evaluations + b.evaluations,
        })
    }

    /// `Tr(e^{−tA} − e^{−tA₀})` restricted to the continuous spectrum,
    /// `∫₀^∞ e^{−v²t} e(v) dv`.
    pub fn heat_trace(&self, t: f64) -> Result<Estimate<f64>> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidInput(format!("t = {t} must be positive")));
        }
        let model = &self.model;
        let f = Integrand::new(move |v: f64| {
            let w = (-v * v * t).exp();
            if w == 0.0 {
                return Ok(0.0);
            }
            Ok(w * model.spectral_density(v)?)
        });
        let budget = self.budget().scaled(0.5);
        let end = (750.0 / t).sqrt();
        let split = end.min(1.0);
        let (a, b) = rayon::join(
            || integrate_finite(&f, 0.0, split, &budget),
            || integrate_finite(&f, split, end.max(split), &budget),
        );
        let (a, b) = (a?, b?);
        Ok(Estimate {
            value: a.value + b.value,
            error: a.error + b.error,
            evaluations: a.evaluations + b.evaluations,
        })
    }

    /// Residua at `s = 0` on `S¹_{β/2π} × W` from the Laurent data at `−½`
    /// and `log η(β)`.
    pub fn residua_l(&self, beta: f64) -> Result<(Residua, LaurentEstimate, Estimate<f64>)> {
        check_beta(beta)?;
        let (laurent, eta) = rayon::join(|| self.laurent_at_minus_half(), || self.log_eta(beta));
        let (laurent, eta) = (laurent?, eta?);
        Ok((residua_from_laurent(&laurent.data, beta, eta.value), laurent, eta))
    }

    /// `log Z_R` together with the quantities it is assembled from.
    pub fn log_partition(&self, beta: f64, ell: f64) -> Result<PartitionResult> {
        if !(ell > 0.0) || !ell.is_finite() {
            return Err(Error::InvalidInput(format!("ell = {ell} must be positive")));
        }
        let (res, laurent, eta) = self.residua_l(beta)?;
        let mut integrals = laurent.integrals.clone();
        integrals.push(IntegralRecord::new("log_eta", &eta));
        Ok(PartitionResult {
            beta,
            ell,
            res1_zeta_l: res.res1,
            res0_zeta_l: res.res0,
            res0_zeta_prime_l: res.res0_prime,
            log_eta: eta.value,
            log_zr: log_zr_from(res.res0, res.res0_prime, ell),
            diagnostics: PartitionDiagnostics {
                laurent: laurent.data,
                error: laurent.error + eta.error,
                integrals,
                sign_resolution: self.coefficients.sign.clone(),
                policy: self.options.policy,
                excluded_bound_states: self.bound_states.clone(),
            },
        })
    }
}

fn subtracted_at(t: &LargeVTerm, s: f64) -> bool {
    t.alpha >= TAIL_SUBTRACTION_FLOOR || t.v_exponent - 2.0 * s >= DEEP_SUBTRACTION_DECAY
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidInput(format!("beta = {beta} must be positive")));
    }
    Ok(())
}

/// Maps Laurent data of `ζ(s; A, A₀)` at `−½` to the residua of
/// `ζ(s; L, L₀)` at `0`.
pub fn residua_from_laurent(l: &LaurentData, beta: f64, log_eta: f64) -> Residua {
    let c = 1.0 - LN_2;
    // `+ 0.0` turns the −0 of vanishing data into +0
    Residua {
        res1: -beta * l.res2 + 0.0,
        res0: -beta * l.res1 - 2.0 * beta * c * l.res2 + 0.0,
        res0_prime: -beta * l.res0
            - 2.0 * beta * c * l.res1
            - beta * (2.0 + PI * PI / 6.0 + 2.0 * c * c) * l.res2
            - 2.0 * log_eta
            + 0.0,
    }
}

/// `8πα − 2Cγ + 4γ + γ log(γ²/4)`, the bracket that recurs in the Coulomb
/// closed forms (zero `γ log γ` at `γ = 0`).
fn coulomb_bracket(p: &ModelParams) -> f64 {
    let g = p.gamma;
    let log_term = if g == 0.0 { 0.0 } else { g * (g * g / 4.0).ln() };
    8.0 * PI * p.alpha - 2.0 * EULER_GAMMA * g + 4.0 * g + log_term
}

/// Coulomb plus point interaction: `e_{3,1} = −γ/π`.
pub fn coulomb_e31(p: &ModelParams) -> f64 {
    -p.gamma / PI
}

/// Coulomb plus point interaction: `e_{3,0} = (8πα − 2Cγ + 4γ + γ log(γ²/4))/(2π)`.
pub fn coulomb_e30(p: &ModelParams) -> f64 {
    coulomb_bracket(p) / (2.0 * PI)
}

/// Closed-form residua for the Coulomb plus point interaction, given the
/// regularized integral `∫₀¹ v e + ∫₁^∞ v(e − e₃₁ v⁻² log v − e₃₀ v⁻²)` and
/// `log η(β)`.
pub fn coulomb_residua(p: &ModelParams, beta: f64, regular: f64, log_eta: f64) -> Residua {
    let g = p.gamma;
    let c = 1.0 - LN_2;
    let bracket = coulomb_bracket(p);
    Residua {
        res1: g * beta / (4.0 * PI),
        res0: -bracket * beta / (4.0 * PI) + c * g * beta / (2.0 * PI),
        res0_prime: -regular * beta - c * bracket * beta / (2.0 * PI)
            + (2.0 + PI * PI / 6.0 + 2.0 * c * c) * g * beta / (4.0 * PI)
            - 2.0 * log_eta
            + 0.0,
    }
}

/// Closed-form `log Z_R` for the Coulomb plus point interaction.
pub fn coulomb_log_zr(p: &ModelParams, beta: f64, ell: f64, regular: f64, log_eta: f64) -> f64 {
    let g = p.gamma;
    let c = 1.0 - LN_2;
    let log_g2 = if g == 0.0 { 0.0 } else { g * (g / 2.0).ln() };
    -0.5 * regular * beta - c * coulomb_bracket(p) * beta / (4.0 * PI)
        + (2.0 + PI * PI / 6.0 + 2.0 * c * c) * g * beta / (8.0 * PI)
        - log_eta
        + (4.0 * PI * p.alpha - EULER_GAMMA * g + 2.0 * g + log_g2 - g + g * LN_2) * beta
            / (2.0 * PI)
            * ell.ln()
}

/// The regularized integral of the Coulomb closed forms, computed directly
/// from `e(v)` with the closed-form `e₃₁`, `e₃₀`.
pub fn coulomb_regular_integral(
    model: &RelativeModel,
    p: &ModelParams,
    budget: &AccuracyBudget,
) -> Result<Assembled> {
    let (e31, e30) = (coulomb_e31(p), coulomb_e30(p));
    let b = budget.scaled(0.5);
    let near = Integrand::new(|v: f64| Ok(v * model.spectral_density(v)?));
    let far = Integrand::new(|v: f64| {
        Ok(v * (model.spectral_density(v)? - (e31 * v.ln() + e30) / (v * v)))
    });
    let rem = if p.gamma == 0.0 { (-2.0, 0) } else { (-2.0, 2) };
    let (a, c) = rayon::join(
        || integrate_finite(&near, 0.0, 1.0, &b),
        || integrate_tail(&far, 1.0, &TailModel::new(Vec::new(), Some(rem))?, &b),
    );
    let (a, c) = (a?, c?);
    Ok(Assembled {
        value: a.value + c.value,
        error: a.error + c.error,
        integrals: vec![IntegralRecord::new("near", &a), IntegralRecord::new("far", &c)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CoulombDelta, Expansion};

    const I_REG: f64 = -1.064_607_049_127_158_2;
    const LOG_ETA_1: f64 = 0.102_045_718_941_398_12;

    fn coulomb(g: f64, a: f64) -> RelativeModel {
        CoulombDelta::relative_model(ModelParams::new(g, a).unwrap()).unwrap()
    }

    fn engine(g: f64, a: f64) -> RelativeZeta {
        let opts = ZetaOptions::default().policy(SpectrumPolicy::ContinuousPartOnly);
        RelativeZeta::new(coulomb(g, a), opts).unwrap()
    }

    fn synthetic(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> RelativeZeta {
        let m = RelativeModel::from_density(
            "synthetic",
            move |v| Ok(f(v)),
            Expansion::empty(ExpansionRegime::Small),
            Expansion::empty(ExpansionRegime::Large),
        )
        .unwrap();
        RelativeZeta::new(m, ZetaOptions::default()).unwrap()
    }

    #[test]
    fn bound_state_policy() {
        let m = coulomb(1.0, 0.0);
        let r = RelativeZeta::new(m.clone(), ZetaOptions::default());
        match r {
            Err(Error::BoundStateRegion { energy }) => {
                assert!((energy + 0.530_589_870_755_905).abs() < 1e-10)
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        let z = engine(1.0, 0.0);
        assert_eq!(z.bound_states().len(), 1);
        assert!(RelativeZeta::new(coulomb(1.0, 1.0), ZetaOptions::default()).is_ok());
    }

    #[test]
    fn zero_model_is_zero() {
        let z = RelativeZeta::new(RelativeModel::zero(), ZetaOptions::default()).unwrap();
        for s in [-0.9, -0.5, -0.1] {
            assert_eq!(z.zeta_continued(s).unwrap().value, 0.0);
        }
        assert_eq!(z.log_eta(1.0).unwrap().value, 0.0);
        assert_eq!(z.heat_trace(1.0).unwrap().value, 0.0);
    }

    #[test]
    fn indicator_ramp() {
        let z = synthetic(|v| if v <= 1.0 { v } else { 0.0 });
        for s in [-0.9, -0.5, -0.25, -0.1] {
            let got = z.zeta_continued(s).unwrap().value;
            assert!((got - 1.0 / (2.0 - 2.0 * s)).abs() < 1e-10, "{s}: {got}");
        }
    }

    #[test]
    fn coulomb_laurent_data() {
        let z = engine(1.0, 0.0);
        let l = z.laurent_at_minus_half().unwrap().data;
        assert!((l.res2 + 1.0 / (4.0 * PI)).abs() < 1e-12);
        let e30 = coulomb_e30(&ModelParams::new(1.0, 0.0).unwrap());
        assert!((l.res1 - e30 / 2.0).abs() < 1e-12);
        assert!((l.res0 - I_REG).abs() < 1e-8, "{}", l.res0);
        let zero = engine(0.0, 1.0).laurent_at_minus_half().unwrap().data;
        assert_eq!(zero.res2, 0.0);
    }

    #[test]
    fn eta_and_partition_reference() {
        let z = engine(1.0, 0.0);
        let eta = z.log_eta(1.0).unwrap();
        assert!((eta.value - LOG_ETA_1).abs() < 1e-9, "{}", eta.value);
        let p = z.log_partition(1.0, 1.0).unwrap();
        assert!((p.res1_zeta_l - 1.0 / (4.0 * PI)).abs() < 1e-14);
        assert!((p.res0_zeta_l + 0.067_288_216_792_741_35).abs() < 1e-12);
        assert!((p.res0_zeta_prime_l - 1.094_289_275_132_214_7).abs() < 2e-8);
        assert!((p.log_zr - 0.547_144_637_566_107_4).abs() < 1e-8, "{}", p.log_zr);
    }

    #[test]
    fn synthetic_eta_matches_series() {
        // e(v) = v e^{−v}: log η(τ) = −Σ 1/(n(τn + 1)²)
        let z = synthetic(|v| v * (-v).exp());
        for tau in [0.5, 1.0, 20.0] {
            let exact: f64 = -(1..200_000)
                .map(|n| {
                    let n = n as f64;
                    1.0 / (n * (tau * n + 1.0).powi(2))
                })
                .sum::<f64>();
            let got = z.log_eta(tau).unwrap().value;
            assert!((got - exact).abs() < 1e-9, "{tau}: {got} vs {exact}");
        }
    }

    #[test]
    fn heat_trace_values() {
        let z = engine(1.0, 0.0);
        for (t, want) in [
            (0.5, -0.115_732_259_442_511_45),
            (1.0, -0.069_297_627_656_632_78),
            (2.0, -0.034_252_516_879_332_74),
        ] {
            let got = z.heat_trace(t).unwrap().value;
            assert!((got - want).abs() < 1e-9, "{t}: {got}");
        }
        let h1 = z.heat_trace(1.0).unwrap().value;
        let h50 = z.heat_trace(50.0).unwrap().value;
        assert!(h50.abs() < 1e-3 * h1.abs());
    }

    #[test]
    fn pole_proximity_and_strip() {
        let z = engine(1.0, 0.0);
        assert!(matches!(
            z.zeta_continued(-0.5 + 1e-7),
            Err(Error::PoleProximity { .. })
        ));
        assert!(matches!(z.zeta_continued(-2.5), Err(Error::OutOfRange { .. })));
        assert!(z.zeta_continued(-0.95).is_ok());
    }

    #[test]
    fn extra_subtraction_is_compensated() {
        let base = engine(0.5, 0.2);
        let mut opts = base.options().clone();
        opts.extra_tail_terms.push(LargeVTerm {
            alpha: -2.5,
            v_exponent: -4.0,
            h: 0,
            e: 0.75,
        });
        let extra =
            RelativeZeta::with_coefficients(base.model().clone(), base.coefficients().clone(), opts)
                .unwrap();
        for s in [-0.7, -0.25] {
            let a = base.zeta_continued(s).unwrap().value;
            let b = extra.zeta_continued(s).unwrap().value;
            assert!((a - b).abs() < 1e-9, "{s}: {a} vs {b}");
        }
    }

    #[test]
    fn generic_and_closed_form_residua_agree() {
        for (g, a) in [(1.0, 0.0), (0.5, 0.2), (0.0, 1.0)] {
            let z = engine(g, a);
            let p = ModelParams::new(g, a).unwrap();
            let (r, laurent, eta) = z.residua_l(2.0).unwrap();
            let closed = coulomb_residua(&p, 2.0, laurent.data.res0, eta.value);
            assert!((r.res1 - closed.res1).abs() < 1e-12);
            assert!((r.res0 - closed.res0).abs() < 1e-12);
            assert!((r.res0_prime - closed.res0_prime).abs() < 1e-12);
        }
    }
}
