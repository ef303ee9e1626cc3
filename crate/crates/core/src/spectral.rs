//! The relative spectral measure
//!
//! ```text
//! e(v) = (v/πi) [r(κ = iv) − r(κ = −iv)],   v > 0,
//! ```
//!
//! its asymptotic coefficients, and least-squares fits of its large-`v` tail.
//!
//! The general coefficient formulas
//!
//! ```text
//! c_j       = −2 b_j sin(πβ_j)/π
//! e_{j,k,h} = −a_{j,k} (πi)^{k−h−1} C(k,h) (e^{iα_jπ} − (−1)^{k−h} e^{−iα_jπ})
//! ```
//!
//! are implemented as written ("printed orientation"). Evaluating `e(v)`
//! directly gives the opposite overall sign, so every consumer goes through
//! [`resolve_coefficients`], which measures the orientation with a tail fit
//! and records the outcome in a [`SignResolution`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{least_squares_with_limit, log_grid};
use crate::model::{Expansion, ExpansionRegime};
use crate::relative::RelativeModel;

/// Largest disagreement tolerated between the two-sided and the
/// symmetry-reduced evaluation of `e(v)`, relative to `v·|r(iv)|`.
pub const BRANCH_GUARD: f64 = 1e-10;

/// Default grid for spectral tables.
pub const DEFAULT_GRID: (f64, f64, usize) = (1e-3, 1e4, 400);

/// Default window of the tail fits.
pub const DEFAULT_FIT_WINDOW: (f64, f64) = (1e2, 1e4);

/// Sample count of the tail fits.
pub const FIT_POINTS: usize = 121;

/// Highest power `n` of the `v^{−n} log^m v` correction columns in tail fits.
pub const NUISANCE_ORDER: u32 = 4;

/// Condition ceiling for tail fits. The correction columns are nearly
/// collinear on a two-decade window, but only the leading coefficients are
/// reported and those stay accurate to ~1e−8 well past 1e14.
pub const FIT_MAX_CONDITION: f64 = 1e15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSample {
    pub v: f64,
    pub e: f64,
}

/// `e(v)` through the model's own (symmetry-reduced) evaluator.
pub fn spectral_measure(model: &RelativeModel, v: f64) -> Result<f64> {
    model.spectral_density(v)
}

/// `e(v)` straight from the definition, evaluating `r` at both `κ = ±iv`.
pub fn spectral_measure_two_sided(model: &RelativeModel, v: f64) -> Result<f64> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("spectral variable v = {v} must be positive")));
    }
    let above = model.trace(Complex64::new(0.0, v))?;
    let below = model.trace(Complex64::new(0.0, -v))?;
    let jump = (above - below) * v / Complex64::new(0.0, PI);
    Ok(jump.re)
}

/// `e(v)` with the branch guard: the two-sided and reduced evaluations must
/// agree to [`BRANCH_GUARD`].
pub fn spectral_measure_checked(model: &RelativeModel, v: f64) -> Result<f64> {
    let reduced = spectral_measure(model, v)?;
    let two_sided = spectral_measure_two_sided(model, v)?;
    let scale = v * model.trace(Complex64::new(0.0, v))?.norm();
    if (reduced - two_sided).abs() > BRANCH_GUARD * scale.max(reduced.abs()) {
        return Err(Error::BranchMismatch {
            v,
            two_sided,
            reduced,
        });
    }
    Ok(reduced)
}

/// `e` on `points` log-spaced values in `[v_min, v_max]`, in grid order.
/// Failed points keep their error so callers can emit sentinels.
pub fn tabulate(
    model: &RelativeModel,
    v_min: f64,
    v_max: f64,
    points: usize,
) -> Result<Vec<(f64, Result<f64>)>> {
    if !(v_min > 0.0) || !(v_max > v_min) || !v_max.is_finite() || points < 2 {
        return Err(Error::InvalidInput(format!(
            "grid needs 0 < v_min < v_max and at least 2 points \
             (v_min = {v_min}, v_max = {v_max}, points = {points})"
        )));
    }
    let grid = log_grid(v_min, v_max, points);
    Ok(grid
        .par_iter()
        .map(|&v| (v, spectral_measure(model, v)))
        .collect())
}

/// Small-`v` term `c · v^{2β+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallVTerm {
    pub beta: f64,
    pub v_exponent: f64,
    pub c: f64,
}

/// One `e_{j,k,h}`: coefficient of `v^{2α_j+1} log^h v²` from `a_{j,k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RawLargeVTerm {
    pub alpha: f64,
    pub k: u32,
    pub h: u32,
    pub e: f64,
}

/// Aggregated `e_{j,h}`: coefficient of `v^{2α_j+1} log^h v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargeVTerm {
    pub alpha: f64,
    pub v_exponent: f64,
    pub h: u32,
    pub e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralCoefficients {
    pub small_v: Vec<SmallVTerm>,
    pub large_v: Vec<LargeVTerm>,
    pub raw_large_v: Vec<RawLargeVTerm>,
}

impl SpectralCoefficients {
    /// Every coefficient multiplied by `sign`.
    pub fn oriented(&self, sign: f64) -> Self {
        Self {
            small_v: self
                .small_v
                .iter()
                .map(|t| SmallVTerm { c: sign * t.c, ..*t })
                .collect(),
            large_v: self
                .large_v
                .iter()
                .map(|t| LargeVTerm { e: sign * t.e, ..*t })
                .collect(),
            raw_large_v: self
                .raw_large_v
                .iter()
                .map(|t| RawLargeVTerm { e: sign * t.e, ..*t })
                .collect(),
        }
    }

    /// `e_{j,h}` for the given `α_j` and `h`, zero when absent.
    pub fn large(&self, alpha: f64, h: u32) -> f64 {
        self.large_v
            .iter()
            .filter(|t| t.alpha == alpha && t.h == h)
            .map(|t| t.e)
            .sum()
    }

    /// `c_j` for the given `β_j`, zero when absent.
    pub fn small(&self, beta: f64) -> f64 {
        self.small_v
            .iter()
            .filter(|t| t.beta == beta)
            .map(|t| t.c)
            .sum()
    }
}

/// `sin(πx)` with exact zeros at integers and exact `±1` at half-integers.
fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        0.0
    } else if r == 0.5 {
        1.0
    } else if r == 1.5 {
        -1.0
    } else {
        (PI * r).sin()
    }
}

fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `c_j = −2 b_j sin(πβ_j)/π` in printed orientation.
pub fn small_v_coefficients(small: &Expansion) -> Result<Vec<SmallVTerm>> {
    if small.regime != ExpansionRegime::Small {
        return Err(Error::InvalidInput("expected a small-λ expansion".into()));
    }
    Ok(small
        .terms
        .iter()
        .map(|t| SmallVTerm {
            beta: t.exponent,
            v_exponent: 2.0 * t.exponent + 1.0,
            c: -2.0 * t.coefficient * sin_pi(t.exponent) / PI,
        })
        .collect())
}

/// Raw `e_{j,k,h}` in printed orientation.
pub fn raw_large_v_coefficients(large: &Expansion) -> Result<Vec<RawLargeVTerm>> {
    if large.regime != ExpansionRegime::Large {
        return Err(Error::InvalidInput("expected a large-λ expansion".into()));
    }
    let mut out = Vec::new();
    for t in &large.terms {
        let (alpha, k) = (t.exponent, t.log_power);
        let phase = Complex64::new(cos_pi(alpha), sin_pi(alpha));
        for h in (0..=k).rev() {
            let sign = if (k - h) % 2 == 0 { 1.0 } else { -1.0 };
            let bracket = phase - phase.conj() * sign;
            let pi_i = Complex64::new(0.0, PI).powi(k as i32 - h as i32 - 1);
            let e = -t.coefficient * binomial(k, h) * pi_i * bracket;
            debug_assert!(e.im.abs() <= 1e-12 * e.norm().max(1e-300));
            out.push(RawLargeVTerm { alpha, k, h, e: e.re });
        }
    }
    Ok(out)
}

/// `e_{j,h} = 2^h Σ_{k≥h} e_{j,k,h}` (from `log v² = 2 log v`), ordered by
/// decreasing `α_j` and then decreasing `h`.
pub fn aggregate(raw: &[RawLargeVTerm]) -> Vec<LargeVTerm> {
    let mut out: Vec<LargeVTerm> = Vec::new();
    for r in raw {
        let scale = 2f64.powi(r.h as i32);
        match out.iter_mut().find(|t| t.alpha == r.alpha && t.h == r.h) {
            Some(t) => t.e += scale * r.e,
            None => out.push(LargeVTerm {
                alpha: r.alpha,
                v_exponent: 2.0 * r.alpha + 1.0,
                h: r.h,
                e: scale * r.e,
            }),
        }
    }
    out.sort_by(|a, b| b.alpha.total_cmp(&a.alpha).then(b.h.cmp(&a.h)));
    out
}

/// Aggregated `e_{j,h}` in printed orientation.
pub fn large_v_coefficients(large: &Expansion) -> Result<Vec<LargeVTerm>> {
    Ok(aggregate(&raw_large_v_coefficients(large)?))
}

/// Printed-orientation coefficients of a model.
pub fn spectral_coefficients(model: &RelativeModel) -> Result<SpectralCoefficients> {
    let raw = raw_large_v_coefficients(model.large())?;
    Ok(SpectralCoefficients {
        small_v: small_v_coefficients(model.small())?,
        large_v: aggregate(&raw),
        raw_large_v: raw,
    })
}

/// Fit of `v^{−q} e(v)` against `Σ_{h≤H} c_h log^h v` plus decaying
/// corrections.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLogFit {
    /// `c_h` for `h = 0..=H`.
    pub coefficients: Vec<f64>,
    /// RMS residual of `v^{−q} e(v)` over the grid.
    pub residual: f64,
    pub condition: f64,
    pub points: usize,
}

/// Least-squares fit of `v^{−q} f(v)` on `[v_min, v_max]` against
/// `{log^h v}_{h≤H}` and nuisance columns `v^{−n} log^m v` for
/// `1 ≤ n ≤ nuisance_order`, `m ≤ n`, which absorb the next orders of
/// the expansion.
pub fn fit_power_log_tail(
    f: &(dyn Fn(f64) -> Result<f64> + Sync),
    q: f64,
    max_log: u32,
    v_min: f64,
    v_max: f64,
    points: usize,
    nuisance_order: u32,
) -> Result<PowerLogFit> {
    if !(v_min > 0.0) || !(v_max > v_min) {
        return Err(Error::InvalidInput(format!("fit window [{v_min}, {v_max}]")));
    }
    let grid = log_grid(v_min, v_max, points);
    let y: Vec<f64> = grid
        .par_iter()
        .map(|&v| Ok(f(v)? * v.powf(-q)))
        .collect::<Result<_>>()?;
    let logs: Vec<f64> = grid.iter().map(|v| v.ln()).collect();
    let scale = y.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    // smallest correction basis that explains the samples to rounding, so a
    // tail that lies exactly in the leading span is not blurred by the
    // nearly collinear correction columns
    let mut last = None;
    for order in 0..=nuisance_order {
        let mut columns: Vec<Vec<f64>> = (0..=max_log)
            .map(|h| logs.iter().map(|l| l.powi(h as i32)).collect())
            .collect();
        for n in 1..=order {
            for m in 0..=n {
                columns.push(
                    grid.iter()
                        .zip(&logs)
                        .map(|(v, l)| v.powi(-(n as i32)) * l.powi(m as i32))
                        .collect(),
                );
            }
        }
        let fit = least_squares_with_limit(&columns, &y, FIT_MAX_CONDITION)?;
        let exact = fit.residual <= 64.0 * f64::EPSILON * scale;
        last = Some(PowerLogFit {
            coefficients: fit.coefficients[..=max_log as usize].to_vec(),
            residual: fit.residual,
            condition: fit.condition,
            points,
        });
        if exact {
            break;
        }
    }
    Ok(last.expect("at least one fit order"))
}

/// Fitted leading tail `e(v) ≈ (e₃₁ log v + e₃₀)/v²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    pub e31: f64,
    pub e30: f64,
    pub residual: f64,
    pub v_min: f64,
    pub v_max: f64,
}

/// Fits `v² e(v)` against `{log v, 1}` (plus decaying corrections) on a
/// log-spaced grid in `[v_min, v_max]`.
pub fn fit_tail_coefficients(model: &RelativeModel, v_min: f64, v_max: f64) -> Result<TailFit> {
    if !(v_min >= 10.0) || !(v_max >= 10.0 * v_min) || !v_max.is_finite() {
        return Err(Error::InvalidInput(format!(
            "tail fit needs v_min ≥ 10 and v_max ≥ 10·v_min (got [{v_min}, {v_max}])"
        )));
    }
    let f = |v: f64| model.spectral_density(v);
    let fit = fit_power_log_tail(&f, -2.0, 1, v_min, v_max, FIT_POINTS, NUISANCE_ORDER)?;
    Ok(TailFit {
        e31: fit.coefficients[1],
        e30: fit.coefficients[0],
        residual: fit.residual,
        v_min,
        v_max,
    })
}

/// Where the orientation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignSource {
    /// Measured by fitting the numerically evaluated tail.
    Fit,
    /// All large-`v` coefficients vanish; the orientation of the direct
    /// branch-cut evaluation (−1 relative to the printed formulas) is used.
    Default,
}

/// Record of the orientation check between the printed coefficient formulas
/// and the numerically evaluated spectral measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignResolution {
    /// `+1` when the printed formulas match `e(v)`, `−1` when they are off by
    /// an overall sign.
    pub orientation: f64,
    pub source: SignSource,
    /// `α_j` of the term group used for the check.
    pub alpha: Option<f64>,
    /// Printed `e_{j,h}` of that group, `h = 0, 1, …`.
    pub printed: Vec<f64>,
    /// Fitted `e_{j,h}` of that group.
    pub fitted: Vec<f64>,
    /// Largest `| |fitted| − |printed| | / |printed|` over the group's
    /// non-zero entries.
    pub magnitude_mismatch: f64,
    /// True when the orientation differs from the printed formulas.
    pub discrepancy: bool,
}

/// Oriented coefficients with the record of how the orientation was found.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedCoefficients {
    pub printed: SpectralCoefficients,
    pub oriented: SpectralCoefficients,
    pub sign: SignResolution,
}

/// Orientation used when no large-`v` coefficient is available to measure it.
pub const DEFAULT_ORIENTATION: f64 = -1.0;

/// Applies the sign-resolution protocol: magnitudes from the closed forms,
/// overall sign from a fit of the leading non-vanishing tail group.
pub fn resolve_coefficients(
    model: &RelativeModel,
    window: (f64, f64),
) -> Result<ResolvedCoefficients> {
    let printed = spectral_coefficients(model)?;
    resolve_with(model, printed, window)
}

/// [`resolve_coefficients`] with externally supplied printed coefficients
/// (used for fault injection).
pub fn resolve_with(
    model: &RelativeModel,
    printed: SpectralCoefficients,
    window: (f64, f64),
) -> Result<ResolvedCoefficients> {
    let group = printed
        .large_v
        .iter()
        .find(|t| t.e != 0.0)
        .map(|t| t.alpha);
    let sign = match group {
        None => SignResolution {
            orientation: DEFAULT_ORIENTATION,
            source: SignSource::Default,
            alpha: None,
            printed: Vec::new(),
            fitted: Vec::new(),
            magnitude_mismatch: 0.0,
            discrepancy: true,
        },
        Some(alpha) => {
            let terms: Vec<&LargeVTerm> =
                printed.large_v.iter().filter(|t| t.alpha == alpha).collect();
            let max_h = terms.iter().map(|t| t.h).max().unwrap_or(0);
            let mut expected = vec![0.0; max_h as usize + 1];
            for t in &terms {
                expected[t.h as usize] += t.e;
            }
            let f = |v: f64| model.spectral_density(v);
            let fit = fit_power_log_tail(
                &f,
                2.0 * alpha + 1.0,
                max_h,
                window.0,
                window.1,
                FIT_POINTS,
                NUISANCE_ORDER,
            )?;
            let dot: f64 = fit
                .coefficients
                .iter()
                .zip(&expected)
                .map(|(a, b)| a * b)
                .sum();
            let orientation = if dot < 0.0 { -1.0 } else { 1.0 };
            let magnitude_mismatch = fit
                .coefficients
                .iter()
                .zip(&expected)
                .filter(|(_, e)| **e != 0.0)
                .map(|(a, e)| (a.abs() - e.abs()).abs() / e.abs())
                .fold(0.0, f64::max);
            SignResolution {
                orientation,
                source: SignSource::Fit,
                alpha: Some(alpha),
                printed: expected,
                fitted: fit.coefficients,
                magnitude_mismatch,
                discrepancy: orientation < 0.0,
            }
        }
    };
    Ok(ResolvedCoefficients {
        oriented: printed.oriented(sign.orientation),
        printed,
        sign,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CoulombDelta, ExpansionTerm, ModelParams};
    use crate::EULER_GAMMA;

    fn coulomb(g: f64, a: f64) -> RelativeModel {
        CoulombDelta::relative_model(ModelParams::new(g, a).unwrap()).unwrap()
    }

    #[test]
    fn zero_model_has_zero_measure() {
        let m = RelativeModel::zero();
        for v in [1e-3, 1.0, 1e4] {
            assert_eq!(spectral_measure_checked(&m, v).unwrap(), 0.0);
        }
    }

    #[test]
    fn small_v_examples() {
        let e = Expansion::small(
            vec![
                ExpansionTerm::new(-0.5, 0, 1.0),
                ExpansionTerm::new(0.0, 0, 3.0),
                ExpansionTerm::new(1.0, 0, 5.0),
            ],
            None,
        )
        .unwrap();
        let c = small_v_coefficients(&e).unwrap();
        assert!((c[0].c - 2.0 / PI).abs() < 1e-16);
        assert_eq!(c[0].v_exponent, 0.0);
        assert_eq!(c[1].c, 0.0);
        assert_eq!(c[2].c, 0.0);
    }

    #[test]
    fn large_v_coulomb_printed_values() {
        let (g, a) = (1.0, 0.0);
        let m = coulomb(g, a);
        let raw = raw_large_v_coefficients(m.large()).unwrap();
        let find = |al: f64, k: u32, h: u32| {
            raw.iter()
                .find(|t| t.alpha == al && t.k == k && t.h == h)
                .unwrap()
                .e
        };
        assert_eq!(find(-1.0, 0, 0), 0.0);
        assert!((find(-1.5, 1, 1) - g / (2.0 * PI)).abs() < 1e-16);
        assert_eq!(find(-1.5, 1, 0), 0.0);
        let a30 = crate::model::a30(&ModelParams::new(g, a).unwrap());
        assert!((find(-1.5, 0, 0) + 2.0 * a30 / PI).abs() < 1e-15);
        let agg = aggregate(&raw);
        let e31 = agg.iter().find(|t| t.alpha == -1.5 && t.h == 1).unwrap().e;
        assert!((e31 - g / PI).abs() < 1e-16);
    }

    #[test]
    fn oriented_coefficients_match_closed_forms() {
        for (g, a) in [(1.0, 0.0), (0.5, 0.5), (2.0, 0.1)] {
            let r = resolve_coefficients(&coulomb(g, a), DEFAULT_FIT_WINDOW).unwrap();
            assert_eq!(r.sign.orientation, -1.0);
            assert!(r.sign.discrepancy);
            assert!(r.sign.magnitude_mismatch < 1e-5, "{}", r.sign.magnitude_mismatch);
            let e31 = r.oriented.large(-1.5, 1);
            let e30 = r.oriented.large(-1.5, 0);
            let closed30 = (8.0 * PI * a - 2.0 * EULER_GAMMA * g + 4.0 * g
                + g * (g * g / 4.0).ln())
                / (2.0 * PI);
            assert!((e31 + g / PI).abs() < 1e-15);
            assert!((e30 - closed30).abs() < 1e-14);
            assert_eq!(r.oriented.large(-1.0, 0), 0.0);
        }
    }

    #[test]
    fn gamma_zero_orientation_comes_from_e30() {
        let r = resolve_coefficients(&coulomb(0.0, 1.0), DEFAULT_FIT_WINDOW).unwrap();
        assert_eq!(r.sign.orientation, -1.0);
        assert_eq!(r.sign.alpha, Some(-1.5));
        // e(v) = 4α/(16π²α² + v²): e(0) = 1/(4π²α)
        let c0 = r.oriented.small(-0.5);
        assert!((c0 - 1.0 / (4.0 * PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn tail_fit_exact_model() {
        let (a, b) = (-0.7, 1.3);
        let m = RelativeModel::from_density(
            "exact-tail",
            move |v: f64| Ok((a * v.ln() + b) / (v * v)),
            Expansion::empty(ExpansionRegime::Small),
            Expansion::empty(ExpansionRegime::Large),
        )
        .unwrap();
        let fit = fit_tail_coefficients(&m, 1e2, 1e4).unwrap();
        assert!((fit.e31 - a).abs() < 1e-10 && (fit.e30 - b).abs() < 1e-10, "{fit:?}");
        assert!(fit_tail_coefficients(&m, 5.0, 1e4).is_err());
        assert!(fit_tail_coefficients(&m, 1e2, 5e2).is_err());
    }

    #[test]
    fn tail_fit_coulomb() {
        for (g, a) in [(1.0, 0.0), (0.5, 0.0), (2.0, 0.5), (0.0, 1.0)] {
            let fit = fit_tail_coefficients(&coulomb(g, a), 1e2, 1e4).unwrap();
            if g == 0.0 {
                assert!(fit.e31.abs() < 1e-6);
            } else {
                assert!((fit.e31.abs() - g / PI).abs() < 1e-3 * g / PI, "{g}: {fit:?}");
            }
        }
    }

    #[test]
    fn two_sided_agrees_with_reduced() {
        for (g, a) in [(1.0, 0.0), (0.5, 0.2), (0.0, 1.0)] {
            let m = coulomb(g, a);
            for v in [1e-2, 0.5, 3.0, 100.0, 1e4] {
                spectral_measure_checked(&m, v).unwrap();
            }
        }
    }

    #[test]
    fn tabulate_keeps_grid_order() {
        let m = coulomb(1.0, 0.0);
        let rows = tabulate(&m, 1e-3, 1e4, 400).unwrap();
        assert_eq!(rows.len(), 400);
        assert!(rows.windows(2).all(|w| w[1].0 > w[0].0));
        assert!(rows[0].1.as_ref().unwrap().abs() < 1e-300);
        assert!(tabulate(&m, 1.0, 1.0, 10).is_err());
    }
}
