//! Adaptive Gauss–Kronrod quadrature on finite intervals, semi-infinite
//! intervals with tail subtraction, vertical lines and Hankel contours.
//!
//! Every routine is generic over the integrand's value type through
//! [`QuadValue`], so the same machinery integrates real and complex functions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute and relative accuracy targets for a numeric result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccuracyBudget {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl AccuracyBudget {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        let budget = Self { abs_tol, rel_tol };
        budget.validate()?;
        Ok(budget)
    }

    /// Pure absolute tolerance.
    pub fn absolute(abs_tol: f64) -> Result<Self> {
        Self::new(abs_tol, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !ok(self.abs_tol) || !ok(self.rel_tol) || (self.abs_tol == 0.0 && self.rel_tol == 0.0)
        {
            return Err(Error::InvalidInput(format!(
                "accuracy budget needs finite non-negative tolerances, one of them positive \
                 (abs_tol = {}, rel_tol = {})",
                self.abs_tol, self.rel_tol
            )));
        }
        Ok(())
    }

    /// Tolerance granted to a result of the given magnitude.
    pub fn tolerance_for(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude.abs())
    }

    /// The same budget with both tolerances multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
        }
    }
}

impl Default for AccuracyBudget {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            rel_tol: 0.0,
        }
    }
}

/// Values that can be integrated: real or complex.
pub trait QuadValue:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Declared behaviour of an integrand at the left endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Singularity {
    None,
    /// `f(v) ~ log(v − a)` as `v → a⁺`.
    LogLeft,
    /// `f(v) ~ (v − a)^p` with `p > −1`.
    Algebraic(f64),
}

type Evaluator<'a, T> = Box<dyn Fn(f64) -> Result<T> + Send + Sync + 'a>;

/// A function on an interval together with its endpoint behaviour.
pub struct Integrand<'a, T> {
    eval: Evaluator<'a, T>,
    singularity: Singularity,
}

impl<'a, T: QuadValue> Integrand<'a, T> {
    pub fn new(f: impl Fn(f64) -> Result<T> + Send + Sync + 'a) -> Self {
        Self {
            eval: Box::new(f),
            singularity: Singularity::None,
        }
    }

    /// Infallible evaluator convenience.
    pub fn smooth(f: impl Fn(f64) -> T + Send + Sync + 'a) -> Self {
        Self::new(move |v| Ok(f(v)))
    }

    pub fn with_singularity(mut self, singularity: Singularity) -> Result<Self> {
        if let Singularity::Algebraic(p) = singularity {
            if !(p > -1.0) || !p.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "algebraic endpoint exponent must exceed −1, got {p}"
                )));
            }
        }
        self.singularity = singularity;
        Ok(self)
    }

    pub fn singularity(&self) -> Singularity {
        self.singularity
    }

    pub fn eval(&self, v: f64) -> Result<T> {
        let y = (self.eval)(v)?;
        if !y.is_finite_value() {
            return Err(Error::Domain(format!("integrand is not finite at {v:e}")));
        }
        Ok(y)
    }
}

/// An integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

impl<T: QuadValue> Estimate<T> {
    fn zero() -> Self {
        Self {
            value: T::zero(),
            error: 0.0,
            evaluations: 0,
        }
    }

    fn absorb(&mut self, other: &Estimate<T>) {
        self.value = self.value + other.value;
        self.error += other.error;
        self.evaluations += other.evaluations;
    }
}

/// One term `c · v^q · log^k v` of a subtracted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailTerm {
    pub exponent: f64,
    pub log_power: u32,
    pub coefficient: f64,
}

impl TailTerm {
    pub fn eval(&self, v: f64) -> f64 {
        let mut x = self.coefficient * v.powf(self.exponent);
        if self.log_power > 0 {
            x *= v.ln().powi(self.log_power as i32);
        }
        x
    }
}

/// Terms removed from an integrand before integrating to infinity.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TailModel {
    pub terms: Vec<TailTerm>,
    /// `(q, k)` such that the residual is `O(v^q log^k v)`.
    pub remainder: Option<(f64, u32)>,
}

impl TailModel {
    pub fn new(terms: Vec<TailTerm>, remainder: Option<(f64, u32)>) -> Result<Self> {
        for w in terms.windows(2) {
            let ordered = w[0].exponent > w[1].exponent
                || (w[0].exponent == w[1].exponent && w[0].log_power > w[1].log_power);
            if !ordered {
                return Err(Error::InvalidInput(
                    "tail terms must be ordered by decreasing exponent".into(),
                ));
            }
        }
        if let Some((q, _)) = remainder {
            if let Some(last) = terms.last() {
                if q > last.exponent {
                    return Err(Error::InvalidInput(format!(
                        "remainder exponent {q} exceeds the last subtracted exponent {}",
                        last.exponent
                    )));
                }
            }
        }
        Ok(Self { terms, remainder })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn eval(&self, v: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(v)).sum()
    }
}

// 15-point Kronrod rule with its embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Maximum bisection depth below the initial interval.
pub const MAX_DEPTH: u32 = 60;
const MAX_INTERVALS: usize = 5000;

struct Panel<T> {
    a: f64,
    b: f64,
    depth: u32,
    value: T,
    error: f64,
    resabs: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // ties broken by position so the refinement order is deterministic
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod<T: QuadValue>(
    f: &dyn Fn(f64) -> Result<T>,
    a: f64,
    b: f64,
    depth: u32,
) -> Result<Panel<T>> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = WGK[7] * fc.magnitude();
    let mut samples = [(T::zero(), T::zero()); 7];
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        kron = kron + (f1 + f2) * WGK[j];
        resabs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
        *sample = (f1, f2);
    }
    let mean = kron * 0.5;
    let mut resasc = WGK[7] * (fc - mean).magnitude();
    for (j, (f1, f2)) in samples.iter().enumerate() {
        resasc += WGK[j] * ((*f1 - mean).magnitude() + (*f2 - mean).magnitude());
    }
    let scale = half.abs();
    let resabs = resabs * scale;
    let resasc = resasc * scale;
    let mut error = ((kron - gauss) * half).magnitude();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Panel {
        a,
        b,
        depth,
        value: kron * half,
        error,
        resabs,
    })
}

fn adaptive<T: QuadValue>(
    f: &dyn Fn(f64) -> Result<T>,
    a: f64,
    b: f64,
    budget: &AccuracyBudget,
) -> Result<Estimate<T>> {
    let first = kronrod(f, a, b, 0)?;
    let mut evaluations = 15;
    let mut value = first.value;
    let mut error = first.error;
    let mut resabs = first.resabs;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    loop {
        let tol = budget.tolerance_for(value.magnitude());
        let roundoff = 100.0 * f64::EPSILON * resabs;
        if error <= tol.max(roundoff) {
            break;
        }
        let worst = heap.pop().expect("non-empty panel heap");
        if worst.depth >= MAX_DEPTH || heap.len() + 2 > MAX_INTERVALS {
            return Err(Error::NoConvergence {
                what: format!("adaptive quadrature on [{a:e}, {b:e}]"),
                best_estimate: value.magnitude(),
                error_estimate: error,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod(f, worst.a, mid, worst.depth + 1)?;
        let right = kronrod(f, mid, worst.b, worst.depth + 1)?;
        evaluations += 30;
        value = value - worst.value + left.value + right.value;
        error = error - worst.error + left.error + right.error;
        resabs = resabs - worst.resabs + left.resabs + right.resabs;
        heap.push(left);
        heap.push(right);
    }
    // final sum in a fixed left-to-right order
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut total = T::zero();
    let mut err = 0.0;
    for p in &panels {
        total = total + p.value;
        err += p.error;
    }
    Ok(Estimate {
        value: total,
        error: err,
        evaluations,
    })
}

/// `∫_a^b f(v) dv` with the endpoint treatment declared by `f`.
pub fn integrate_finite<T: QuadValue>(
    f: &Integrand<'_, T>,
    a: f64,
    b: f64,
    budget: &AccuracyBudget,
) -> Result<Estimate<T>> {
    budget.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!(
            "integration interval [{a}, {b}] must be finite with a < b"
        )));
    }
    let width = b - a;
    match f.singularity {
        Singularity::None => adaptive(&|v| f.eval(v), a, b, budget),
        Singularity::LogLeft => {
            // v = a + (b − a) e^{−u}
            const U_MAX: f64 = 64.0;
            let g = |u: f64| {
                let s = (-u).exp();
                Ok(f.eval(a + width * s)? * (width * s))
            };
            adaptive(&g, 0.0, U_MAX, budget)
        }
        Singularity::Algebraic(p) => {
            // v = a + (b − a) w^{1/(p+1)}
            let q = 1.0 / (p + 1.0);
            let g = |w: f64| {
                if w == 0.0 {
                    return Ok(T::zero());
                }
                let jac = width * q * w.powf(q - 1.0);
                Ok(f.eval(a + width * w.powf(q))? * jac)
            };
            adaptive(&g, 0.0, 1.0, budget)
        }
    }
}

/// Sums `∫ g` over `[start + w·(2^i − 1), start + w·(2^{i+1} − 1)]` until the
/// geometric estimate of what is left drops below a tenth of the tolerance.
fn integrate_doubling<T: QuadValue>(
    g: &(dyn Fn(f64) -> Result<T> + Sync),
    start: f64,
    first_width: f64,
    budget: &AccuracyBudget,
    max_end: f64,
    ratio_floor: f64,
) -> Result<(Estimate<T>, DoublingOutcome)> {
    const MIN_SEGMENTS: usize = 4;
    const DIVERGENCE_STREAK: usize = 6;
    let segment_budget = budget.scaled(0.125);
    let mut total = Estimate::zero();
    let mut left = start;
    let mut width = first_width;
    let mut previous: Option<f64> = None;
    let mut quiet = 0usize;
    let mut stalled = 0usize;
    let mut ratio = 0.0;
    let mut index = 0usize;
    loop {
        let right = left + width;
        let seg = adaptive(g, left, right, &segment_budget)?;
        total.absorb(&seg);
        let size = seg.value.magnitude();
        let tol = budget.tolerance_for(total.value.magnitude());
        index += 1;
        if let Some(prev) = previous {
            if size == 0.0 && prev == 0.0 {
                quiet += 1;
            } else if prev > 0.0 {
                ratio = size / prev;
                // a declared decay rate bounds the extrapolation from below
                let rho = ratio.max(ratio_floor);
                let remaining = if rho < 1.0 {
                    size * rho / (1.0 - rho)
                } else {
                    f64::INFINITY
                };
                if remaining < 0.1 * tol {
                    quiet += 1;
                } else {
                    quiet = 0;
                }
                if ratio >= 0.95 {
                    stalled += 1;
                } else {
                    stalled = 0;
                }
            } else {
                quiet = 0;
            }
        }
        if index >= MIN_SEGMENTS && quiet >= 2 {
            return Ok((total, DoublingOutcome::Converged));
        }
        if index >= MIN_SEGMENTS && stalled >= DIVERGENCE_STREAK {
            return Ok((total, DoublingOutcome::Stalled { ratio }));
        }
        if right >= max_end {
            return Ok((total, DoublingOutcome::Exhausted { end: right, ratio }));
        }
        previous = Some(size);
        left = right;
        width *= 2.0;
    }
}

enum DoublingOutcome {
    Converged,
    Stalled { ratio: f64 },
    Exhausted { end: f64, ratio: f64 },
}

/// `∫_a^∞ [f(v) − Σ tail terms] dv`.
///
/// The integration range is doubled until the residual contribution of the
/// last segments, extrapolated geometrically, is negligible. A residual that
/// stops shrinking is reported as [`Error::Divergence`] with the decay
/// exponent it exhibits.
pub fn integrate_tail<T: QuadValue>(
    f: &Integrand<'_, T>,
    a: f64,
    tail: &TailModel,
    budget: &AccuracyBudget,
) -> Result<Estimate<T>> {
    budget.validate()?;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidInput(format!(
            "tail integral needs a finite lower limit a > 0, got {a}"
        )));
    }
    if f.singularity != Singularity::None {
        return Err(Error::InvalidInput(
            "tail integrands must be regular at the lower limit".into(),
        ));
    }
    let g = |v: f64| -> Result<T> {
        let y = f.eval(v)?;
        Ok(y - T::from_real(tail.eval(v)))
    };
    // segment contributions of O(v^q log^k v) shrink by about 2^{q+1}
    let floor = tail
        .remainder
        .map(|(q, _)| 2f64.powf(q + 1.0).min(0.99))
        .unwrap_or(0.0);
    let (estimate, outcome) = integrate_doubling(&g, a, a, budget, 1e300, floor)?;
    match outcome {
        DoublingOutcome::Converged => Ok(estimate),
        DoublingOutcome::Stalled { ratio } => Err(Error::Divergence {
            exponent: ratio.log2() - 1.0,
        }),
        DoublingOutcome::Exhausted { ratio, .. } => Err(Error::Divergence {
            exponent: ratio.log2() - 1.0,
        }),
    }
}

/// Height above which a vertical-line integrand is declared non-decaying.
pub const MAX_LINE_HEIGHT: f64 = 1e6;

/// `(1/2πi) ∫ g(z) dz` along the upward line `Re z = x₀`.
pub fn integrate_vertical_line(
    g: &(dyn Fn(Complex64) -> Result<Complex64> + Sync),
    x0: f64,
    budget: &AccuracyBudget,
) -> Result<Estimate<Complex64>> {
    budget.validate()?;
    if !x0.is_finite() {
        return Err(Error::InvalidInput(format!("line abscissa {x0}")));
    }
    // dz = i dy, so (1/2πi)∫ g dz = (1/2π)∫ g(x₀ + iy) dy; fold y and −y.
    let h = |y: f64| -> Result<Complex64> {
        let up = g(Complex64::new(x0, y))?;
        let down = g(Complex64::new(x0, -y))?;
        Ok((up + down) / (2.0 * PI))
    };
    let (estimate, outcome) = integrate_doubling(&h, 0.0, 1.0, budget, MAX_LINE_HEIGHT, 0.0)?;
    match outcome {
        DoublingOutcome::Converged => Ok(estimate),
        DoublingOutcome::Stalled { .. } | DoublingOutcome::Exhausted { .. } => {
            let height = match outcome {
                DoublingOutcome::Exhausted { end, .. } => end,
                _ => MAX_LINE_HEIGHT,
            };
            let magnitude = g(Complex64::new(x0, height))?.norm();
            Err(Error::InsufficientDecay { height, magnitude })
        }
    }
}

/// Hankel-type contour around `[c₀, ∞)`: two horizontal rays at `Im λ = ±d`
/// joined by the left semicircle of radius `d` centred at `c₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HankelContour {
    pub c0: f64,
    pub d: f64,
}

impl HankelContour {
    pub fn new(c0: f64, d: f64) -> Result<Self> {
        if !(c0 < 0.0) || !(d > 0.0) || !c0.is_finite() || !d.is_finite() {
            return Err(Error::InvalidInput(format!(
                "Hankel contour needs c0 < 0 and d > 0, got c0 = {c0}, d = {d}"
            )));
        }
        Ok(Self { c0, d })
    }

    /// `c₀ = −1/t`, `d = 1`.
    pub fn default_for(t: f64) -> Self {
        Self { c0: -1.0 / t, d: 1.0 }
    }

    /// A contour that encloses `[0, ∞)` but stays clear of every eigenvalue
    /// in `energies` (all negative).
    pub fn excluding(t: f64, energies: &[f64]) -> Self {
        let top = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Self::default_for(t);
        }
        Self {
            c0: top / 2.0,
            d: (top.abs() / 4.0).min(1.0),
        }
    }
}

/// Result of a Hankel-contour evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HankelEstimate {
    pub value: f64,
    pub imaginary_residual: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// `(1/2πi) ∮ e^{−λt} r(λ) dλ` with `r` given as a function of `κ = √(−λ)`.
///
/// The contour is traversed counterclockwise around `[c₀, ∞)`, so it picks up
/// `+e^{−Et}` from every simple pole of unit residue at `λ = E > c₀`.
pub fn hankel_heat_trace(
    r_kappa: &(dyn Fn(Complex64) -> Result<Complex64> + Sync),
    t: f64,
    contour: HankelContour,
    budget: &AccuracyBudget,
) -> Result<HankelEstimate> {
    budget.validate()?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("heat-trace time t = {t} must be positive")));
    }
    HankelContour::new(contour.c0, contour.d)?;
    let HankelContour { c0, d } = contour;
    let f = |lambda: Complex64| -> Result<Complex64> {
        let kappa = (-lambda).sqrt();
        Ok((-lambda * t).exp() * r_kappa(kappa)?)
    };
    // rays: ∫_{c₀}^∞ [F(x − id) − F(x + id)] dx
    let rays = |u: f64| -> Result<Complex64> {
        let x = c0 + u;
        Ok(f(Complex64::new(x, -d))? - f(Complex64::new(x, d))?)
    };
    let first_width = (1.0 / t).max(d);
    let (ray_est, outcome) = integrate_doubling(&rays, 0.0, first_width, &budget.scaled(0.5), 1e300, 0.0)?;
    if !matches!(outcome, DoublingOutcome::Converged) {
        return Err(Error::NoConvergence {
            what: "Hankel contour rays".into(),
            best_estimate: ray_est.value.norm(),
            error_estimate: ray_est.error,
        });
    }
    // semicircle: λ = c₀ + d e^{iθ}, θ ∈ [π/2, 3π/2]
    let arc = |theta: f64| -> Result<Complex64> {
        let e = Complex64::from_polar(1.0, theta);
        Ok(f(c0 + e * d)? * (Complex64::i() * e * d))
    };
    let arc_est = adaptive(&arc, 0.5 * PI, 1.5 * PI, &budget.scaled(0.5))?;
    let total = (ray_est.value + arc_est.value) / Complex64::new(0.0, 2.0 * PI);
    let error = (ray_est.error + arc_est.error) / (2.0 * PI);
    let tol = budget.tolerance_for(total.re);
    if total.im.abs() > tol {
        return Err(Error::ImaginaryResidual {
            residual: total.im.abs(),
            tolerance: tol,
        });
    }
    Ok(HankelEstimate {
        value: total.re,
        imaginary_residual: total.im.abs(),
        error,
        evaluations: ray_est.evaluations + arc_est.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget(tol: f64) -> AccuracyBudget {
        AccuracyBudget::new(tol, tol).unwrap()
    }

    #[test]
    fn budget_validation() {
        assert!(AccuracyBudget::new(0.0, 0.0).is_err());
        assert!(AccuracyBudget::new(-1.0, 1e-3).is_err());
        assert!(AccuracyBudget::new(f64::NAN, 1e-3).is_err());
        assert!(AccuracyBudget::new(0.0, 1e-3).is_ok());
    }

    #[test]
    fn finite_examples() {
        let b = budget(1e-12);
        let lin = Integrand::smooth(|v: f64| v);
        assert!((integrate_finite(&lin, 0.0, 1.0, &b).unwrap().value - 0.5).abs() < 1e-14);
        let log = Integrand::smooth(|v: f64| v.ln())
            .with_singularity(Singularity::LogLeft)
            .unwrap();
        assert!((integrate_finite(&log, 0.0, 1.0, &b).unwrap().value + 1.0).abs() < 1e-12);
        let gauss = Integrand::smooth(|v: f64| v * (-v * v).exp());
        let exact = (1.0 - (-1.0f64).exp()) / 2.0;
        assert!((integrate_finite(&gauss, 0.0, 1.0, &b).unwrap().value - exact).abs() < 1e-14);
        let inv_sqrt = Integrand::smooth(|v: f64| v.powf(-0.5))
            .with_singularity(Singularity::Algebraic(-0.5))
            .unwrap();
        assert!((integrate_finite(&inv_sqrt, 0.0, 1.0, &b).unwrap().value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn finite_rejects_bad_input() {
        let f = Integrand::smooth(|v: f64| v);
        assert!(integrate_finite(&f, 1.0, 0.0, &budget(1e-8)).is_err());
        assert!(Integrand::smooth(|v: f64| v)
            .with_singularity(Singularity::Algebraic(-1.0))
            .is_err());
        let nan = Integrand::smooth(|_v: f64| f64::NAN);
        assert!(integrate_finite(&nan, 0.0, 1.0, &budget(1e-8)).is_err());
    }

    #[test]
    fn non_convergence_carries_best_estimate() {
        // 1/v on (0, 1] is not integrable and is not declared singular
        let f = Integrand::smooth(|v: f64| 1.0 / v);
        match integrate_finite(&f, 0.0, 1.0, &budget(1e-10)) {
            Err(Error::NoConvergence { best_estimate, .. }) => assert!(best_estimate > 1.0),
            Err(Error::Domain(_)) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tail_examples() {
        let b = budget(1e-11);
        let f = Integrand::smooth(|v: f64| v.powi(-2) + v.powi(-4));
        let tail = TailModel::new(
            vec![TailTerm { exponent: -2.0, log_power: 0, coefficient: 1.0 }],
            Some((-4.0, 0)),
        )
        .unwrap();
        let r = integrate_tail(&f, 1.0, &tail, &b).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-10, "{}", r.value);

        let g = Integrand::smooth(|v: f64| v.powi(-2) * v.ln());
        let tail = TailModel::new(
            vec![TailTerm { exponent: -2.0, log_power: 1, coefficient: 1.0 }],
            None,
        )
        .unwrap();
        assert!(integrate_tail(&g, 1.0, &tail, &b).unwrap().value.abs() < 1e-15);

        let h = Integrand::smooth(|v: f64| v.powi(-3));
        let r = integrate_tail(&h, 1.0, &TailModel::empty(), &b).unwrap();
        assert!((r.value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn tail_divergence_names_exponent() {
        let f = Integrand::smooth(|v: f64| 1.0 / v + v.powi(-3));
        match integrate_tail(&f, 1.0, &TailModel::empty(), &budget(1e-8)) {
            Err(Error::Divergence { exponent }) => assert!((exponent + 1.0).abs() < 0.05),
            other => panic!("expected divergence, got {other:?}"),
        }
        let g = Integrand::smooth(|v: f64| v.powf(-0.5));
        match integrate_tail(&g, 1.0, &TailModel::empty(), &budget(1e-8)) {
            Err(Error::Divergence { exponent }) => assert!((exponent + 0.5).abs() < 0.05),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn tail_model_ordering_is_checked() {
        let t = |q| TailTerm { exponent: q, log_power: 0, coefficient: 1.0 };
        assert!(TailModel::new(vec![t(-3.0), t(-2.0)], None).is_err());
        assert!(TailModel::new(vec![t(-2.0)], Some((-1.0, 0))).is_err());
    }

    fn pi2_sin2(z: Complex64) -> Complex64 {
        let s = (z * PI).sin();
        Complex64::new(PI * PI, 0.0) / (s * s)
    }

    #[test]
    fn vertical_line_examples() {
        let b = budget(1e-11);
        for x0 in [0.3, 0.5, 0.7] {
            let one = integrate_vertical_line(&|z| Ok(pi2_sin2(z)), x0, &b).unwrap();
            assert!((one.value - 1.0).norm() < 1e-10, "{x0}: {}", one.value);
            let a1 = integrate_vertical_line(&|z| Ok(pi2_sin2(z) / (z + 1.0)), x0, &b).unwrap();
            assert!((a1.value.re - (PI * PI / 6.0 - 1.0)).abs() < 1e-10);
            let a2 = integrate_vertical_line(&|z| Ok(pi2_sin2(z) / (z + 2.0)), x0, &b).unwrap();
            assert!((a2.value.re - (PI * PI / 6.0 - 1.25)).abs() < 1e-10);
            assert!(a2.value.im.abs() < 1e-12);
        }
    }

    #[test]
    fn vertical_line_detects_missing_decay() {
        let r = integrate_vertical_line(&|_z| Ok(Complex64::new(1.0, 0.0)), 0.5, &budget(1e-8));
        assert!(matches!(r, Err(Error::InsufficientDecay { .. })), "{r:?}");
    }

    #[test]
    fn hankel_single_pole_and_zero() {
        let b = budget(1e-11);
        for (mu, t) in [(-0.5, 1.0), (-2.0, 0.5), (-0.3, 2.0)] {
            // r(λ) = 1/(λ − μ): unit residue at μ
            let r = move |kappa: Complex64| Ok(1.0 / (-(kappa * kappa) - mu));
            let h = hankel_heat_trace(&r, t, HankelContour::default_for(t), &b).unwrap();
            assert!((h.value - (-mu * t).exp()).abs() < 1e-10, "{mu} {t}: {}", h.value);
            assert!(h.imaginary_residual < 1e-11);
        }
        let zero = |_k: Complex64| Ok(Complex64::new(0.0, 0.0));
        let h = hankel_heat_trace(&zero, 1.0, HankelContour::default_for(1.0), &b).unwrap();
        assert_eq!(h.value, 0.0);
    }

    #[test]
    fn hankel_excluding_contour_skips_pole() {
        let mu = -0.5;
        let r = move |kappa: Complex64| Ok(1.0 / (-(kappa * kappa) - mu));
        let c = HankelContour::excluding(1.0, &[mu]);
        assert!(c.c0 > mu);
        let h = hankel_heat_trace(&r, 1.0, c, &budget(1e-11)).unwrap();
        assert!(h.value.abs() < 1e-10);
    }

    #[test]
    fn hankel_reports_imaginary_residual() {
        // a non-real "trace" cannot produce a real heat trace
        let r = |kappa: Complex64| Ok(Complex64::i() / (-(kappa * kappa) + 0.5));
        let h = hankel_heat_trace(&r, 1.0, HankelContour::default_for(1.0), &budget(1e-8));
        assert!(matches!(h, Err(Error::ImaginaryResidual { .. })), "{h:?}");
    }
}
