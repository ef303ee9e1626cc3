//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Built with `harness = false` so the lines are never captured.

use std::cell::Cell;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use relzeta::model::{
    bound_state_threshold, find_bound_state, fit_large_lambda, i_closed, i_contour, relative_trace,
    CoulombDelta, ModelParams,
};
use relzeta::quadrature::{hankel_heat_trace, integrate_vertical_line, AccuracyBudget, HankelContour};
use relzeta::specfun::{digamma, log_gamma, trigamma};
use relzeta::spectral::{fit_tail_coefficients, resolve_coefficients, SignSource, DEFAULT_FIT_WINDOW};
use relzeta::verify::{run_suite, VerifyConfig};
use relzeta::zeta::{
    coulomb_e30, coulomb_e31, coulomb_regular_integral, coulomb_residua, RelativeZeta, SpectrumPolicy,
    ZetaOptions, DEFAULT_RING,
};
use relzeta::{Complex64, Result, EULER_GAMMA};

/// `log Z_R(γ=1, α=0, β=1, ℓ=1)` on the continuous spectrum, pinned once
/// criteria 1–9 passed.
const GOLDEN_LOG_ZR: f64 = 0.547144637625851;

struct Measured {
    discrepancy: f64,
    tolerance: f64,
    detail: String,
}

fn measured(discrepancy: f64, tolerance: f64, detail: impl Into<String>) -> Result<Measured> {
    Ok(Measured {
        discrepancy,
        tolerance,
        detail: detail.into(),
    })
}

fn params(gamma: f64, alpha: f64) -> ModelParams {
    ModelParams::new(gamma, alpha).expect("valid couplings")
}

/// The running example `(γ, α) = (1, 0)` evaluated on its continuous spectrum.
fn engine_1_0() -> Result<RelativeZeta> {
    let model = CoulombDelta::relative_model(params(1.0, 0.0))?;
    RelativeZeta::new(model, ZetaOptions::default().policy(SpectrumPolicy::ContinuousPartOnly))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn c1_special_functions() -> Result<Measured> {
    let one = Complex64::new(1.0, 0.0);
    let fixed = [
        (digamma(one)?.re + EULER_GAMMA).abs(),
        (digamma(one * 2.0)?.re - (1.0 - EULER_GAMMA)).abs(),
        (trigamma(one)?.re - PI * PI / 6.0).abs(),
    ];
    let fixed = fixed.iter().fold(0.0f64, |m, x| m.max(*x));

    let worst = Cell::new(0.0f64);
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: 1000,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let outcome = runner.run(&(0.1f64..50.0, -50.0f64..50.0), |(x, y)| {
        let z = Complex64::new(x, y);
        let zp = z + 1.0;
        let residuals = || -> Result<[f64; 3]> {
            let psi = digamma(zp)?;
            let tri = trigamma(z)?;
            let lg = log_gamma(zp)?;
            Ok([
                (psi - digamma(z)? - 1.0 / z).norm() / psi.norm().max(1.0),
                (trigamma(zp)? - tri + 1.0 / (z * z)).norm() / tri.norm().max(1.0),
                (lg - log_gamma(z)? - z.ln()).norm() / lg.norm().max(1.0),
            ])
        };
        let r = residuals().map_err(|e| TestCaseError::fail(e.to_string()))?;
        let m = r.iter().fold(0.0f64, |m, x| m.max(*x));
        worst.set(worst.get().max(m));
        prop_assert!(m < 1e-12, "recurrence residual {m:e} at z = {z}");
        Ok(())
    });
    let random = match outcome {
        Ok(()) => worst.get(),
        Err(_) => f64::INFINITY,
    };
    measured(
        fixed.max(random),
        1e-12,
        format!("fixed values {fixed:.1e}, 1000 recurrences max {random:.1e}"),
    )
}

fn pi2_over_sin2(z: Complex64) -> Complex64 {
    let s = (z * PI).sin();
    Complex64::new(PI * PI, 0.0) / (s * s)
}

fn c2_vertical_line() -> Result<Measured> {
    let b = AccuracyBudget::absolute(1e-11)?;
    let mut worst = 0.0f64;
    for a in [1.0f64, 2.0, 1.5] {
        let x0 = 0.5 * ((1.0 - a).max(0.0) + 1.0);
        let one = integrate_vertical_line(&|z| Ok(pi2_over_sin2(z)), x0, &b)?.value;
        let shifted = integrate_vertical_line(&|z| Ok(pi2_over_sin2(z) / (z + a)), x0, &b)?.value;
        let want = trigamma(Complex64::new(a, 0.0))?.re - 1.0 / (a * a);
        worst = worst.max((one - 1.0).norm()).max((shifted - want).norm());
    }
    measured(worst, 1e-8, "a ∈ {1, 2, 1.5}")
}

fn c3_i_contour() -> Result<Measured> {
    let b = AccuracyBudget::absolute(1e-11)?;
    let mut worst = 0.0f64;
    for z in [0.25, 0.5, 1.0, 2.0] {
        let z = Complex64::new(z, 0.0);
        // closed form typed out here rather than taken from the library
        let closed = 1.0 - 2.0 * z + 2.0 * trigamma(z + 1.0)? * z * z;
        worst = worst
            .max((i_contour(z, &b)?.value - closed).norm())
            .max((i_closed(z)? - closed).norm());
    }
    measured(worst, 1e-8, "z ∈ {0.25, 0.5, 1, 2}")
}

fn c4_asymptotics() -> Result<Measured> {
    let mut worst = 0.0f64;
    for g in [0.5, 1.0, 2.0] {
        let fit = fit_large_lambda(&params(g, 1.0), 1e2, 1e4)?;
        worst = worst.max(rel(fit.a20, -0.5)).max(rel(fit.a31, -g / 4.0));
    }
    // b₀ = −1/(3γ(4πα + γ(1 − 2C))), as κ → 0
    let mut small = 0.0f64;
    for (g, a) in [(1.0, 1.0), (0.5, 0.2), (2.0, 0.3)] {
        let b0 = -1.0 / (3.0 * g * (4.0 * PI * a + g * (1.0 - 2.0 * EULER_GAMMA)));
        let r = relative_trace(&params(g, a), Complex64::new(1e-5, 0.0))?.re;
        small = small.max((r - b0).abs());
    }
    // two tolerances: scale the small-κ one onto the fit's
    measured(
        worst.max(small * 1e4),
        1e-4,
        format!("fit rel {worst:.1e} (tol 1e-4), r(0) − b0 {small:.1e} (tol 1e-8)"),
    )
}

fn c5_tail() -> Result<Measured> {
    let mut worst = 0.0f64;
    let mut record = String::new();
    for (g, a) in [(1.0, 0.0), (0.5, 1.0), (2.0, 0.5)] {
        let p = params(g, a);
        let model = CoulombDelta::relative_model(p)?;
        let fit = fit_tail_coefficients(&model, DEFAULT_FIT_WINDOW.0, DEFAULT_FIT_WINDOW.1)?;
        worst = worst
            .max(rel(fit.e31.abs(), g / PI))
            .max(rel(fit.e30, coulomb_e30(&p)))
            .max(rel(fit.e31, coulomb_e31(&p)));
        let sign = resolve_coefficients(&model, DEFAULT_FIT_WINDOW)?.sign;
        if sign.source != SignSource::Fit || sign.printed.is_empty() || sign.fitted.is_empty() {
            worst = f64::INFINITY;
        }
        record = format!("orientation {} from {:?}", sign.orientation, sign.source);
    }
    measured(worst, 1e-3, format!("γ ∈ {{0.5, 1, 2}}; {record}"))
}

fn c6_heat_trace() -> Result<Measured> {
    let eng = engine_1_0()?;
    let b = AccuracyBudget::absolute(1e-10)?;
    let model = eng.model().clone();
    let trace = |k: Complex64| model.trace(k);
    let mut worst = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        let direct = eng.heat_trace(t)?.value;
        let contour = HankelContour::excluding(t, eng.bound_states());
        worst = worst.max((direct - hankel_heat_trace(&trace, t, contour, &b)?.value).abs());
    }
    measured(worst, 1e-6, "t ∈ {0.5, 1, 2}, γ = 1, α = 0")
}

fn c7_ring_fit() -> Result<Measured> {
    let fit = engine_1_0()?.laurent_ring_fit(-0.5, &DEFAULT_RING)?;
    measured(
        (fit.data.res2 + 1.0 / (4.0 * PI)).abs(),
        1e-5,
        format!("res2 = {:.10}", fit.data.res2),
    )
}

fn c8_specialization() -> Result<Measured> {
    let budget = AccuracyBudget::absolute(1e-10)?;
    let mut worst = 0.0f64;
    for g in [0.5, 1.0, 2.0] {
        for a in [0.1, 0.5, 2.0] {
            let p = params(g, a);
            let model = CoulombDelta::relative_model(p)?;
            let regular = coulomb_regular_integral(&model, &p, &budget)?.value;
            let eng = RelativeZeta::new(model, ZetaOptions::with_tolerance(1e-10)?)?;
            for beta in [1.0, 2.0 * PI] {
                let (generic, _, eta) = eng.residua_l(beta)?;
                let closed = coulomb_residua(&p, beta, regular, eta.value);
                let d = (generic.res1 - closed.res1)
                    .abs()
                    .max((generic.res0 - closed.res0).abs())
                    .max((generic.res0_prime - closed.res0_prime).abs());
                worst = worst.max(d);
            }
        }
    }
    measured(worst, 1e-10, "γ ∈ {0.5, 1, 2} × α ∈ {0.1, 0.5, 2} × β ∈ {1, 2π}")
}

fn c9_bound_states() -> Result<Measured> {
    let e = find_bound_state(&params(0.0, -1.0 / (4.0 * PI)))?.unwrap_or(f64::NAN);
    let energy = (e + 1.0).abs();
    let mut mismatches = 0;
    for i in 0..10 {
        let g = 0.25 * i as f64;
        // α*(γ) = −γ(ψ(1) + ψ(2))/(4π)
        let threshold = -g * (1.0 - 2.0 * EULER_GAMMA) / (4.0 * PI);
        if (bound_state_threshold(g) - threshold).abs() > 1e-15 {
            mismatches += 1;
        }
        for a in [threshold - 0.05, threshold - 1e-3, threshold + 1e-3, threshold + 0.5] {
            let found = find_bound_state(&params(g, a))?.is_some();
            if found != (a < threshold) {
                mismatches += 1;
            }
        }
    }
    let d = if mismatches == 0 { energy } else { f64::INFINITY };
    measured(d, 1e-12, format!("E = {e:.15}, {mismatches} verdict mismatches over 10 γ"))
}

fn c10_partition() -> Result<Measured> {
    let eng = engine_1_0()?;
    let a = eng.log_partition(1.0, 1.0)?;
    let mut ell = 0.0f64;
    for l in [0.5, 2.0, 10.0] {
        let b = eng.log_partition(1.0, l)?;
        let d = b.log_zr - a.log_zr + a.res0_zeta_l * l.ln();
        ell = ell.max(d.abs() / a.log_zr.abs().max(1.0));
    }
    let golden = (a.log_zr - GOLDEN_LOG_ZR).abs();
    let start = Instant::now();
    let report = run_suite(&VerifyConfig::new(params(1.0, 0.0)))?;
    let verify = start.elapsed();
    let verify_ok = report.passed() && verify < Duration::from_secs(300);
    let d = if ell <= 1e-14 && verify_ok { golden } else { f64::INFINITY };
    measured(
        d,
        1e-10,
        format!(
            "log Z_R = {:.15}, ℓ identity {ell:.1e}, verify {} in {:.3} s",
            a.log_zr,
            if report.passed() { "passed" } else { "FAILED" },
            verify.as_secs_f64()
        ),
    )
}

type Criterion = (u32, &'static str, fn() -> Result<Measured>, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "special functions", c1_special_functions, Duration::from_secs(1)),
        (2, "vertical-line identities", c2_vertical_line, Duration::from_secs(5)),
        (3, "I(z) contour vs closed form", c3_i_contour, Duration::from_secs(10)),
        (4, "large- and small-λ asymptotics", c4_asymptotics, Duration::MAX),
        (5, "spectral-measure tail", c5_tail, Duration::MAX),
        (6, "heat-trace cross-oracle", c6_heat_trace, Duration::from_secs(60)),
        (7, "Laurent ring fit at s = −1/2", c7_ring_fit, Duration::MAX),
        (8, "specialization identity", c8_specialization, Duration::MAX),
        (9, "bound states", c9_bound_states, Duration::MAX),
        (10, "partition function", c10_partition, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (n, name, run, limit) in criteria {
        let start = Instant::now();
        let r = run();
        let took = start.elapsed();
        let line = match r {
            Ok(m) => {
                let ok = m.discrepancy <= m.tolerance && took <= limit;
                if !ok {
                    failed += 1;
                }
                format!(
                    "{} criterion {n:>2} {name}: discrepancy {:.2e} (tol {:.0e}), {:.3} s; {}",
                    if ok { "PASS" } else { "FAIL" },
                    m.discrepancy,
                    m.tolerance,
                    took.as_secs_f64(),
                    m.detail
                )
            }
            Err(e) => {
                failed += 1;
                format!("FAIL criterion {n:>2} {name}: {e}")
            }
        };
        println!("{line}");
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
