use std::f64::consts::PI;

use proptest::prelude::*;

use relzeta::model::{relative_trace, CoulombDelta, ModelParams};
use relzeta::quadrature::{
    integrate_finite, integrate_tail, integrate_vertical_line, AccuracyBudget, Integrand, Singularity,
    TailModel,
};
use relzeta::specfun::{digamma, log_gamma, trigamma};
use relzeta::spectral::{spectral_measure, spectral_measure_two_sided};
use relzeta::zeta::{RelativeZeta, SpectrumPolicy, ZetaOptions};
use relzeta::Complex64;

fn conj_exact(f: impl Fn(Complex64) -> Complex64, z: Complex64) -> bool {
    let a = f(z.conj());
    let b = f(z).conj();
    a.re == b.re && a.im == b.im
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn recurrences_hold(x in 0.1f64..50.0, y in -50.0f64..50.0) {
        let z = Complex64::new(x, y);
        let psi = digamma(z + 1.0).unwrap();
        let r1 = (psi - digamma(z).unwrap() - 1.0 / z).norm() / psi.norm().max(1.0);
        let tri = trigamma(z).unwrap();
        let r2 = (trigamma(z + 1.0).unwrap() - tri + 1.0 / (z * z)).norm() / tri.norm().max(1.0);
        prop_assert!(r1 < 1e-12 && r2 < 1e-12, "{r1:e} {r2:e}");
    }

    #[test]
    fn special_functions_are_conjugate_symmetric(x in -20.0f64..50.0, y in 0.01f64..50.0) {
        let z = Complex64::new(x, y);
        prop_assert!(conj_exact(|z| digamma(z).unwrap(), z));
        prop_assert!(conj_exact(|z| trigamma(z).unwrap(), z));
        prop_assert!(conj_exact(|z| log_gamma(z).unwrap(), z));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn trace_is_conjugate_symmetric(
        g in 0.0f64..3.0,
        a in 0.05f64..2.0,
        re in 1e-3f64..1e3,
        im in -1e3f64..1e3,
    ) {
        let p = ModelParams::new(g, a).unwrap();
        let k = Complex64::new(re, im);
        let up = relative_trace(&p, k).unwrap();
        let down = relative_trace(&p, k.conj()).unwrap();
        prop_assert!((up.conj() - down).norm() <= 1e-14 * up.norm().max(1e-300), "{up} {down}");
    }

    #[test]
    fn trace_is_real_on_the_real_axis(g in 0.0f64..3.0, a in 0.05f64..2.0, lk in -3.0f64..3.0) {
        let p = ModelParams::new(g, a).unwrap();
        let r = relative_trace(&p, Complex64::new(10f64.powf(lk), 0.0)).unwrap();
        prop_assert!(r.im.abs() < 1e-13 * r.norm(), "{r}");
    }

    #[test]
    fn conjugate_pair_identity(g in 0.0f64..3.0, a in -1.0f64..2.0, lv in -2.0f64..4.0) {
        let model = CoulombDelta::relative_model(ModelParams::new(g, a).unwrap()).unwrap();
        let v = 10f64.powf(lv);
        let reduced = spectral_measure(&model, v).unwrap();
        let two_sided = spectral_measure_two_sided(&model, v).unwrap();
        let scale = v * model.trace(Complex64::new(0.0, v)).unwrap().norm();
        prop_assert!((reduced - two_sided).abs() <= 1e-10 * scale.max(reduced.abs()));
    }

    #[test]
    fn log_zr_scale_covariance(g in 0.0f64..2.0, a in 0.1f64..2.0, beta in 0.5f64..5.0, ell in 0.1f64..10.0) {
        let model = CoulombDelta::relative_model(ModelParams::new(g, a).unwrap()).unwrap();
        let eng = RelativeZeta::new(model, ZetaOptions::default().policy(SpectrumPolicy::RequireContinuous)).unwrap();
        let one = eng.log_partition(beta, 1.0).unwrap();
        let r = eng.log_partition(beta, ell).unwrap();
        // log Z_R(ℓ) + ½ Res₀ log ℓ² does not depend on ℓ
        let d = r.log_zr + r.res0_zeta_l * ell.ln() - one.log_zr;
        prop_assert!(d.abs() <= 1e-13 * one.log_zr.abs().max(1.0), "{d:e}");
    }
}

/// Integrands on `[a, b]` with their exact integrals.
fn quadrature_suite() -> Vec<(&'static str, Integrand<'static, f64>, f64, f64, f64)> {
    let e = std::f64::consts::E;
    vec![
        ("x^2", Integrand::smooth(|x: f64| x * x), 0.0, 1.0, 1.0 / 3.0),
        ("x^7", Integrand::smooth(|x: f64| x.powi(7)), 0.0, 2.0, 32.0),
        ("exp", Integrand::smooth(f64::exp), 0.0, 1.0, e - 1.0),
        ("sin", Integrand::smooth(f64::sin), 0.0, PI, 2.0),
        ("cos 30x", Integrand::smooth(|x: f64| (30.0 * x).cos()), 0.0, 1.0, (30.0f64).sin() / 30.0),
        ("1/(1+x^2)", Integrand::smooth(|x: f64| 1.0 / (1.0 + x * x)), 0.0, 1.0, PI / 4.0),
        ("1/(1+25x^2)", Integrand::smooth(|x: f64| 1.0 / (1.0 + 25.0 * x * x)), -1.0, 1.0, 0.4 * 5f64.atan()),
        ("1/x", Integrand::smooth(|x: f64| 1.0 / x), 1.0, e, 1.0),
        ("ln x", Integrand::smooth(f64::ln).with_singularity(Singularity::LogLeft).unwrap(), 0.0, 1.0, -1.0),
        ("x ln x", Integrand::smooth(|x: f64| x * x.ln()), 0.0, 1.0, -0.25),
        ("sqrt", Integrand::smooth(f64::sqrt).with_singularity(Singularity::Algebraic(0.5)).unwrap(), 0.0, 1.0, 2.0 / 3.0),
        ("x^-1/2", Integrand::smooth(|x: f64| x.powf(-0.5)).with_singularity(Singularity::Algebraic(-0.5)).unwrap(), 0.0, 4.0, 4.0),
        ("x^-0.9", Integrand::smooth(|x: f64| x.powf(-0.9)).with_singularity(Singularity::Algebraic(-0.9)).unwrap(), 0.0, 1.0, 10.0),
        ("gauss", Integrand::smooth(|x: f64| (-x * x).exp()), 0.0, 10.0, 0.5 * PI.sqrt()), // erf(10) = 1 − 2e−45
        ("x e^-x", Integrand::smooth(|x: f64| x * (-x).exp()), 0.0, 20.0, 1.0 - 21.0 * (-20.0f64).exp()),
        ("|x - 1/3|", Integrand::smooth(|x: f64| (x - 1.0 / 3.0).abs()), 0.0, 1.0, 5.0 / 18.0),
        ("tanh 50x", Integrand::smooth(|x: f64| (50.0 * x).tanh()), -1.0, 2.0, ((100.0f64).cosh().ln() - (50.0f64).cosh().ln()) / 50.0),
        ("sec^2", Integrand::smooth(|x: f64| 1.0 / x.cos().powi(2)), 0.0, 1.5, 1.5f64.tan()),
        ("x^3 e^x", Integrand::smooth(|x: f64| x.powi(3) * x.exp()), 0.0, 1.0, 6.0 - 2.0 * e),
        ("log1p", Integrand::smooth(f64::ln_1p), 0.0, 1.0, 2.0 * 2f64.ln() - 1.0),
    ]
}

#[test]
fn quadrature_error_estimates_are_conservative() {
    let b = AccuracyBudget::absolute(1e-9).unwrap();
    let mut covered = 0;
    let mut counted = 0;
    for (name, f, lo, hi, exact) in quadrature_suite() {
        counted += 1;
        let r = integrate_finite(&f, lo, hi, &b).unwrap_or_else(|e| panic!("{name}: {e}"));
        let err = (r.value - exact).abs();
        // rounding in the exact value sets a floor
        let floor = 4.0 * f64::EPSILON * exact.abs().max(1.0);
        if err <= r.error.max(floor) {
            covered += 1;
        }
        assert!(err <= 10.0 * r.error.max(floor), "{name}: error {err:e} vs estimate {:e}", r.error);
    }
    assert!(covered as f64 >= 0.95 * counted as f64, "{covered} of {counted}");
    assert_eq!(counted, 20);
}

type Case = (Box<dyn Fn(f64) -> f64 + Send + Sync>, f64);

#[test]
fn tail_matches_inverse_substitution() {
    let b = AccuracyBudget::absolute(1e-12).unwrap();
    // ∫_a^∞ f(v) dv = ∫_0^{1/a} f(1/u)/u² du
    let cases: Vec<Case> = vec![
        (Box::new(|v: f64| 1.0 / (1.0 + v * v)), 1.0),
        (Box::new(|v: f64| v.powi(-3) * (1.0 + v.ln())), 2.0),
        (Box::new(|v: f64| (-v).exp() * v), 0.5),
        (Box::new(|v: f64| v.powf(-2.5) * (1.0 / v).cos()), 1.0),
    ];
    for (i, (f, a)) in cases.into_iter().enumerate() {
        let f = std::sync::Arc::new(f);
        let g = f.clone();
        let tail = integrate_tail(&Integrand::smooth(move |v| f(v)), a, &TailModel::empty(), &b).unwrap();
        let sub = Integrand::smooth(move |u: f64| g(1.0 / u) / (u * u));
        let direct = integrate_finite(&sub, 0.0, 1.0 / a, &b).unwrap();
        assert!((tail.value - direct.value).abs() < 1e-10, "case {i}: {} vs {}", tail.value, direct.value);
    }
}

#[test]
fn vertical_line_is_independent_of_abscissa() {
    let b = AccuracyBudget::absolute(1e-12).unwrap();
    let w = |z: Complex64| {
        let s = (z * PI).sin();
        Complex64::new(PI * PI, 0.0) / (s * s)
    };
    for a in [1.0, 1.5, 2.0] {
        let vals: Vec<Complex64> = [0.3, 0.5, 0.7]
            .iter()
            .map(|&x0| integrate_vertical_line(&|z| Ok(w(z) / (z + a)), x0, &b).unwrap().value)
            .collect();
        for v in &vals[1..] {
            assert!((v - vals[0]).norm() < 1e-9, "a = {a}: {vals:?}");
        }
    }
}
