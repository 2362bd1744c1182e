mod common;

use std::f64::consts::{E, PI, TAU};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spin_thermo::quadrature::{
    integrate_1d, integrate_ball_bures, integrate_disk, Tolerance,
};
use spin_thermo::specfun::{bessel_i, BesselOrder};
use spin_thermo::Error;

type Case = (&'static str, fn(f64) -> f64, f64, f64, f64);

fn suite() -> Vec<Case> {
    vec![
        ("x^2", |x| x * x, 0.0, 1.0, 1.0 / 3.0),
        ("semicircle", |x| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, PI / 2.0),
        ("exp", f64::exp, 0.0, 1.0, E - 1.0),
        ("sin", f64::sin, 0.0, PI, 2.0),
        ("lorentzian", |x| 1.0 / (1.0 + x * x), 0.0, 1.0, PI / 4.0),
        ("log", f64::ln, 0.0, 1.0, -1.0),
        ("inverse sqrt", |x| 1.0 / x.sqrt(), 0.0, 1.0, 2.0),
        ("x^1.5", |x| x.powf(1.5), 0.0, 1.0, 0.4),
        ("cos 10x", |x| (10.0 * x).cos(), 0.0, 1.0, 10f64.sin() / 10.0),
        ("gaussian moment", |x| x * (-x * x).exp(), 0.0, 2.0, (1.0 - (-4f64).exp()) / 2.0),
        ("runge", |x| 1.0 / (1.0 + 25.0 * x * x), -1.0, 1.0, 0.4 * 5f64.atan()),
        ("kink", |x| (x - 1.0 / 3.0).abs(), 0.0, 1.0, 5.0 / 18.0),
        ("sqrt", f64::sqrt, 0.0, 4.0, 16.0 / 3.0),
        ("x^-0.25", |x| x.powf(-0.25), 0.0, 1.0, 4.0 / 3.0),
        ("sin^2", |x| x.sin().powi(2), 0.0, 2.0 * PI, PI),
        ("1/x", |x| 1.0 / x, 1.0, E, 1.0),
        (
            "damped sine",
            |x| (-x).exp() * x.sin(),
            0.0,
            10.0,
            (1.0 - (-10f64).exp() * (10f64.sin() + 10f64.cos())) / 2.0,
        ),
        ("cosh", f64::cosh, -2.0, 2.0, 2.0 * 2f64.sinh()),
        ("x^9", |x| x.powi(9), -1.0, 2.0, 102.3),
        ("near pole", |x| 1.0 / (x + 0.01), 0.0, 1.0, 101f64.ln()),
    ]
}

fn check_honesty(tol: &Tolerance) {
    for (name, f, a, b, exact) in suite() {
        let r = integrate_1d(f, a, b, tol).unwrap();
        assert!(r.converged, "{name} did not converge");
        let err = (r.value - exact).abs();
        // Rounding in the accumulated sum is not part of the truncation estimate.
        let floor = 8.0 * f64::EPSILON * exact.abs().max(1.0);
        assert!(
            err <= 10.0 * r.error_estimate + floor,
            "{name}: true error {err:e} vs estimate {:e}",
            r.error_estimate
        );
        assert!(r.error_estimate <= tol.bound(r.value));
    }
}

#[test]
fn error_estimates_are_honest_at_default_tolerance() {
    check_honesty(&Tolerance::default());
}

#[test]
fn error_estimates_are_honest_at_loose_tolerance() {
    check_honesty(&Tolerance::new(1e-6, 1e-6, 2000).unwrap());
}

#[test]
fn linearity_within_combined_estimates() {
    let tol = Tolerance::default();
    let (a, b) = (2.5, -0.75);
    let f = |x: f64| (3.0 * x).sin();
    let g = |x: f64| (-x * x).exp();
    let rf = integrate_1d(f, -1.0, 2.0, &tol).unwrap();
    let rg = integrate_1d(g, -1.0, 2.0, &tol).unwrap();
    let rh = integrate_1d(|x| a * f(x) + b * g(x), -1.0, 2.0, &tol).unwrap();
    let combined = a.abs() * rf.error_estimate + b.abs() * rg.error_estimate + rh.error_estimate;
    assert!((rh.value - (a * rf.value + b * rg.value)).abs() <= combined + 1e-15);
}

#[test]
fn radial_integrands_are_swap_symmetric() {
    let tol = Tolerance::default();
    let radial = |x: f64, y: f64| (-(x * x + y * y)).exp() * (1.0 + x * x + y * y).ln_1p();
    let a = integrate_disk(radial, &tol).unwrap();
    let b = integrate_disk(|x, y| radial(y, x), &tol).unwrap();
    assert!((a.value - b.value).abs() <= 1e-12);
}

#[test]
fn repeated_integration_is_bit_identical() {
    let tol = Tolerance::default();
    let f = |x: f64, y: f64| (2.0 * x - y).exp() * (x * y).cos();
    let a = integrate_disk(f, &tol).unwrap();
    let b = integrate_disk(f, &tol).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.error_estimate.to_bits(), b.error_estimate.to_bits());
    assert_eq!(a.evaluations, b.evaluations);
}

#[test]
fn disk_reference_integrals() {
    let tol = Tolerance::default();
    assert!((integrate_disk(|_, _| 1.0, &tol).unwrap().value - PI).abs() < 1e-10);
    assert!(integrate_disk(|x, _| x, &tol).unwrap().value.abs() < 1e-10);
    let i1 = bessel_i(BesselOrder::integer(1).unwrap(), 1.0).unwrap();
    let v = integrate_disk(|x, _| (-x).exp(), &tol).unwrap().value;
    assert!((v / (2.0 * PI * i1) - 1.0).abs() < 1e-8);
    // ∫∫ (x² + y²) = π/2
    let m = integrate_disk(|x, y| x * x + y * y, &tol).unwrap().value;
    assert!((m - PI / 2.0).abs() < 1e-10);
}

#[test]
fn one_dimensional_bures_reduction() {
    // (π/8) ∫ e^{-x} · 2 sinh(2c)/(2c) · c dx with c = √(1-x²), β = (1, 2)
    let tol = Tolerance::default();
    let beta2 = 2.0_f64;
    let f = |x: f64| {
        let c = (1.0 - x * x).max(0.0).sqrt();
        PI / 8.0 * (-x).exp() * (beta2 * c).sinh() * 2.0 / beta2
    };
    let v = integrate_1d(f, -1.0, 1.0, &tol).unwrap().value;
    let b = 5f64.sqrt();
    let exact = PI * PI * bessel_i(BesselOrder::integer(1).unwrap(), b).unwrap() / (4.0 * b);
    assert!((v / exact - 1.0).abs() < 1e-8);
}

#[test]
fn ball_reference_integrals() {
    let tol = Tolerance::default();
    let mass = integrate_ball_bures(|_, _, _| 1.0, &tol).unwrap().value;
    assert!((mass - PI * PI / 8.0).abs() < 1e-9);
    assert!(integrate_ball_bures(|_, _, z| z, &tol).unwrap().value.abs() < 1e-9);
    let i1 = bessel_i(BesselOrder::integer(1).unwrap(), 1.0).unwrap();
    let v = integrate_ball_bures(|_, _, z| (-z).exp(), &tol).unwrap().value;
    assert!((v / (PI * PI * i1 / 4.0) - 1.0).abs() < 1e-7);
}

#[test]
fn ball_quadrature_matches_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_ba11);
    let n = 2_000_000;
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..n {
        let [_, _, z] = common::sample_bures_ball(&mut rng);
        let w = (-z).exp();
        sum += w;
        sum2 += w * w;
    }
    let (mean, se) = common::mean_and_error(sum, sum2, n);
    let mass = PI * PI / 8.0;
    let quad = integrate_ball_bures(|_, _, z| (-z).exp(), &Tolerance::default())
        .unwrap()
        .value;
    assert!((quad - mass * mean).abs() < 4.0 * mass * se, "{quad} vs {}", mass * mean);
}

#[test]
fn nan_integrand_aborts() {
    let err = integrate_1d(|x| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0, &Tolerance::default())
        .unwrap_err();
    assert!(matches!(err, Error::NonFiniteIntegrand { .. }));
}

#[test]
fn exhausted_budget_reports_best_estimate() {
    let tol = Tolerance::new(1e-14, 0.0, 3).unwrap();
    let r = integrate_1d(|x| (1.0 / x).sin(), 1e-3, 1.0, &tol).unwrap();
    assert!(!r.converged);
    assert!(r.value.is_finite() && r.error_estimate > tol.bound(r.value));
    assert!(r.converged_value().is_err());
}

#[test]
fn invalid_tolerances_are_rejected() {
    assert!(Tolerance::new(0.0, 0.0, 10).is_err());
    assert!(Tolerance::new(-1.0, 1e-8, 10).is_err());
    assert!(Tolerance::new(1e-8, f64::NAN, 10).is_err());
    assert!(Tolerance::new(1e-8, 1e-8, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cubics_are_exact(c in prop::array::uniform4(-10.0f64..10.0), a in -5.0f64..5.0, w in 0.1f64..5.0) {
        let b = a + w;
        let p = |x: f64| c[0] + x * (c[1] + x * (c[2] + x * c[3]));
        let anti = |x: f64| x * (c[0] + x * (c[1] / 2.0 + x * (c[2] / 3.0 + x * c[3] / 4.0)));
        let r = integrate_1d(p, a, b, &Tolerance::default()).unwrap();
        let exact = anti(b) - anti(a);
        let scale = c.iter().map(|v| v.abs()).sum::<f64>() * (a.abs() + w).max(1.0).powi(4) * w;
        prop_assert!((r.value - exact).abs() <= 1e-13 * scale);
    }

    #[test]
    fn converged_results_respect_tolerance(k in 0.5f64..20.0, shift in -1.0f64..1.0) {
        let tol = Tolerance::new(1e-9, 1e-9, 2000).unwrap();
        let r = integrate_1d(|x| (k * x + shift).sin() * (-x).exp(), 0.0, 3.0, &tol).unwrap();
        prop_assert!(!r.converged || r.error_estimate <= tol.bound(r.value));
    }

    #[test]
    fn disk_integral_is_rotation_invariant_for_linear_exponent(b in 0.0f64..5.0, t in 0.0f64..TAU) {
        let tol = Tolerance::default();
        let (c, s) = (t.cos(), t.sin());
        let rotated = integrate_disk(|x, y| (-b * (c * x + s * y)).exp(), &tol).unwrap().value;
        let axis = integrate_disk(|x, _| (-b * x).exp(), &tol).unwrap().value;
        prop_assert!((rotated / axis - 1.0).abs() < 1e-9);
    }
}
