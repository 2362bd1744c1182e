//! Invariant suite run by the `selftest` subcommand.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::analysis::{self, find_max_difference_with};
use crate::bures_model::{
    self, closed_mean_2, compare_reduced_forms, moments_2, partition_2, partition_2_closed,
    InverseTemps2, InverseTemps3, Verdict,
};
use crate::error::Result;
use crate::quadrature::{integrate_1d, integrate_disk, Tolerance};
use crate::semiclassical::{self, LagrangeMultipliers, PauliObservable};
use crate::specfun::{self, bessel_ratio, BesselOrder, ModelDimension};

pub type RatioFn = fn(BesselOrder, f64) -> Result<f64>;

/// Replaceable internals, used to check that the suite catches faults.
#[derive(Clone, Copy)]
pub struct Hooks {
    pub ratio: RatioFn,
}

impl Default for Hooks {
    fn default() -> Self {
        Hooks {
            ratio: bessel_ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfTestReport {
    pub checks: Vec<CheckOutcome>,
}

impl SelfTestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status}  {:width$}  {}", c.name, c.detail);
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.checks.len());
        out
    }
}

/// Measured error against a bound.
fn bounded(name: &'static str, error: Result<f64>, bound: f64) -> CheckOutcome {
    match error {
        Ok(e) => CheckOutcome {
            name,
            passed: e <= bound,
            detail: format!("error {e:.3e} (bound {bound:.0e})"),
        },
        Err(err) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {err}"),
        },
    }
}

fn max_over<I, F>(items: I, mut f: F) -> Result<f64>
where
    I: IntoIterator,
    F: FnMut(I::Item) -> Result<f64>,
{
    let mut worst = 0.0_f64;
    for item in items {
        let e = f(item)?;
        if !(e <= worst) {
            worst = if e.is_nan() { f64::INFINITY } else { e };
        }
    }
    Ok(worst)
}

fn half_order_identity(hooks: &Hooks) -> Result<f64> {
    let half = BesselOrder::new(1, 2)?;
    max_over([0.1, 0.5, 1.0, 2.0, 5.0, 10.0], |b: f64| {
        Ok((b.tanh() - (hooks.ratio)(half, b)?).abs())
    })
}

fn ratio_recurrence() -> Result<f64> {
    // I_{ν-1} − I_{ν+1} = (2ν/x) I_ν, written in ratios.
    max_over([(1, 0.7), (2, 3.0), (3, 15.0), (5, 40.0)], |(n, x)| {
        let r = bessel_ratio(BesselOrder::integer(n)?, x)?;
        let r1 = bessel_ratio(BesselOrder::integer(n + 1)?, x)?;
        Ok((1.0 - r * r1 - 2.0 * n as f64 / x * r).abs())
    })
}

fn magnetization_shape() -> Result<f64> {
    max_over(1..=4, |d| {
        let dim = ModelDimension::new(d)?;
        let at_zero = specfun::magnetization(dim, 0.0)?.value().abs();
        let odd = (specfun::magnetization(dim, 1.3)?.value()
            + specfun::magnetization(dim, -1.3)?.value())
        .abs();
        let slope = (specfun::magnetization_slope(dim, 0.0)? - 1.0 / d as f64).abs();
        Ok(at_zero.max(odd).max(slope))
    })
}

fn heat_capacity_limit() -> Result<f64> {
    let c = specfun::heat_capacity(ModelDimension::new(4)?, 200.0)?;
    Ok((c - 1.5).abs() / 1.5)
}

fn j0_zero() -> Result<f64> {
    Ok(specfun::bessel_j0(2.404_825_557_695_773)?.abs())
}

fn quadrature_basics(tol: &Tolerance) -> Result<f64> {
    let poly = integrate_1d(|x| x.powi(5), 0.0, 1.0, tol)?.converged_value()?;
    let area = integrate_disk(|_, _| 1.0, tol)?.converged_value()?;
    Ok((poly - 1.0 / 6.0).abs().max((area - PI).abs()))
}

fn semiclassical_oracle() -> Result<f64> {
    max_over([(0.3, -1.2), (2.5, 0.7), (-1.9, -2.8)], |(l1, l2)| {
        let lams = LagrangeMultipliers::new(l1, l2)?;
        let rho = semiclassical::density_matrix_by_exponential(&lams);
        let m = semiclassical::moments(&lams);
        let t = |s: PauliObservable| semiclassical::trace(&semiclassical::mat_mul(&rho, &s.matrix())).re;
        let e1 = (m.mean1 - t(PauliObservable::Sigma1)).abs();
        let e2 = (m.mean2 - t(PauliObservable::Sigma2)).abs();
        let back = semiclassical::fit(m.mean1, m.mean2)?;
        let e3 = (back.lambda1 - l1).abs().max((back.lambda2 - l2).abs());
        Ok(e1.max(e2).max(e3))
    })
}

fn bures_partition(tol: &Tolerance) -> Result<f64> {
    max_over([(0.0, 0.0), (3.0, -4.0), (-5.0, 5.0)], |(b1, b2)| {
        let temps = InverseTemps2::new(b1, b2)?;
        let z = partition_2(&temps, tol)?.converged_value()?;
        let exact = partition_2_closed(&temps)?;
        Ok((z / exact - 1.0).abs())
    })
}

fn bures_origin_variance(tol: &Tolerance) -> Result<f64> {
    let m = moments_2(&InverseTemps2::new(0.0, 0.0)?, tol)?;
    Ok((m.var1 - 0.25).abs().max((m.var2 - 0.25).abs()).max(m.cov.abs()))
}

fn bures_thermo(tol: &Tolerance) -> Result<f64> {
    let (b1, b2, h) = (1.2, -0.7, 1e-4);
    let ln_z = |x: f64, y: f64| -> Result<f64> {
        Ok(partition_2_closed(&InverseTemps2::new(x, y)?)?.ln())
    };
    let m = moments_2(&InverseTemps2::new(b1, b2)?, tol)?;
    let d1 = -(ln_z(b1 + h, b2)? - ln_z(b1 - h, b2)?) / (2.0 * h);
    let d2 = -(ln_z(b1, b2 + h)? - ln_z(b1, b2 - h)?) / (2.0 * h);
    Ok(((d1 - m.mean1) / m.mean1).abs().max(((d2 - m.mean2) / m.mean2).abs()))
}

fn bures_single_observable(tol: &Tolerance) -> Result<f64> {
    max_over([0.5, 1.0, 2.0, 5.0], |b: f64| {
        let m = moments_2(&InverseTemps2::new(b, 0.0)?, tol)?;
        Ok((m.mean1 + bessel_ratio(BesselOrder::integer(2)?, b)?).abs())
    })
}

fn bures_three_observable(tol: &Tolerance) -> Result<f64> {
    let temps = InverseTemps3::new(0.0, 0.0, 1.0)?;
    let report = compare_reduced_forms(&temps, tol)?;
    if !matches!(report.verdict, Verdict::Direct | Verdict::Both) {
        return Ok(f64::INFINITY);
    }
    let m = bures_model::mean_3(&temps, tol)?;
    let c = bures_model::closed_mean_3(&temps)?;
    let mean_err = m
        .as_array()
        .iter()
        .zip(c.as_array())
        .fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()));
    Ok((report.direct - report.full3d).abs().max(mean_err))
}

fn fig1_extremum(hooks: &Hooks) -> Result<f64> {
    let r = find_max_difference_with(hooks.ratio)?;
    Ok(((r.argmax - 1.45489).abs() / 1e-3).max((r.max_value - 0.561292).abs() / 1e-4))
}

fn bures_fit(tol: &Tolerance) -> Result<f64> {
    max_over([(2.0, 1.0), (-0.5, 3.0)], |(b1, b2)| {
        let (t1, t2) = closed_mean_2(&InverseTemps2::new(b1, b2)?)?;
        let fitted = analysis::fit_bures(t1, t2, tol)?;
        Ok((fitted.beta1 - b1).abs().max((fitted.beta2 - b2).abs()))
    })
}

/// Runs every check with the given hooks.
pub fn run(hooks: &Hooks) -> SelfTestReport {
    let tol = Tolerance::default();
    let checks = vec![
        bounded("half-order-ratio-identity", half_order_identity(hooks), 1e-12),
        bounded("bessel-ratio-recurrence", ratio_recurrence(), 1e-12),
        bounded("magnetization-parity-and-slope", magnetization_shape(), 1e-12),
        bounded("heat-capacity-ground-state", heat_capacity_limit(), 0.02),
        bounded("bessel-j0-first-zero", j0_zero(), 1e-14),
        bounded("quadrature-reference-integrals", quadrature_basics(&tol), 1e-10),
        bounded("semiclassical-matrix-oracle", semiclassical_oracle(), 1e-10),
        bounded("bures-partition-closed-form", bures_partition(&tol), 1e-8),
        bounded("bures-origin-moments", bures_origin_variance(&tol), 1e-8),
        bounded("bures-thermodynamic-consistency", bures_thermo(&tol), 1e-5),
        bounded("bures-single-observable", bures_single_observable(&tol), 1e-8),
        bounded("bures-three-observable-reduction", bures_three_observable(&tol), 1e-5),
        bounded("curve-difference-extremum", fig1_extremum(hooks), 1.0),
        bounded("bures-fit-roundtrip", bures_fit(&tol), 1e-6),
    ];
    SelfTestReport { checks }
}
