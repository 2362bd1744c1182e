//! Quantum-theoretic (Bures-metric) model.
//!
//! Two observables: the Bures volume element on the Bloch ball, integrated
//! over `⟨σ₃⟩`, is the uniform density `π/8` on the unit disk. A Boltzmann
//! factor `e^{-β₁s₁-β₂s₂}` is applied to it and the partition function and
//! moments are integrated numerically.
//!
//! Three observables: the Boltzmann factor is applied to the full volume
//! element `1/(8√(1-|s|²))`. Two reduced disk integrands are provided, the
//! one with `J₀` and the one obtained by integrating out `s₃` directly
//! (`I₀`); the full ball quadrature arbitrates between them.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_1d_vec, integrate_ball_bures, integrate_ball_bures_vec, integrate_disk, QuadResult,
    Tolerance,
};
use crate::specfun::{bessel_i, bessel_j0, bessel_ratio, BesselOrder};

/// Largest |βᵢ| accepted for two observables.
pub const MAX_BETA_2: f64 = 50.0;
/// Largest |βᵢ| accepted for three observables.
pub const MAX_BETA_3: f64 = 10.0;
/// Below this |β₂| the chord integrals use their Taylor expansions.
pub const SMALL_BETA2: f64 = 1e-6;

/// Inverse temperatures `(β₁, β₂)` for the two-observable model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseTemps2 {
    pub beta1: f64,
    pub beta2: f64,
}

impl InverseTemps2 {
    pub fn new(beta1: f64, beta2: f64) -> Result<Self> {
        for b in [beta1, beta2] {
            if !b.is_finite() || b.abs() > MAX_BETA_2 {
                return Err(Error::InvalidParameter(format!(
                    "inverse temperatures must be finite with magnitude <= {MAX_BETA_2}, got ({beta1}, {beta2})"
                )));
            }
        }
        Ok(InverseTemps2 { beta1, beta2 })
    }

    pub fn magnitude(&self) -> f64 {
        self.beta1.hypot(self.beta2)
    }
}

/// Inverse temperatures `(β₁, β₂, β₃)` for the three-observable model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseTemps3 {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

impl InverseTemps3 {
    pub fn new(beta1: f64, beta2: f64, beta3: f64) -> Result<Self> {
        for b in [beta1, beta2, beta3] {
            if !b.is_finite() || b.abs() > MAX_BETA_3 {
                return Err(Error::InvalidParameter(format!(
                    "inverse temperatures must be finite with magnitude <= {MAX_BETA_3}, got ({beta1}, {beta2}, {beta3})"
                )));
            }
        }
        Ok(InverseTemps3 {
            beta1,
            beta2,
            beta3,
        })
    }

    pub fn magnitude(&self) -> f64 {
        (self.beta1 * self.beta1 + self.beta2 * self.beta2 + self.beta3 * self.beta3).sqrt()
    }
}

/// Expectation values `(⟨σ₁⟩, ⟨σ₂⟩, ⟨σ₃⟩)`, inside the closed unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochVector {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl BlochVector {
    pub fn new(s1: f64, s2: f64, s3: f64) -> Result<Self> {
        let n2 = s1 * s1 + s2 * s2 + s3 * s3;
        if !(n2 <= 1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "Bloch vector ({s1}, {s2}, {s3}) lies outside the unit ball"
            )));
        }
        Ok(BlochVector { s1, s2, s3 })
    }

    pub fn norm(&self) -> f64 {
        (self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3).sqrt()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.s1, self.s2, self.s3]
    }
}

/// Boltzmann-weighted moments of `(⟨σ₁⟩, ⟨σ₂⟩)` on the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleMoments {
    pub mean1: f64,
    pub mean2: f64,
    pub var1: f64,
    pub var2: f64,
    pub cov: f64,
    /// Partition function including the `π/8` normalization.
    pub partition: f64,
    /// Quadrature error estimate relative to the partition function.
    pub quadrature_error: f64,
}

/// `sinh u / u` and its first two derivatives.
fn chord_kernels(u: f64) -> [f64; 3] {
    if u.abs() < 1.0 {
        // Σ u^{2k}/(2k+1)!, Σ 2k u^{2k-1}/(2k+1)!, Σ 2k(2k-1) u^{2k-2}/(2k+1)!
        let u2 = u * u;
        let (mut phi0, mut phi1, mut phi2) = (1.0, 0.0, 0.0);
        let mut even = 1.0; // u^{2k-2}
        let mut fact = 1.0; // (2k+1)!
        for k in 1..20 {
            let two_k = 2.0 * f64::from(k);
            fact *= two_k * (two_k + 1.0);
            phi2 += two_k * (two_k - 1.0) * even / fact;
            phi1 += two_k * even * u / fact;
            phi0 += even * u2 / fact;
            even *= u2;
        }
        return [phi0, phi1, phi2];
    }
    let (sh, ch) = (u.sinh(), u.cosh());
    [
        sh / u,
        (u * ch - sh) / (u * u),
        ((u * u + 2.0) * sh - 2.0 * u * ch) / (u * u * u),
    ]
}

/// `∫ yᵏ e^{-b y} dy` over `|y| ≤ s`, for k = 0, 1, 2.
fn chord_moments(b: f64, s: f64) -> [f64; 3] {
    let [p0, p1, p2] = chord_kernels(b * s);
    [2.0 * s * p0, -2.0 * s * s * p1, 2.0 * s * s * s * p2]
}

fn check_disk_point(function: &'static str, x: f64, y: f64) -> Result<f64> {
    let r2 = x * x + y * y;
    if !(r2 <= 1.0) {
        return Err(Error::domain(
            function,
            format!("point ({x}, {y}) lies outside the unit disk"),
        ));
    }
    Ok(r2)
}

/// Boltzmann-weighted uniform disk density integrated over `⟨σ₂⟩`:
/// `e^{-β₁x} π sinh(β₂√(1-x²)) / (4β₂)`.
pub fn marginal_density(x: f64, temps: &InverseTemps2) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(Error::domain(
            "marginal_density",
            format!("|x| must not exceed 1, got {x}"),
        ));
    }
    let s = (1.0 - x * x).sqrt();
    let boltzmann = (-temps.beta1 * x).exp();
    let b = temps.beta2;
    if b.abs() < SMALL_BETA2 {
        return Ok(FRAC_PI_4 * s * boltzmann * (1.0 + b * b * s * s / 6.0));
    }
    Ok(boltzmann * PI * (b * s).sinh() / (4.0 * b))
}

/// Partition function: the marginal density integrated over `x ∈ [-1, 1]`.
///
/// The integration variable is `x = sin θ`, which removes the square-root
/// behavior of the chord at `x = ±1`.
pub fn partition_2(temps: &InverseTemps2, tol: &Tolerance) -> Result<QuadResult> {
    let r = integrate_1d_vec(
        |theta| {
            let (x, c) = theta.sin_cos();
            Ok([marginal_density(x, temps)? * c])
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        tol,
    )?;
    Ok(QuadResult {
        value: r.values[0],
        error_estimate: r.error_estimate,
        evaluations: r.evaluations,
        converged: r.converged,
    })
}

/// Closed form `π² I₁(β) / (4β)` of the two-observable partition function.
pub fn partition_2_closed(temps: &InverseTemps2) -> Result<f64> {
    let beta = temps.magnitude();
    if beta == 0.0 {
        return Ok(PI * PI / 8.0);
    }
    Ok(PI * PI * bessel_i(BesselOrder::integer(1)?, beta)? / (4.0 * beta))
}

/// Means, variances and covariance of `(⟨σ₁⟩, ⟨σ₂⟩)` under the
/// Boltzmann-weighted uniform disk density.
///
/// One adaptive pass in `x = sin θ`; the `y` integrals are elementary.
pub fn moments_2(temps: &InverseTemps2, tol: &Tolerance) -> Result<EnsembleMoments> {
    let r = integrate_1d_vec(
        |theta| {
            let (x, c) = theta.sin_cos();
            let [m0, m1, m2] = chord_moments(temps.beta2, c);
            let w = FRAC_PI_8 * (-temps.beta1 * x).exp() * c;
            Ok([
                w * m0,
                w * x * m0,
                w * m1,
                w * x * x * m0,
                w * x * m1,
                w * m2,
            ])
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        tol,
    )?;
    if !r.converged {
        return Err(Error::QuadratureFailed {
            value: r.values[0],
            error_estimate: r.error_estimate,
        });
    }
    let [z, sx, sy, sxx, sxy, syy] = r.values;
    let mean1 = sx / z;
    let mean2 = sy / z;
    Ok(EnsembleMoments {
        mean1,
        mean2,
        var1: sxx / z - mean1 * mean1,
        var2: syy / z - mean2 * mean2,
        cov: sxy / z - mean1 * mean2,
        partition: z,
        quadrature_error: r.error_estimate / z,
    })
}

/// Radial closed form of the mean: `-(βᵢ/β) · I₂(β)/I₁(β)`.
pub fn closed_mean_2(temps: &InverseTemps2) -> Result<(f64, f64)> {
    let beta = temps.magnitude();
    if beta == 0.0 {
        return Ok((0.0, 0.0));
    }
    let r = bessel_ratio(BesselOrder::integer(2)?, beta)?;
    Ok((-temps.beta1 / beta * r, -temps.beta2 / beta * r))
}

/// Reduced three-observable integrand with `J₀(β₃√(x²+y²))`.
pub fn reduced_integrand_3_paper(x: f64, y: f64, temps: &InverseTemps3) -> Result<f64> {
    let r2 = check_disk_point("reduced_integrand_3_paper", x, y)?;
    let j0 = bessel_j0(temps.beta3.abs() * r2.sqrt())?;
    Ok(FRAC_PI_8 * (-temps.beta1 * x - temps.beta2 * y).exp() * j0)
}

/// Reduced three-observable integrand from integrating `s₃` out of the
/// Bures element: `(π/8) e^{-β₁x-β₂y} I₀(β₃√(1-x²-y²))`.
pub fn reduced_integrand_3_direct(x: f64, y: f64, temps: &InverseTemps3) -> Result<f64> {
    let r2 = check_disk_point("reduced_integrand_3_direct", x, y)?;
    let i0 = bessel_i(
        BesselOrder::integer(0)?,
        temps.beta3.abs() * (1.0 - r2).max(0.0).sqrt(),
    )?;
    Ok(FRAC_PI_8 * (-temps.beta1 * x - temps.beta2 * y).exp() * i0)
}

/// Integrand used for the three-observable partition function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegrandChoice {
    /// The `J₀` disk form.
    Paper,
    /// The `I₀` disk form.
    Direct,
    /// Full ball quadrature of the Bures element; the reference.
    Full3d,
}

impl IntegrandChoice {
    pub const ALL: [IntegrandChoice; 3] = [
        IntegrandChoice::Paper,
        IntegrandChoice::Direct,
        IntegrandChoice::Full3d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IntegrandChoice::Paper => "paper",
            IntegrandChoice::Direct => "direct",
            IntegrandChoice::Full3d => "full3d",
        }
    }
}

fn disk_with_errors<F>(mut f: F, tol: &Tolerance) -> Result<QuadResult>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    // The disk driver takes an infallible closure; errors are held aside.
    let mut first_error = None;
    let r = integrate_disk(
        |x, y| match f(x, y) {
            Ok(v) => v,
            Err(e) => {
                first_error.get_or_insert(e);
                0.0
            }
        },
        tol,
    )?;
    match first_error {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

pub fn partition_3(
    temps: &InverseTemps3,
    tol: &Tolerance,
    choice: IntegrandChoice,
) -> Result<QuadResult> {
    match choice {
        IntegrandChoice::Paper => {
            disk_with_errors(|x, y| reduced_integrand_3_paper(x, y, temps), tol)
        }
        IntegrandChoice::Direct => {
            disk_with_errors(|x, y| reduced_integrand_3_direct(x, y, temps), tol)
        }
        IntegrandChoice::Full3d => integrate_ball_bures(
            |x, y, z| (-temps.beta1 * x - temps.beta2 * y - temps.beta3 * z).exp(),
            tol,
        ),
    }
}

/// Mean Bloch vector under the Bures element with a trivariate Boltzmann
/// factor, by full ball quadrature.
pub fn mean_3(temps: &InverseTemps3, tol: &Tolerance) -> Result<BlochVector> {
    let r = integrate_ball_bures_vec(
        |x, y, z| {
            let w = (-temps.beta1 * x - temps.beta2 * y - temps.beta3 * z).exp();
            Ok([w, w * x, w * y, w * z])
        },
        tol,
    )?;
    if !r.converged {
        return Err(Error::QuadratureFailed {
            value: r.values[0],
            error_estimate: r.error_estimate,
        });
    }
    let z = r.values[0];
    BlochVector::new(r.values[1] / z, r.values[2] / z, r.values[3] / z)
}

/// Closed form `-(βᵢ/β) I₂(β)/I₁(β)` of the three-observable mean.
pub fn closed_mean_3(temps: &InverseTemps3) -> Result<BlochVector> {
    let beta = temps.magnitude();
    if beta == 0.0 {
        return Ok(BlochVector {
            s1: 0.0,
            s2: 0.0,
            s3: 0.0,
        });
    }
    let r = bessel_ratio(BesselOrder::integer(2)?, beta)? / beta;
    BlochVector::new(-temps.beta1 * r, -temps.beta2 * r, -temps.beta3 * r)
}

/// Which reduced disk integrands reproduce the full ball quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Both,
    Direct,
    Paper,
    Neither,
}

/// Three-way comparison of the partition function integrands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedFormComparison {
    pub temps: InverseTemps3,
    pub paper: f64,
    pub direct: f64,
    pub full3d: f64,
    pub paper_error_estimate: f64,
    pub direct_error_estimate: f64,
    pub full3d_error_estimate: f64,
    pub paper_minus_full3d: f64,
    pub direct_minus_full3d: f64,
    pub paper_minus_direct: f64,
    pub paper_relative_to_full3d: f64,
    pub direct_relative_to_full3d: f64,
    /// Relative agreement required to call a reduced form a match.
    pub match_tolerance: f64,
    pub verdict: Verdict,
}

/// Relative agreement demanded of a reduced form by [`compare_reduced_forms`].
pub const MATCH_TOLERANCE: f64 = 1e-8;

pub fn compare_reduced_forms(
    temps: &InverseTemps3,
    tol: &Tolerance,
) -> Result<ReducedFormComparison> {
    let paper = partition_3(temps, tol, IntegrandChoice::Paper)?.converged_value_with_error()?;
    let direct = partition_3(temps, tol, IntegrandChoice::Direct)?.converged_value_with_error()?;
    let full = partition_3(temps, tol, IntegrandChoice::Full3d)?.converged_value_with_error()?;
    let rel = |a: f64| (a - full.0) / full.0;
    let paper_ok = rel(paper.0).abs() <= MATCH_TOLERANCE;
    let direct_ok = rel(direct.0).abs() <= MATCH_TOLERANCE;
    let verdict = match (paper_ok, direct_ok) {
        (true, true) => Verdict::Both,
        (false, true) => Verdict::Direct,
        (true, false) => Verdict::Paper,
        (false, false) => Verdict::Neither,
    };
    Ok(ReducedFormComparison {
        temps: *temps,
        paper: paper.0,
        direct: direct.0,
        full3d: full.0,
        paper_error_estimate: paper.1,
        direct_error_estimate: direct.1,
        full3d_error_estimate: full.1,
        paper_minus_full3d: paper.0 - full.0,
        direct_minus_full3d: direct.0 - full.0,
        paper_minus_direct: paper.0 - direct.0,
        paper_relative_to_full3d: rel(paper.0),
        direct_relative_to_full3d: rel(direct.0),
        match_tolerance: MATCH_TOLERANCE,
        verdict,
    })
}

trait ConvergedPair {
    fn converged_value_with_error(&self) -> Result<(f64, f64)>;
}

impl ConvergedPair for QuadResult {
    fn converged_value_with_error(&self) -> Result<(f64, f64)> {
        Ok((self.converged_value()?, self.error_estimate))
    }
}
