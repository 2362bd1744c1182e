//! Jaynesian maximum-entropy model for two noncommuting spin observables.
//!
//! The density matrix is `ρ = exp(Ω·I − λ₁σ₁ − λ₂σ₂)` with `Ω` fixed by
//! normalization. Pauli matrices are taken in the full convention
//! (`σᵢ² = I`), so expectation values lie in `[-1, 1]`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// One of the three Pauli observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliObservable {
    Sigma1,
    Sigma2,
    Sigma3,
}

impl PauliObservable {
    pub fn matrix(self) -> Matrix2 {
        match self {
            PauliObservable::Sigma1 => [[ZERO, ONE], [ONE, ZERO]],
            PauliObservable::Sigma2 => [[ZERO, -I], [I, ZERO]],
            PauliObservable::Sigma3 => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PauliObservable::Sigma1 => "sigma1",
            PauliObservable::Sigma2 => "sigma2",
            PauliObservable::Sigma3 => "sigma3",
        }
    }
}

pub fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn trace(a: &Matrix2) -> Complex64 {
    a[0][0] + a[1][1]
}

/// Multipliers `(λ₁, λ₂)` conjugate to `⟨σ₁⟩` and `⟨σ₂⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangeMultipliers {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl LagrangeMultipliers {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        if !(lambda1.is_finite() && lambda2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Lagrange multipliers must be finite, got ({lambda1}, {lambda2})"
            )));
        }
        Ok(LagrangeMultipliers { lambda1, lambda2 })
    }

    /// Radial magnitude `λ = √(λ₁² + λ₂²)`.
    pub fn magnitude(&self) -> f64 {
        self.lambda1.hypot(self.lambda2)
    }

    /// The normalization multiplier Ω.
    pub fn omega(&self) -> f64 {
        omega(self)
    }
}

/// A 2×2 density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    entries: Matrix2,
}

impl DensityMatrix2 {
    /// Wraps a matrix after checking Hermiticity, unit trace and positivity
    /// to `1e-14`.
    pub fn new(entries: Matrix2) -> Result<Self> {
        const EPS: f64 = 1e-14;
        let herm = (entries[0][1] - entries[1][0].conj()).norm()
            + entries[0][0].im.abs()
            + entries[1][1].im.abs();
        if herm > EPS {
            return Err(Error::InvalidParameter(
                "density matrix is not Hermitian".into(),
            ));
        }
        if (trace(&entries).re - 1.0).abs() > EPS {
            return Err(Error::InvalidParameter(
                "density matrix does not have unit trace".into(),
            ));
        }
        let rho = DensityMatrix2 { entries };
        if rho.eigenvalues()[0] < -EPS {
            return Err(Error::InvalidParameter(
                "density matrix has a negative eigenvalue".into(),
            ));
        }
        Ok(rho)
    }

    pub fn entries(&self) -> &Matrix2 {
        &self.entries
    }

    /// `Tr(ρ A)`.
    pub fn expectation(&self, a: &Matrix2) -> Complex64 {
        trace(&mat_mul(&self.entries, a))
    }

    pub fn observable(&self, sigma: PauliObservable) -> f64 {
        self.expectation(&sigma.matrix()).re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        trace(&mat_mul(&self.entries, &self.entries)).re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.entries[0][0].re;
        let d = self.entries[1][1].re;
        let half_gap = (0.25 * (a - d) * (a - d) + self.entries[0][1].norm_sqr()).sqrt();
        let mid = 0.5 * (a + d);
        [mid - half_gap, mid + half_gap]
    }

    /// Quantum variance `Tr(ρσ²) − Tr(ρσ)²`.
    pub fn variance(&self, sigma: PauliObservable) -> f64 {
        let s = sigma.matrix();
        let m = self.expectation(&s).re;
        self.expectation(&mat_mul(&s, &s)).re - m * m
    }

    /// Symmetrized covariance `½Tr(ρ{A,B}) − Tr(ρA)Tr(ρB)`.
    pub fn covariance(&self, a: PauliObservable, b: PauliObservable) -> f64 {
        let (ma, mb) = (a.matrix(), b.matrix());
        let ab = mat_mul(&ma, &mb);
        let ba = mat_mul(&mb, &ma);
        let anti = 0.5 * (self.expectation(&ab) + self.expectation(&ba)).re;
        anti - self.expectation(&ma).re * self.expectation(&mb).re
    }
}

/// Means, variances, and covariance of `(σ₁, σ₂)` under the
/// maximum-entropy state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalMoments {
    pub mean1: f64,
    pub mean2: f64,
    pub var1: f64,
    pub var2: f64,
    pub cov: f64,
}

/// `tanh(λ)/λ` with its limit 1 at λ = 0.
fn tanh_over(lambda: f64) -> f64 {
    if lambda == 0.0 {
        1.0
    } else {
        lambda.tanh() / lambda
    }
}

/// `Ω = −ln Tr exp(−λ₁σ₁ − λ₂σ₂) = −ln(2 cosh λ)`.
pub fn omega(lams: &LagrangeMultipliers) -> f64 {
    let l = lams.magnitude();
    // ln(2 cosh λ) = λ + ln(1 + e^{-2λ})
    -(l + (-2.0 * l).exp().ln_1p())
}

/// Closed-form `ρ = (I − tanh(λ) n̂·σ) / 2`, n̂ = (λ₁, λ₂)/λ.
pub fn density_matrix(lams: &LagrangeMultipliers) -> DensityMatrix2 {
    let t = tanh_over(lams.magnitude());
    let (m1, m2) = (-lams.lambda1 * t, -lams.lambda2 * t);
    // ρ = (I + ⟨σ₁⟩σ₁ + ⟨σ₂⟩σ₂) / 2
    let off = Complex64::new(0.5 * m1, -0.5 * m2);
    DensityMatrix2 {
        entries: [
            [Complex64::new(0.5, 0.0), off],
            [off.conj(), Complex64::new(0.5, 0.0)],
        ],
    }
}

/// `⟨σᵢ⟩ = −λᵢ tanh(λ)/λ`.
pub fn mean(lams: &LagrangeMultipliers) -> (f64, f64) {
    let t = tanh_over(lams.magnitude());
    (-lams.lambda1 * t, -lams.lambda2 * t)
}

pub fn moments(lams: &LagrangeMultipliers) -> SemiclassicalMoments {
    let (mean1, mean2) = mean(lams);
    SemiclassicalMoments {
        mean1,
        mean2,
        var1: 1.0 - mean1 * mean1,
        var2: 1.0 - mean2 * mean2,
        cov: -mean1 * mean2,
    }
}

/// Multipliers reproducing the target expectation values; the targets must
/// lie strictly inside the unit disk.
pub fn fit(target1: f64, target2: f64) -> Result<LagrangeMultipliers> {
    if !(target1.is_finite() && target2.is_finite()) {
        return Err(Error::domain("semiclassical::fit", "targets must be finite"));
    }
    let m = target1.hypot(target2);
    if m >= 1.0 {
        return Err(Error::domain(
            "semiclassical::fit",
            format!("targets ({target1}, {target2}) must lie inside the unit disk"),
        ));
    }
    if m == 0.0 {
        return Ok(LagrangeMultipliers {
            lambda1: 0.0,
            lambda2: 0.0,
        });
    }
    let lambda = m.atanh();
    Ok(LagrangeMultipliers {
        lambda1: -target1 * lambda / m,
        lambda2: -target2 * lambda / m,
    })
}

/// Matrix exponential by Taylor series with scaling and squaring.
///
/// Independent of the closed forms above; used as a cross-check oracle.
pub fn matrix_exp(a: &Matrix2) -> Matrix2 {
    let norm = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let scaled: Matrix2 = [
        [a[0][0] * scale, a[0][1] * scale],
        [a[1][0] * scale, a[1][1] * scale],
    ];
    let mut result = [[ONE, ZERO], [ZERO, ONE]];
    let mut term = result;
    for k in 1..30 {
        term = mat_mul(&term, &scaled);
        let inv = 1.0 / f64::from(k);
        term.iter_mut().flatten().for_each(|c| *c *= inv);
        result
            .iter_mut()
            .flatten()
            .zip(term.iter().flatten())
            .for_each(|(r, t)| *r += *t);
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result);
    }
    result
}

/// Density matrix built by exponentiating `−λ₁σ₁ − λ₂σ₂` with
/// [`matrix_exp`] and normalizing by its trace.
pub fn density_matrix_by_exponential(lams: &LagrangeMultipliers) -> Matrix2 {
    let s1 = PauliObservable::Sigma1.matrix();
    let s2 = PauliObservable::Sigma2.matrix();
    let mut h = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            h[i][j] = -(s1[i][j] * lams.lambda1 + s2[i][j] * lams.lambda2);
        }
    }
    let e = matrix_exp(&h);
    let z = trace(&e);
    [[e[0][0] / z, e[0][1] / z], [e[1][0] / z, e[1][1] / z]]
}
