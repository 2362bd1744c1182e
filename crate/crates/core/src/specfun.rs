//! Modified Bessel functions of the first kind, Bessel `J0`, and the
//! D-vector family of magnetization laws `I_{D/2}(β) / I_{D/2-1}(β)`.
//!
//! Evaluation paths:
//! - integer orders use the power series below [`SERIES_LIMIT`] and the
//!   exponentially scaled Hankel expansion of `I_0` above it, lifted to
//!   higher orders by a product of ratios;
//! - half-integer orders start from the elementary forms of `I_{±1/2}`;
//! - ratios `I_ν / I_{ν-1}` come from the Gauss continued fraction, or from
//!   the quotient of two scaled asymptotic series for very large arguments.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};

/// Below this argument integer orders are summed from the power series.
pub const SERIES_LIMIT: f64 = 20.0;
/// At and above this argument ratios use the asymptotic quotient.
pub const RATIO_ASYMPTOTIC_LIMIT: f64 = 1000.0;
/// At and above this argument `J0` uses the Hankel expansion.
pub const J0_ASYMPTOTIC_LIMIT: f64 = 25.0;
/// Largest supported order, stored doubled.
pub const MAX_TWICE_ORDER: i32 = 200;

/// Order ν of a Bessel function, restricted to integers and half-integers.
///
/// Stored as `2ν` so that both cases are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BesselOrder {
    twice: i32,
}

impl BesselOrder {
    /// Order `twice / 2`; supported range is `[-1/2, MAX_TWICE_ORDER / 2]`.
    pub fn from_twice(twice: i32) -> Result<Self> {
        if !(-1..=MAX_TWICE_ORDER).contains(&twice) {
            return Err(Error::InvalidParameter(format!(
                "Bessel order {}/2 outside supported range [-1/2, {}]",
                twice,
                MAX_TWICE_ORDER / 2
            )));
        }
        Ok(BesselOrder { twice })
    }

    pub fn integer(n: i32) -> Result<Self> {
        Self::from_twice(n.saturating_mul(2))
    }

    /// Order `numerator / denominator` with denominator 1 or 2.
    pub fn new(numerator: i32, denominator: i32) -> Result<Self> {
        match denominator {
            1 => Self::integer(numerator),
            2 => Self::from_twice(numerator),
            _ => Err(Error::InvalidParameter(format!(
                "Bessel order denominator must be 1 or 2, got {denominator}"
            ))),
        }
    }

    pub fn twice(self) -> i32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }
}

/// Dimension `D ≥ 1` of the D-vector model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelDimension(u32);

impl ModelDimension {
    pub fn new(d: u32) -> Result<Self> {
        if d == 0 || d > MAX_TWICE_ORDER as u32 {
            return Err(Error::InvalidParameter(format!(
                "model dimension must lie in [1, {MAX_TWICE_ORDER}], got {d}"
            )));
        }
        Ok(ModelDimension(d))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// The numerator order `D/2` of the magnetization ratio.
    pub fn order(self) -> BesselOrder {
        BesselOrder { twice: self.0 as i32 }
    }
}

/// Magnetization `-E` of a D-vector law: in `[0, 1)` for β ≥ 0, odd in β.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Magnetization(f64);

impl Magnetization {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Magnetization> for f64 {
    fn from(m: Magnetization) -> f64 {
        m.0
    }
}

fn check_argument(function: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(
            function,
            format!("argument must be finite and non-negative, got {x}"),
        ));
    }
    Ok(())
}

/// Power series for `I_n(x)`, integer `n ≥ 0`. All terms are positive.
fn series_integer(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / f64::from(k);
    }
    if term == 0.0 {
        return 0.0;
    }
    let mut sum = term;
    for k in 1..2000u32 {
        term *= q / (f64::from(k) * f64::from(k + n));
        sum += term;
        if term <= 0.5 * f64::EPSILON * sum {
            break;
        }
    }
    sum
}

/// Hankel expansion of `e^{-x} I_ν(x)`. `None` if the divergent tail is
/// reached before the terms fall below machine precision.
fn asymptotic_scaled(nu: f64, x: f64) -> Option<f64> {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for k in 1..400u32 {
        let odd = f64::from(2 * k - 1);
        term *= -(mu - odd * odd) / (8.0 * f64::from(k) * x);
        sum += term;
        if term.abs() <= 0.5 * f64::EPSILON * sum.abs() {
            return Some(sum / (2.0 * PI * x).sqrt());
        }
        if term.abs() > 1e12 {
            return None;
        }
    }
    None
}

/// `I_ν(x) / I_{ν-1}(x)` by the Gauss continued fraction.
///
/// Modified Lentz finds the depth at which the fraction converges; the
/// fraction is then summed backward from beyond that depth, which avoids the
/// rounding that accumulates in the forward product.
fn ratio_continued_fraction(nu: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let b = |k: usize| 2.0 * (nu + k as f64) / x;
    let mut c = b(0);
    if c == 0.0 {
        c = TINY;
    }
    let mut d = 0.0;
    let max_iter = 10 * (x as usize) + 1000;
    let mut delta = 0.0;
    for k in 1..max_iter {
        let bk = b(k);
        d += bk;
        if d == 0.0 {
            d = TINY;
        }
        d = 1.0 / d;
        c = bk + 1.0 / c;
        if c == 0.0 {
            c = TINY;
        }
        delta = c * d;
        if (delta - 1.0).abs() <= f64::EPSILON {
            let depth = 2 * k + 10;
            let mut t = b(depth);
            for j in (0..depth).rev() {
                t = b(j) + 1.0 / t;
            }
            return Ok(1.0 / t);
        }
    }
    Err(Error::NoConvergence {
        solver: "Bessel ratio continued fraction",
        iterations: max_iter,
        residual: (delta - 1.0).abs(),
    })
}

/// Ratio `I_ν(x) / I_{ν-1}(x)` for ν ≥ 1/2 and x > 0.
///
/// Never forms either Bessel value, so it is finite for every finite `x`.
pub fn bessel_ratio(order: BesselOrder, x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(
            "bessel_ratio",
            format!("argument must be finite and positive, got {x}"),
        ));
    }
    if order.twice < 1 {
        return Err(Error::domain(
            "bessel_ratio",
            format!("order must be at least 1/2, got {}", order.value()),
        ));
    }
    let nu = order.value();
    if x >= RATIO_ASYMPTOTIC_LIMIT {
        if let (Some(num), Some(den)) = (asymptotic_scaled(nu, x), asymptotic_scaled(nu - 1.0, x))
        {
            return Ok(num / den);
        }
    }
    // The ratio is below 1; rounding near saturation can overshoot.
    Ok(ratio_continued_fraction(nu, x)?.min(1.0))
}

/// Product `I_ν / I_{ν0}` of consecutive ratios, ν0 < ν in unit steps.
fn ratio_product(from_twice: i32, to_twice: i32, x: f64) -> Result<f64> {
    let mut product = 1.0;
    let mut twice = from_twice + 2;
    while twice <= to_twice {
        product *= bessel_ratio(BesselOrder { twice }, x)?;
        twice += 2;
    }
    Ok(product)
}

/// `e^{-x} I_ν(x)`, finite for every finite `x ≥ 0`.
pub fn bessel_i_scaled(order: BesselOrder, x: f64) -> Result<f64> {
    check_argument("bessel_i_scaled", x)?;
    if order.is_integer() {
        let n = order.twice / 2;
        if x == 0.0 {
            return Ok(if n == 0 { 1.0 } else { 0.0 });
        }
        if x < SERIES_LIMIT {
            return Ok(series_integer(n as u32, x) * (-x).exp());
        }
        let base = asymptotic_scaled(0.0, x).ok_or(Error::NoConvergence {
            solver: "I0 asymptotic expansion",
            iterations: 400,
            residual: f64::NAN,
        })?;
        return Ok(base * ratio_product(0, order.twice, x)?);
    }
    if x == 0.0 {
        return if order.twice == -1 {
            Err(Error::domain("bessel_i_scaled", "I_{-1/2} diverges at 0"))
        } else {
            Ok(0.0)
        };
    }
    let prefactor = (2.0 / (PI * x)).sqrt();
    let em2x = (-2.0 * x).exp();
    if order.twice == -1 {
        return Ok(prefactor * 0.5 * (1.0 + em2x));
    }
    let base = prefactor * 0.5 * -(-2.0 * x).exp_m1();
    Ok(base * ratio_product(1, order.twice, x)?)
}

/// Modified Bessel function of the first kind `I_ν(x)`.
///
/// Returns [`Error::Overflow`] when the value exceeds the `f64` range;
/// use [`bessel_i_scaled`] there.
pub fn bessel_i(order: BesselOrder, x: f64) -> Result<f64> {
    check_argument("bessel_i", x)?;
    if order.is_integer() && x < SERIES_LIMIT {
        return Ok(series_integer((order.twice / 2) as u32, x));
    }
    if !order.is_integer() {
        if x == 0.0 {
            return bessel_i_scaled(order, x);
        }
        if x < 700.0 {
            let prefactor = (2.0 / (PI * x)).sqrt();
            if order.twice == -1 {
                return Ok(prefactor * x.cosh());
            }
            return Ok(prefactor * x.sinh() * ratio_product(1, order.twice, x)?);
        }
    }
    let scaled = bessel_i_scaled(order, x)?;
    let half = (0.5 * x).exp();
    let value = scaled * half * half;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow {
            function: "bessel_i",
            x,
        })
    }
}

/// Bessel function of the first kind `J_0(x)`, x ≥ 0.
///
/// Uses the periodic trapezoidal rule on `(1/π) ∫_0^π cos(x sin θ) dθ`,
/// whose error is `2 Σ J_{2mN}(x)`, and the Hankel expansion for large x.
pub fn bessel_j0(x: f64) -> Result<f64> {
    check_argument("bessel_j0", x)?;
    if x < J0_ASYMPTOTIC_LIMIT {
        let n = (0.5 * x).ceil() as usize + 24;
        let step = PI / n as f64;
        let sum: f64 = (0..n).map(|k| (x * (step * k as f64).sin()).cos()).sum();
        return Ok(sum / n as f64);
    }
    // P and Q from the shared term sequence t_k = Π(μ - (2j-1)²) / (k! (8x)^k), μ = 0.
    let mut term = 1.0_f64;
    let mut p = 1.0;
    let mut q = 0.0;
    for k in 1..200u32 {
        let odd = f64::from(2 * k - 1);
        let next = term * -(odd * odd) / (8.0 * f64::from(k) * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        let contribution = if (k / 2) % 2 == 0 { term } else { -term };
        if k % 2 == 0 {
            p += contribution;
        } else {
            q += contribution;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - FRAC_PI_4;
    Ok((2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin()))
}

/// D-vector magnetization law `-E = I_{D/2}(β) / I_{D/2-1}(β)`, odd in β.
///
/// D = 1 is the Brillouin function `tanh β`, D = 3 the Langevin function,
/// D = 4 the Bures-metric alternative `I_2/I_1`, D = 6 the quaternionic law.
pub fn magnetization(dim: ModelDimension, beta: f64) -> Result<Magnetization> {
    if !beta.is_finite() {
        return Err(Error::domain(
            "magnetization",
            format!("beta must be finite, got {beta}"),
        ));
    }
    if beta == 0.0 {
        return Ok(Magnetization(0.0));
    }
    let r = bessel_ratio(dim.order(), beta.abs())?;
    Ok(Magnetization(r.copysign(beta)))
}

/// `d/dβ` of [`magnetization`], from `R' = 1 - (D-1) R / β - R²`.
pub fn magnetization_slope(dim: ModelDimension, beta: f64) -> Result<f64> {
    if !beta.is_finite() {
        return Err(Error::domain(
            "magnetization_slope",
            format!("beta must be finite, got {beta}"),
        ));
    }
    let d = f64::from(dim.get());
    let b = beta.abs();
    if dim.get() == 1 {
        // 1 - tanh² cancels completely once tanh rounds to 1.
        return Ok(1.0 / b.cosh().powi(2));
    }
    if b < 1e-4 {
        // R = β/D - β³/(D²(D+2)) + O(β⁵)
        return Ok(1.0 / d - 3.0 * b * b / (d * d * (d + 2.0)));
    }
    let r = bessel_ratio(dim.order(), b)?;
    Ok(1.0 - (d - 1.0) * r / b - r * r)
}

/// Heat capacity `C = β² · d(-E)/dβ` with temperature `T = 1/β`.
pub fn heat_capacity(dim: ModelDimension, beta: f64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::domain(
            "heat_capacity",
            format!("beta must be non-negative, got {beta}"),
        ));
    }
    Ok(beta * beta * magnetization_slope(dim, beta)?)
}

/// Brillouin function `tanh β`.
pub fn brillouin(beta: f64) -> f64 {
    beta.tanh()
}

/// Langevin function `coth β - 1/β`, as the D = 3 ratio.
pub fn langevin(beta: f64) -> Result<f64> {
    magnetization(ModelDimension(3), beta).map(f64::from)
}

/// Bures-metric alternative to the Brillouin function, `I_2(β)/I_1(β)`.
pub fn quantum_alternative(beta: f64) -> Result<f64> {
    magnetization(ModelDimension(4), beta).map(f64::from)
}

/// Quaternionic two-level law `I_3(β)/I_2(β)`.
pub fn quaternionic(beta: f64) -> Result<f64> {
    magnetization(ModelDimension(6), beta).map(f64::from)
}
