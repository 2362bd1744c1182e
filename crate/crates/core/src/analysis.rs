//! Curves, surfaces, quantum-minus-semiclassical difference maps, the
//! extremum of the Brillouin/Bures curve difference, and inverse
//! temperature fitting for the Bures model.

use rayon::prelude::*;
use serde::Serialize;

use crate::bures_model::{moments_2, partition_2, InverseTemps2, MAX_BETA_2};
use crate::error::{Error, Result};
use crate::quadrature::Tolerance;
use crate::semiclassical::{self, LagrangeMultipliers};
use crate::specfun::{bessel_ratio, BesselOrder};

/// Rectangular grid over `(β₁, β₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub min1: f64,
    pub max1: f64,
    pub steps1: usize,
    pub min2: f64,
    pub max2: f64,
    pub steps2: usize,
}

impl GridSpec {
    pub fn new(
        (min1, max1, steps1): (f64, f64, usize),
        (min2, max2, steps2): (f64, f64, usize),
    ) -> Result<Self> {
        for (lo, hi, n) in [(min1, max1, steps1), (min2, max2, steps2)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidParameter(format!(
                    "grid axis must satisfy min < max, got [{lo}, {hi}]"
                )));
            }
            if n < 2 {
                return Err(Error::InvalidParameter(format!(
                    "grid axis needs at least 2 steps, got {n}"
                )));
            }
        }
        if steps1.saturating_mul(steps2) > 1_000_000 {
            return Err(Error::InvalidParameter(format!(
                "grid has {} points, limit is 1e6",
                steps1.saturating_mul(steps2)
            )));
        }
        Ok(GridSpec {
            min1,
            max1,
            steps1,
            min2,
            max2,
            steps2,
        })
    }

    /// Square grid `[-half_width, half_width]²` with `steps` points per axis.
    pub fn square(half_width: f64, steps: usize) -> Result<Self> {
        Self::new((-half_width, half_width, steps), (-half_width, half_width, steps))
    }

    pub fn len(&self) -> usize {
        self.steps1 * self.steps2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn axis(min: f64, max: f64, steps: usize, i: usize) -> f64 {
        if i + 1 == steps {
            max
        } else {
            min + (max - min) * i as f64 / (steps - 1) as f64
        }
    }

    pub fn beta1(&self, i: usize) -> f64 {
        Self::axis(self.min1, self.max1, self.steps1, i)
    }

    pub fn beta2(&self, j: usize) -> f64 {
        Self::axis(self.min2, self.max2, self.steps2, j)
    }

    /// Coordinates of the row-major point `index` (β₁ varies slowest).
    pub fn point(&self, index: usize) -> (f64, f64) {
        (self.beta1(index / self.steps2), self.beta2(index % self.steps2))
    }

    fn max_abs(&self) -> f64 {
        [self.min1, self.max1, self.min2, self.max2]
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Default for GridSpec {
    /// 41 × 41 over `[-5, 5]²`.
    fn default() -> Self {
        GridSpec {
            min1: -5.0,
            max1: 5.0,
            steps1: 41,
            min2: -5.0,
            max2: 5.0,
            steps2: 41,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Mean1,
    Mean2,
    Var1,
    Var2,
    Cov,
    Partition,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::Mean1,
        Quantity::Mean2,
        Quantity::Var1,
        Quantity::Var2,
        Quantity::Cov,
        Quantity::Partition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Mean1 => "mean1",
            Quantity::Mean2 => "mean2",
            Quantity::Var1 => "var1",
            Quantity::Var2 => "var2",
            Quantity::Cov => "cov",
            Quantity::Partition => "partition",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Bures,
    Semiclassical,
    /// Bures minus semiclassical, with `λᵢ = βᵢ`.
    Difference,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Bures, Model::Semiclassical, Model::Difference];

    pub fn name(self) -> &'static str {
        match self {
            Model::Bures => "bures",
            Model::Semiclassical => "semiclassical",
            Model::Difference => "difference",
        }
    }
}

/// A grid point whose evaluation failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub index: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub message: String,
}

/// A scalar quantity sampled on a [`GridSpec`], row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceGrid {
    pub spec: GridSpec,
    pub quantity: Quantity,
    pub model: Model,
    pub values: Vec<f64>,
    /// Per-point relative quadrature error; absent for the semiclassical model.
    pub quadrature_errors: Option<Vec<f64>>,
    pub failures: Vec<PointFailure>,
}

impl SurfaceGrid {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn max_quadrature_error(&self) -> f64 {
        self.quadrature_errors
            .as_ref()
            .map(|e| e.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max))
            .unwrap_or(0.0)
    }

    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.steps2 + j]
    }

    /// Index, coordinates and value of the largest `|value|`.
    pub fn argmax_abs(&self) -> Option<(usize, f64, f64, f64)> {
        let (idx, v) = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
                Some((_, bv)) if bv.abs() >= v.abs() => best,
                _ => Some((i, *v)),
            })?;
        let (b1, b2) = self.spec.point(idx);
        Some((idx, b1, b2, v))
    }
}

fn semiclassical_quantity(quantity: Quantity, b1: f64, b2: f64) -> Result<f64> {
    let lams = LagrangeMultipliers::new(b1, b2)?;
    if quantity == Quantity::Partition {
        return Ok((-semiclassical::omega(&lams)).exp());
    }
    let m = semiclassical::moments(&lams);
    Ok(match quantity {
        Quantity::Mean1 => m.mean1,
        Quantity::Mean2 => m.mean2,
        Quantity::Var1 => m.var1,
        Quantity::Var2 => m.var2,
        Quantity::Cov => m.cov,
        Quantity::Partition => unreachable!(),
    })
}

/// Returns the value and its relative quadrature error.
fn bures_quantity(quantity: Quantity, b1: f64, b2: f64, tol: &Tolerance) -> Result<(f64, f64)> {
    let temps = InverseTemps2::new(b1, b2)?;
    if quantity == Quantity::Partition {
        let r = partition_2(&temps, tol)?;
        let z = r.converged_value()?;
        return Ok((z, r.error_estimate / z));
    }
    let m = moments_2(&temps, tol)?;
    let v = match quantity {
        Quantity::Mean1 => m.mean1,
        Quantity::Mean2 => m.mean2,
        Quantity::Var1 => m.var1,
        Quantity::Var2 => m.var2,
        Quantity::Cov => m.cov,
        Quantity::Partition => unreachable!(),
    };
    Ok((v, m.quadrature_error))
}

fn evaluate_point(
    model: Model,
    quantity: Quantity,
    b1: f64,
    b2: f64,
    tol: &Tolerance,
) -> Result<(f64, Option<f64>)> {
    match model {
        Model::Semiclassical => Ok((semiclassical_quantity(quantity, b1, b2)?, None)),
        Model::Bures => {
            let (v, e) = bures_quantity(quantity, b1, b2, tol)?;
            Ok((v, Some(e)))
        }
        Model::Difference => {
            let (v, e) = bures_quantity(quantity, b1, b2, tol)?;
            Ok((v - semiclassical_quantity(quantity, b1, b2)?, Some(e)))
        }
    }
}

/// Evaluates `quantity` under `model` at every grid point.
///
/// Points are evaluated in parallel; each point is deterministic, so the
/// assembled surface does not depend on scheduling. Failed points carry NaN
/// and are listed in `failures`.
pub fn surface(
    model: Model,
    quantity: Quantity,
    spec: &GridSpec,
    tol: &Tolerance,
) -> Result<SurfaceGrid> {
    if model != Model::Semiclassical && spec.max_abs() > MAX_BETA_2 {
        return Err(Error::InvalidParameter(format!(
            "grid exceeds the Bures model range |beta| <= {MAX_BETA_2}"
        )));
    }
    let outcomes: Vec<Result<(f64, Option<f64>)>> = (0..spec.len())
        .into_par_iter()
        .map(|idx| {
            let (b1, b2) = spec.point(idx);
            evaluate_point(model, quantity, b1, b2, tol)
        })
        .collect();

    let mut values = Vec::with_capacity(outcomes.len());
    let mut errors = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok((v, e)) => {
                values.push(v);
                errors.push(e.unwrap_or(0.0));
            }
            Err(err) => {
                let (beta1, beta2) = spec.point(idx);
                values.push(f64::NAN);
                errors.push(f64::NAN);
                failures.push(PointFailure {
                    index: idx,
                    beta1,
                    beta2,
                    message: err.to_string(),
                });
            }
        }
    }
    Ok(SurfaceGrid {
        spec: *spec,
        quantity,
        model,
        values,
        quadrature_errors: (model != Model::Semiclassical).then_some(errors),
        failures,
    })
}

/// Bures surface minus semiclassical surface on the same grid.
pub fn difference_surface(
    quantity: Quantity,
    spec: &GridSpec,
    tol: &Tolerance,
) -> Result<SurfaceGrid> {
    surface(Model::Difference, quantity, spec, tol)
}

/// One sample of the Brillouin curve and its Bures alternative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub beta: f64,
    pub brillouin: f64,
    pub alternative: f64,
}

impl CurvePoint {
    pub fn difference(&self) -> f64 {
        self.brillouin - self.alternative
    }
}

fn alternative_with<R>(ratio: &R, beta: f64) -> Result<f64>
where
    R: Fn(BesselOrder, f64) -> Result<f64>,
{
    if beta == 0.0 {
        return Ok(0.0);
    }
    Ok(ratio(BesselOrder::integer(2)?, beta.abs())?.copysign(beta))
}

/// `(β, tanh β, I₂(β)/I₁(β))` on the given grid.
pub fn curve_difference(betas: &[f64]) -> Result<Vec<CurvePoint>> {
    betas
        .iter()
        .map(|&beta| {
            if !(beta.abs() <= MAX_BETA_2) {
                return Err(Error::InvalidParameter(format!(
                    "curve points must satisfy |beta| <= {MAX_BETA_2}, got {beta}"
                )));
            }
            Ok(CurvePoint {
                beta,
                brillouin: beta.tanh(),
                alternative: alternative_with(&bessel_ratio, beta)?,
            })
        })
        .collect()
}

/// Location and value of a maximum found by golden-section search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremumReport {
    pub argmax: f64,
    pub max_value: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of a unimodal `f` on `[a, b]`, stopping when
/// the bracket is narrower than `width`.
pub fn golden_section_max<F>(mut f: F, a: f64, b: f64, width: f64) -> Result<ExtremumReport>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut iterations = 0;
    while hi - lo > width && iterations < 200 {
        iterations += 1;
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let (argmax, max_value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    Ok(ExtremumReport {
        argmax,
        max_value,
        bracket: (a, b),
        iterations,
    })
}

/// [`find_max_difference`] with a caller-supplied Bessel ratio.
pub fn find_max_difference_with<R>(ratio: R) -> Result<ExtremumReport>
where
    R: Fn(BesselOrder, f64) -> Result<f64>,
{
    let objective = |beta: f64| -> Result<f64> { Ok(beta.tanh() - alternative_with(&ratio, beta)?) };
    let (lo, hi, steps) = (0.1, 5.0, 50usize);
    let grid: Vec<f64> = (0..=steps)
        .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
        .collect();
    let values = grid
        .iter()
        .map(|&b| objective(b))
        .collect::<Result<Vec<_>>>()?;
    let best = values
        .iter()
        .enumerate()
        .fold(0, |bi, (i, v)| if *v > values[bi] { i } else { bi });
    if best == 0 || best == steps {
        return Err(Error::NoConvergence {
            solver: "curve-difference bracket scan",
            iterations: steps,
            residual: values[best],
        });
    }
    golden_section_max(objective, grid[best - 1], grid[best + 1], 1e-9)
}

/// Maximum of `tanh β − I₂(β)/I₁(β)` over β > 0.
pub fn find_max_difference() -> Result<ExtremumReport> {
    find_max_difference_with(bessel_ratio)
}

/// Solves `I₂(β)/I₁(β) = target` for β ∈ [0, 50] by bisection.
fn invert_radial(target: f64) -> Result<f64> {
    let order = BesselOrder::integer(2)?;
    let top = bessel_ratio(order, MAX_BETA_2)?;
    if target >= top {
        return Err(Error::domain(
            "fit_bures",
            format!("target magnitude {target} needs |beta| > {MAX_BETA_2}"),
        ));
    }
    let (mut lo, mut hi) = (0.0_f64, MAX_BETA_2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if bessel_ratio(order, mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Inverse temperatures whose Bures means equal `(target1, target2)`.
///
/// Starts from the radial closed-form inverse and polishes with Newton
/// steps on the numerically integrated means; the Jacobian is minus the
/// covariance matrix of the Boltzmann density.
pub fn fit_bures(target1: f64, target2: f64, tol: &Tolerance) -> Result<InverseTemps2> {
    if !(target1.is_finite() && target2.is_finite()) || target1.hypot(target2) >= 1.0 {
        return Err(Error::domain(
            "fit_bures",
            format!("targets ({target1}, {target2}) must lie inside the unit disk"),
        ));
    }
    let m = target1.hypot(target2);
    if m == 0.0 {
        return InverseTemps2::new(0.0, 0.0);
    }
    let beta = invert_radial(m)?;
    let mut b1 = -target1 / m * beta;
    let mut b2 = -target2 / m * beta;

    const MAX_ITER: usize = 50;
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let temps = InverseTemps2::new(b1, b2)?;
        let mom = moments_2(&temps, tol)?;
        let (r1, r2) = (mom.mean1 - target1, mom.mean2 - target2);
        residual = r1.abs().max(r2.abs());
        if residual < 1e-8 {
            return Ok(temps);
        }
        // Cov · δ = r
        let det = mom.var1 * mom.var2 - mom.cov * mom.cov;
        if !(det > 0.0) {
            break;
        }
        b1 += (mom.var2 * r1 - mom.cov * r2) / det;
        b2 += (mom.var1 * r2 - mom.cov * r1) / det;
    }
    Err(Error::NoConvergence {
        solver: "fit_bures Newton iteration",
        iterations: MAX_ITER,
        residual,
    })
}
