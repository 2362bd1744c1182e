//! Adaptive Gauss–Kronrod (7–15) quadrature on intervals, the unit disk,
//! and the unit ball under the Bures volume element.
//!
//! The interval driver repeatedly bisects the subinterval with the largest
//! error estimate. Integrands may be vector valued (`[f64; N]`) so that
//! several moments share one set of abscissae; the error norm is the
//! componentwise maximum.

use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping criteria for an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    absolute: f64,
    relative: f64,
    max_subdivisions: usize,
}

impl Tolerance {
    pub fn new(absolute: f64, relative: f64, max_subdivisions: usize) -> Result<Self> {
        let valid = |t: f64| t.is_finite() && t >= 0.0;
        if !valid(absolute) || !valid(relative) {
            return Err(Error::InvalidParameter(format!(
                "tolerances must be finite and non-negative (absolute {absolute}, relative {relative})"
            )));
        }
        if absolute == 0.0 && relative == 0.0 {
            return Err(Error::InvalidParameter(
                "at least one of the absolute and relative tolerances must be positive".into(),
            ));
        }
        if max_subdivisions == 0 {
            return Err(Error::InvalidParameter(
                "max_subdivisions must be positive".into(),
            ));
        }
        Ok(Tolerance {
            absolute,
            relative,
            max_subdivisions,
        })
    }

    pub fn absolute(&self) -> f64 {
        self.absolute
    }

    pub fn relative(&self) -> f64 {
        self.relative
    }

    pub fn max_subdivisions(&self) -> usize {
        self.max_subdivisions
    }

    /// Error bound accepted for an integral of the given magnitude.
    pub fn bound(&self, magnitude: f64) -> f64 {
        self.absolute.max(self.relative * magnitude.abs())
    }

    /// The same tolerance tightened by `factor` (> 1), for nested levels.
    fn tightened(&self, factor: f64) -> Self {
        Tolerance {
            absolute: self.absolute / factor,
            relative: self.relative / factor,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            absolute: 1e-10,
            relative: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

/// Result of a scalar integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    /// The value, or [`Error::QuadratureFailed`] if not converged.
    pub fn converged_value(&self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::QuadratureFailed {
                value: self.value,
                error_estimate: self.error_estimate,
            })
        }
    }
}

/// Result of a vector-valued integration; the error estimate is the
/// largest componentwise estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VecQuadResult<const N: usize> {
    pub values: [f64; N],
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl<const N: usize> VecQuadResult<N> {
    fn into_scalar(self) -> QuadResult {
        QuadResult {
            value: self.values[0],
            error_estimate: self.error_estimate,
            evaluations: self.evaluations,
            converged: self.converged,
        }
    }
}

fn max_abs<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[derive(Debug, Clone, Copy)]
struct Segment<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

impl<const N: usize> Segment<N> {
    fn error_norm(&self) -> f64 {
        max_abs(&self.error)
    }
}

/// QUADPACK-style error scaling for one component.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn checked<const N: usize, F>(f: &mut F, x: f64) -> Result<[f64; N]>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let v = f(x)?;
    if let Some(bad) = v.iter().find(|c| !c.is_finite()) {
        return Err(Error::NonFiniteIntegrand { at: x, value: *bad });
    }
    Ok(v)
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
fn gk15<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Result<Segment<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [[0.0; N]; 7];
    let mut fv2 = [[0.0; N]; 7];

    let fc = checked(f, center)?;
    let mut gauss = [0.0; N];
    let mut kronrod = [0.0; N];
    let mut res_abs = [0.0; N];
    for c in 0..N {
        gauss[c] = fc[c] * WG[3];
        kronrod[c] = fc[c] * WGK[7];
        res_abs[c] = kronrod[c].abs();
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let lo = checked(f, center - dx)?;
        let hi = checked(f, center + dx)?;
        for c in 0..N {
            let sum = lo[c] + hi[c];
            kronrod[c] += WGK[j] * sum;
            res_abs[c] += WGK[j] * (lo[c].abs() + hi[c].abs());
            if j % 2 == 1 {
                gauss[c] += WG[j / 2] * sum;
            }
        }
        fv1[j] = lo;
        fv2[j] = hi;
    }

    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for c in 0..N {
        let mean = 0.5 * kronrod[c];
        let mut res_asc = WGK[7] * (fc[c] - mean).abs();
        for j in 0..7 {
            res_asc += WGK[j] * ((fv1[j][c] - mean).abs() + (fv2[j][c] - mean).abs());
        }
        let scale = half.abs();
        value[c] = kronrod[c] * half;
        error[c] = rescale_error(
            (kronrod[c] - gauss[c]) * half,
            res_abs[c] * scale,
            res_asc * scale,
        );
    }
    Ok(Segment { a, b, value, error })
}

/// Adaptive integration of a vector-valued integrand over `[a, b]`.
pub fn integrate_1d_vec<const N: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    tol: &Tolerance,
) -> Result<VecQuadResult<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::domain(
            "integrate_1d",
            format!("interval must be finite with a < b, got [{a}, {b}]"),
        ));
    }
    let mut segments = vec![gk15(&mut f, a, b)?];
    let mut evaluations = 15;

    loop {
        let mut value = [0.0; N];
        let mut error = [0.0; N];
        for s in &segments {
            for c in 0..N {
                value[c] += s.value[c];
                error[c] += s.error[c];
            }
        }
        let error_norm = max_abs(&error);
        let converged = error_norm <= tol.bound(max_abs(&value));
        if converged || segments.len() >= tol.max_subdivisions {
            return Ok(VecQuadResult {
                values: value,
                error_estimate: error_norm,
                evaluations,
                converged,
            });
        }

        // First segment with the largest error; ties resolve to the lowest index.
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, s)| {
                let e = s.error_norm();
                if e > be {
                    (i, e)
                } else {
                    (bi, be)
                }
            });
        let seg = segments[worst];
        let mid = 0.5 * (seg.a + seg.b);
        if !(seg.a < mid && mid < seg.b) {
            // Interval exhausted at floating-point resolution.
            return Ok(VecQuadResult {
                values: value,
                error_estimate: error_norm,
                evaluations,
                converged: false,
            });
        }
        let left = gk15(&mut f, seg.a, mid)?;
        let right = gk15(&mut f, mid, seg.b)?;
        evaluations += 30;
        segments[worst] = left;
        segments.insert(worst + 1, right);
    }
}

/// Adaptive integration of `f` over `[a, b]`.
pub fn integrate_1d<F>(mut f: F, a: f64, b: f64, tol: &Tolerance) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    integrate_1d_vec(|x| Ok([f(x)]), a, b, tol).map(VecQuadResult::into_scalar)
}

/// Bookkeeping for inner integrations nested inside an outer one.
struct InnerStats {
    max_error: Cell<f64>,
    evaluations: Cell<usize>,
    all_converged: Cell<bool>,
}

impl InnerStats {
    fn new() -> Self {
        InnerStats {
            max_error: Cell::new(0.0),
            evaluations: Cell::new(0),
            all_converged: Cell::new(true),
        }
    }

    fn record<const N: usize>(&self, r: &VecQuadResult<N>) {
        self.max_error.set(self.max_error.get().max(r.error_estimate));
        self.evaluations.set(self.evaluations.get() + r.evaluations);
        if !r.converged {
            self.all_converged.set(false);
        }
    }

    /// Combines the outer result with inner errors, integrated over an outer
    /// measure of total mass `outer_mass`.
    fn finish<const N: usize>(
        &self,
        outer: VecQuadResult<N>,
        outer_mass: f64,
        tol: &Tolerance,
    ) -> VecQuadResult<N> {
        let error = outer.error_estimate + outer_mass * self.max_error.get();
        VecQuadResult {
            values: outer.values,
            error_estimate: error,
            evaluations: outer.evaluations + self.evaluations.get(),
            converged: outer.converged
                && self.all_converged.get()
                && error <= tol.bound(max_abs(&outer.values)),
        }
    }
}

/// Integral of `f(x, y)` over the closed unit disk.
///
/// Iterated: the inner integral runs over `y ∈ [-√(1-x²), √(1-x²)]`; the
/// outer variable is taken as `x = sin θ` so that the square-root endpoint
/// behavior of the chord length is absorbed by `dx = cos θ dθ`.
pub fn integrate_disk<F>(mut f: F, tol: &Tolerance) -> Result<QuadResult>
where
    F: FnMut(f64, f64) -> f64,
{
    integrate_disk_vec(|x, y| Ok([f(x, y)]), tol).map(VecQuadResult::into_scalar)
}

/// Vector-valued form of [`integrate_disk`].
pub fn integrate_disk_vec<const N: usize, F>(mut f: F, tol: &Tolerance) -> Result<VecQuadResult<N>>
where
    F: FnMut(f64, f64) -> Result<[f64; N]>,
{
    // Half of each level's budget is reserved for the errors of the level inside it.
    let inner_tol = tol.tightened(20.0);
    let stats = InnerStats::new();
    let outer = integrate_1d_vec(
        |theta| {
            let (x, c) = theta.sin_cos();
            if c <= 0.0 {
                return Ok([0.0; N]);
            }
            let inner = integrate_1d_vec(|y| f(x, y), -c, c, &inner_tol)?;
            stats.record(&inner);
            let mut out = inner.values;
            out.iter_mut().for_each(|v| *v *= c);
            Ok(out)
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        &tol.tightened(2.0),
    )?;
    Ok(stats.finish(outer, 2.0, tol))
}

/// `∫ f(x, y, z) / (8 √(1 - x² - y² - z²)) dV` over the unit ball.
///
/// Spherical coordinates with radius `r = sin φ`: the Jacobian
/// `r² dr = sin²φ cos φ dφ` cancels the `√(1 - r²) = cos φ` singularity,
/// leaving `(1/8) ∫ sin²φ dφ ∫ sin θ dθ ∫ dψ f`, smooth on the box.
pub fn integrate_ball_bures<F>(mut f: F, tol: &Tolerance) -> Result<QuadResult>
where
    F: FnMut(f64, f64, f64) -> f64,
{
    integrate_ball_bures_vec(|x, y, z| Ok([f(x, y, z)]), tol).map(VecQuadResult::into_scalar)
}

/// Vector-valued form of [`integrate_ball_bures`].
pub fn integrate_ball_bures_vec<const N: usize, F>(
    mut f: F,
    tol: &Tolerance,
) -> Result<VecQuadResult<N>>
where
    F: FnMut(f64, f64, f64) -> Result<[f64; N]>,
{
    let middle_tol = tol.tightened(20.0);
    let inner_tol = tol.tightened(400.0);
    let middle_stats = InnerStats::new();
    let outer = integrate_1d_vec(
        |phi| {
            let r = phi.sin();
            let inner_stats = InnerStats::new();
            let middle = integrate_1d_vec(
                |theta| {
                    let (st, ct) = theta.sin_cos();
                    let inner = integrate_1d_vec(
                        |psi| {
                            let (sp, cp) = psi.sin_cos();
                            f(r * st * cp, r * st * sp, r * ct)
                        },
                        0.0,
                        2.0 * PI,
                        &inner_tol,
                    )?;
                    inner_stats.record(&inner);
                    let mut out = inner.values;
                    out.iter_mut().for_each(|v| *v *= st);
                    Ok(out)
                },
                0.0,
                PI,
                &middle_tol.tightened(2.0),
            )?;
            let middle = inner_stats.finish(middle, 2.0, &middle_tol);
            middle_stats.record(&middle);
            let weight = r * r / 8.0;
            let mut out = middle.values;
            out.iter_mut().for_each(|v| *v *= weight);
            Ok(out)
        },
        0.0,
        FRAC_PI_2,
        &tol.tightened(2.0),
    )?;
    Ok(middle_stats.finish(outer, FRAC_PI_2 / 8.0, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0, 0.0, 10).is_err());
        assert!(Tolerance::new(-1.0, 1e-8, 10).is_err());
        assert!(Tolerance::new(1e-8, 0.0, 0).is_err());
        assert!(Tolerance::new(0.0, 1e-8, 10).is_ok());
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate_1d(|x| x * x, 0.0, 1.0, &tol()).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
        assert!(r.converged);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn semicircle_area() {
        let r = integrate_1d(|x| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, &tol()).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-10);
        assert!(r.converged);
    }

    #[test]
    fn nan_aborts_with_diagnostic() {
        let err = integrate_1d(|x| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0, &tol())
            .unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { .. }));
        let err = integrate_disk(|x, _| 1.0 / x.max(0.0) - 1.0 / x.max(0.0), &tol()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn invalid_interval_is_rejected() {
        assert!(integrate_1d(|x| x, 1.0, 0.0, &tol()).is_err());
        assert!(integrate_1d(|x| x, 0.0, f64::INFINITY, &tol()).is_err());
    }

    #[test]
    fn non_convergence_is_reported_honestly() {
        let tight = Tolerance::new(1e-15, 0.0, 3).unwrap();
        let r = integrate_1d(|x| (50.0 * x).sin().abs(), 0.0, 3.0, &tight).unwrap();
        assert!(!r.converged);
        assert!(r.error_estimate > 1e-15);
        assert!(r.converged_value().is_err());
    }

    #[test]
    fn converged_flag_respects_bound() {
        let t = Tolerance::new(1e-9, 1e-9, 500).unwrap();
        for k in 1..6 {
            let r = integrate_1d(|x| (k as f64 * x).exp().sin(), 0.0, 2.0, &t).unwrap();
            if r.converged {
                assert!(r.error_estimate <= t.bound(r.value));
            }
        }
    }

    #[test]
    fn disk_examples() {
        let one = integrate_disk(|_, _| 1.0, &tol()).unwrap();
        assert!((one.value - PI).abs() < 1e-10 && one.converged);
        let odd = integrate_disk(|x, _| x, &tol()).unwrap();
        assert!(odd.value.abs() < 1e-10);
        // ∫∫ e^{-x} = 2π I1(1); I1(1) = 0.565159103992485027...
        let exp = integrate_disk(|x, _| (-x).exp(), &tol()).unwrap();
        let expected = 2.0 * PI * 0.565_159_103_992_485_f64;
        assert!(((exp.value - expected) / expected).abs() < 1e-8);
    }

    #[test]
    fn disk_radial_swap_is_identical() {
        let g = |x: f64, y: f64| (-(x * x + y * y) * 3.0).exp() * (1.0 + x * x + y * y);
        let a = integrate_disk(g, &tol()).unwrap();
        let b = integrate_disk(|x, y| g(y, x), &tol()).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
    }

    #[test]
    fn ball_examples() {
        let pi2_8 = PI * PI / 8.0;
        let one = integrate_ball_bures(|_, _, _| 1.0, &tol()).unwrap();
        assert!((one.value - pi2_8).abs() < 1e-9 && one.converged);
        let z = integrate_ball_bures(|_, _, z| z, &tol()).unwrap();
        assert!(z.value.abs() < 1e-9);
        // π² I1(1) / 4
        let e = integrate_ball_bures(|_, _, z| (-z).exp(), &tol()).unwrap();
        let expected = PI * PI * 0.565_159_103_992_485_f64 / 4.0;
        assert!(((e.value - expected) / expected).abs() < 1e-7);
    }

    #[test]
    fn determinism_is_bitwise() {
        let f = |x: f64, y: f64| (x * 1.3 - y * 0.7).exp() * (x * y).cos();
        let a = integrate_disk(f, &tol()).unwrap();
        let b = integrate_disk(f, &tol()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error_estimate.to_bits(), b.error_estimate.to_bits());
    }
}
