#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Uniform point in the unit disk, by rejection from the square.
pub fn sample_unit_disk(rng: &mut ChaCha8Rng) -> [f64; 2] {
    loop {
        let x: f64 = rng.gen_range(-1.0..1.0);
        let y: f64 = rng.gen_range(-1.0..1.0);
        if x * x + y * y <= 1.0 {
            return [x, y];
        }
    }
}

/// Point of the Bures ball measure `dV / √(1 - r²)`: uniform direction,
/// radius `sin φ` with `φ` drawn from density ∝ sin²φ on [0, π/2].
pub fn sample_bures_ball(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let phi = loop {
        let phi = rng.gen::<f64>() * PI / 2.0;
        if rng.gen::<f64>() < phi.sin().powi(2) {
            break phi;
        }
    };
    let r = phi.sin();
    let z: f64 = rng.gen_range(-1.0..1.0);
    let t: f64 = rng.gen_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).sqrt();
    [r * s * t.cos(), r * s * t.sin(), r * z]
}

/// Sample mean and its standard error.
pub fn mean_and_error(sum: f64, sum_sq: f64, n: usize) -> (f64, f64) {
    let n = n as f64;
    let mean = sum / n;
    (mean, ((sum_sq / n - mean * mean) / n).sqrt())
}
