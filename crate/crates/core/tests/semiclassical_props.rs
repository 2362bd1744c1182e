use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spin_thermo::semiclassical::{
    density_matrix, density_matrix_by_exponential, fit, mat_mul, mean, moments, omega, trace,
    LagrangeMultipliers, Matrix2, PauliObservable,
};

fn lams(l1: f64, l2: f64) -> LagrangeMultipliers {
    LagrangeMultipliers::new(l1, l2).unwrap()
}

fn random_pairs(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
        .collect()
}

fn tr_product(rho: &Matrix2, a: &Matrix2) -> Complex64 {
    trace(&mat_mul(rho, a))
}

fn add(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] += b[i][j];
        }
    }
    out
}

#[test]
fn moments_match_matrix_exponential_oracle() {
    let s1 = PauliObservable::Sigma1.matrix();
    let s2 = PauliObservable::Sigma2.matrix();
    for (l1, l2) in random_pairs(25, 11) {
        let rho = density_matrix_by_exponential(&lams(l1, l2));
        let m1 = tr_product(&rho, &s1).re;
        let m2 = tr_product(&rho, &s2).re;
        let v1 = tr_product(&rho, &mat_mul(&s1, &s1)).re - m1 * m1;
        let v2 = tr_product(&rho, &mat_mul(&s2, &s2)).re - m2 * m2;
        let anti = add(&mat_mul(&s1, &s2), &mat_mul(&s2, &s1));
        let c = 0.5 * tr_product(&rho, &anti).re - m1 * m2;

        let m = moments(&lams(l1, l2));
        for (got, want) in [(m.mean1, m1), (m.mean2, m2), (m.var1, v1), (m.var2, v2), (m.cov, c)] {
            assert!((got - want).abs() <= 1e-10, "({l1}, {l2}): {got} vs {want}");
        }
        let closed = density_matrix(&lams(l1, l2));
        for (row, want) in closed.entries().iter().zip(&rho) {
            for (a, b) in row.iter().zip(want) {
                assert!((a - b).norm() <= 1e-12);
            }
        }
    }
}

#[test]
fn omega_gradient_gives_means() {
    let h = 1e-5;
    for (l1, l2) in random_pairs(25, 12) {
        let d1 = (omega(&lams(l1 + h, l2)) - omega(&lams(l1 - h, l2))) / (2.0 * h);
        let d2 = (omega(&lams(l1, l2 + h)) - omega(&lams(l1, l2 - h))) / (2.0 * h);
        let (m1, m2) = mean(&lams(l1, l2));
        assert!((d1 - m1).abs() <= 1e-8 && (d2 - m2).abs() <= 1e-8, "({l1}, {l2})");
    }
}

#[test]
fn density_matrix_invariants_hold() {
    for (l1, l2) in random_pairs(25, 13) {
        let rho = density_matrix(&lams(l1, l2));
        let e = rho.entries();
        assert!((e[0][1] - e[1][0].conj()).norm() <= 1e-14);
        assert!((trace(e).re - 1.0).abs() <= 1e-14);
        assert!(rho.eigenvalues().iter().all(|&v| v >= -1e-14));
        let l = l1.hypot(l2);
        assert!((rho.purity() - (1.0 + l.tanh().powi(2)) / 2.0).abs() <= 1e-14);
    }
}

#[test]
fn pauli_matrices_are_traceless_hermitian_involutions() {
    for s in [PauliObservable::Sigma1, PauliObservable::Sigma2, PauliObservable::Sigma3] {
        let m = s.matrix();
        assert_eq!(trace(&m), Complex64::new(0.0, 0.0));
        assert_eq!(m[0][1], m[1][0].conj());
        let sq = mat_mul(&m, &m);
        assert_eq!(sq[0][0], Complex64::new(1.0, 0.0));
        assert_eq!(sq[0][1], Complex64::new(0.0, 0.0));
    }
}

#[test]
fn reference_values() {
    assert!((omega(&lams(3.0, 4.0)) + (2.0 * 5f64.cosh()).ln()).abs() < 1e-14);
    let (m1, m2) = mean(&lams(3.0, 4.0));
    assert!((m1 + 0.6 * 5f64.tanh()).abs() < 1e-15 && (m2 + 0.8 * 5f64.tanh()).abs() < 1e-15);
    let m = moments(&lams(1.0, 1.0));
    assert!((m.cov + 2f64.sqrt().tanh().powi(2) / 2.0).abs() < 1e-15);
    let f = fit(0.6, 0.0).unwrap();
    assert!((f.lambda1 + 0.6f64.atanh()).abs() < 1e-15 && f.lambda2 == 0.0);
    assert!(fit(0.6, 0.8).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mean_rotates_with_multipliers(l1 in -4.0f64..4.0, l2 in -4.0f64..4.0, t in 0.0f64..6.3) {
        let (c, s) = (t.cos(), t.sin());
        let (a1, a2) = mean(&lams(l1, l2));
        let (b1, b2) = mean(&lams(c * l1 - s * l2, s * l1 + c * l2));
        prop_assert!((b1 - (c * a1 - s * a2)).abs() <= 1e-12);
        prop_assert!((b2 - (s * a1 + c * a2)).abs() <= 1e-12);
    }

    #[test]
    fn mean_magnitude_is_tanh_of_radius(l1 in -6.0f64..6.0, l2 in -6.0f64..6.0) {
        let (m1, m2) = mean(&lams(l1, l2));
        prop_assert!((m1.hypot(m2) - l1.hypot(l2).tanh()).abs() <= 1e-12);
    }

    #[test]
    fn fit_inverts_mean(r in 0.0f64..5.0, t in 0.0f64..6.3) {
        let (l1, l2) = (r * t.cos(), r * t.sin());
        let (m1, m2) = mean(&lams(l1, l2));
        let back = fit(m1, m2).unwrap();
        prop_assert!((back.lambda1 - l1).abs() <= 1e-8 && (back.lambda2 - l2).abs() <= 1e-8);
    }

    #[test]
    fn moments_obey_pauli_identities(l1 in -5.0f64..5.0, l2 in -5.0f64..5.0) {
        let m = moments(&lams(l1, l2));
        prop_assert!(m.mean1.abs() <= 1.0 && m.mean2.abs() <= 1.0);
        prop_assert!((0.0..=1.0).contains(&m.var1) && (0.0..=1.0).contains(&m.var2));
        prop_assert!((m.var1 - (1.0 - m.mean1 * m.mean1)).abs() <= 1e-12);
        prop_assert!((m.cov + m.mean1 * m.mean2).abs() <= 1e-12);
    }
}
