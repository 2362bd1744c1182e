use proptest::prelude::*;
use spin_thermo::analysis::{
    curve_difference, difference_surface, find_max_difference, fit_bures, surface, GridSpec,
    Model, Quantity,
};
use spin_thermo::bures_model::{closed_mean_2, InverseTemps2};
use spin_thermo::quadrature::Tolerance;
use spin_thermo::semiclassical::{self, LagrangeMultipliers};

#[test]
fn surfaces_do_not_depend_on_thread_count() {
    let spec = GridSpec::square(3.0, 9).unwrap();
    let tol = Tolerance::default();
    let parallel = surface(Model::Difference, Quantity::Cov, &spec, &tol).unwrap();
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| surface(Model::Difference, Quantity::Cov, &spec, &tol).unwrap());
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&parallel.values), bits(&serial.values));
}

#[test]
fn surfaces_are_row_major_in_beta1() {
    let spec = GridSpec::new((-1.0, 1.0, 3), (0.0, 2.0, 5)).unwrap();
    let s = surface(Model::Semiclassical, Quantity::Mean1, &spec, &Tolerance::default()).unwrap();
    assert_eq!(s.values.len(), 15);
    for i in 0..3 {
        for j in 0..5 {
            let (b1, b2) = (spec.beta1(i), spec.beta2(j));
            let (m1, _) = semiclassical::mean(&LagrangeMultipliers::new(b1, b2).unwrap());
            assert_eq!(s.value_at(i, j), m1);
        }
    }
}

#[test]
fn partition_surfaces() {
    let spec = GridSpec::square(2.0, 3).unwrap();
    let tol = Tolerance::default();
    let sc = surface(Model::Semiclassical, Quantity::Partition, &spec, &tol).unwrap();
    assert!((sc.value_at(1, 1) - 2.0).abs() < 1e-15);
    assert!((sc.value_at(0, 1) - 2.0 * 2f64.cosh()).abs() < 1e-13);
    let b = surface(Model::Bures, Quantity::Partition, &spec, &tol).unwrap();
    assert!((b.value_at(1, 1) - std::f64::consts::PI.powi(2) / 8.0).abs() < 1e-12);
}

#[test]
fn difference_maps_at_origin_and_axes() {
    let spec = GridSpec::default();
    let tol = Tolerance::default();
    let var = difference_surface(Quantity::Var1, &GridSpec::square(1.0, 3).unwrap(), &tol).unwrap();
    assert!((var.value_at(1, 1) + 0.75).abs() <= 1e-8);
    let cov = difference_surface(Quantity::Cov, &spec, &tol).unwrap();
    assert!(cov.is_complete());
    for j in 0..spec.steps2 {
        assert!(cov.value_at(20, j).abs() <= 1e-9);
        assert!(cov.value_at(j, 20).abs() <= 1e-9);
    }
}

#[test]
fn curve_is_odd_and_vanishes_at_origin() {
    let betas: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.25).collect();
    let pts = curve_difference(&betas).unwrap();
    let mid = &pts[20];
    assert_eq!((mid.beta, mid.brillouin, mid.alternative), (0.0, 0.0, 0.0));
    for k in 0..20 {
        assert_eq!(pts[k].difference(), -pts[40 - k].difference());
    }
}

#[test]
fn extremum_dominates_curve_samples() {
    let r = find_max_difference().unwrap();
    let betas: Vec<f64> = (1..=500).map(|i| i as f64 * 0.01).collect();
    for p in curve_difference(&betas).unwrap() {
        assert!(p.difference() <= r.max_value + 1e-15);
    }
}

#[test]
fn bures_fit_roundtrip_grid() {
    let tol = Tolerance::default();
    for b1 in [-4.0, -1.5, 0.0, 0.5, 3.0] {
        for b2 in [-3.0, 0.0, 0.25, 2.0, 4.0] {
            let (t1, t2) = closed_mean_2(&InverseTemps2::new(b1, b2).unwrap()).unwrap();
            let fitted = fit_bures(t1, t2, &tol).unwrap();
            assert!(
                (fitted.beta1 - b1).abs() <= 1e-6 && (fitted.beta2 - b2).abs() <= 1e-6,
                "({b1}, {b2}) -> ({}, {})",
                fitted.beta1,
                fitted.beta2
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bures_fit_inverts_closed_mean(r in 0.0f64..8.0, t in 0.0f64..6.3) {
        let (b1, b2) = (r * t.cos(), r * t.sin());
        let (t1, t2) = closed_mean_2(&InverseTemps2::new(b1, b2).unwrap()).unwrap();
        let fitted = fit_bures(t1, t2, &Tolerance::default()).unwrap();
        prop_assert!((fitted.beta1 - b1).abs() <= 1e-6 && (fitted.beta2 - b2).abs() <= 1e-6);
    }

    #[test]
    fn fit_rejects_targets_outside_disk(r in 1.0f64..3.0, t in 0.0f64..6.3) {
        prop_assert!(fit_bures(r * t.cos(), r * t.sin(), &Tolerance::default()).is_err());
    }
}
