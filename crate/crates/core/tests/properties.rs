//! Randomized invariants of the geometry layer.

use nalgebra::DVector;
use planar_arm::geometry::{
    area_gradient, area_hessian, oriented_area, realize, wrap_angle, AngleConfig, ArmLengths,
};
use planar_arm::oracle::{fd_gradient, FD_GRADIENT_STEP};
use proptest::prelude::*;

fn arm_strategy() -> impl Strategy<Value = ArmLengths> {
    prop::collection::vec(0.2f64..4.0, 2..=6)
        .prop_map(|ls| ArmLengths::new(ls).unwrap())
}

fn config_strategy(dim: usize) -> impl Strategy<Value = AngleConfig> {
    prop::collection::vec(-10.0f64..10.0, dim).prop_map(AngleConfig::new)
}

fn arm_with_config() -> impl Strategy<Value = (ArmLengths, AngleConfig)> {
    arm_strategy().prop_flat_map(|a| {
        let dim = a.n() - 1;
        (Just(a), config_strategy(dim))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wrap_angle_lands_in_range(x in -100.0f64..100.0) {
        let w = wrap_angle(x);
        prop_assert!((0.0..std::f64::consts::TAU).contains(&w));
        prop_assert!(((w - x) / std::f64::consts::TAU).round().abs() < 17.0);
        let k = ((x - w) / std::f64::consts::TAU).round();
        prop_assert!((w + k * std::f64::consts::TAU - x).abs() < 1e-9);
    }

    #[test]
    fn realized_edges_have_prescribed_lengths((a, cfg) in arm_with_config()) {
        let path = realize(&a, &cfg).unwrap();
        for (i, &l) in a.lengths().iter().enumerate() {
            prop_assert!((path.edge(i).norm() - l).abs() < 1e-12 * l.max(1.0));
        }
    }

    #[test]
    fn gradient_agrees_with_finite_differences((a, cfg) in arm_with_config()) {
        let an = area_gradient(&a, &cfg).unwrap();
        let fd = fd_gradient(&a, &cfg, FD_GRADIENT_STEP).unwrap();
        let diff = an.iter().zip(&fd).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-6 * a.scale().max(1.0), "max component error {diff}");
    }

    #[test]
    fn mirror_negates_area_and_gradient((a, cfg) in arm_with_config()) {
        let m = cfg.mirror();
        let area = oriented_area(&realize(&a, &cfg).unwrap());
        let marea = oriented_area(&realize(&a, &m).unwrap());
        prop_assert!((area + marea).abs() < 1e-9 * a.scale());
        let g = area_gradient(&a, &cfg).unwrap();
        let mg = area_gradient(&a, &m).unwrap();
        for (x, y) in g.iter().zip(&mg) {
            prop_assert!((x - y).abs() < 1e-9 * a.scale());
        }
    }

    #[test]
    fn hessian_is_symmetric_and_differentiates_gradient((a, cfg) in arm_with_config()) {
        let h = area_hessian(&a, &cfg).unwrap();
        let d = a.n() - 1;
        for k in 0..d {
            for j in 0..d {
                prop_assert!((h[(k, j)] - h[(j, k)]).abs() < 1e-12 * a.scale());
            }
        }
        // Directional FD of the gradient matches H * v.
        let step = 1e-6;
        let v: Vec<f64> = (0..d).map(|k| ((k + 1) as f64).sin()).collect();
        let plus = AngleConfig::new(
            cfg.thetas().iter().zip(&v).map(|(t, vi)| t + step * vi).collect(),
        );
        let minus = AngleConfig::new(
            cfg.thetas().iter().zip(&v).map(|(t, vi)| t - step * vi).collect(),
        );
        let gp = DVector::from_vec(area_gradient(&a, &plus).unwrap());
        let gm = DVector::from_vec(area_gradient(&a, &minus).unwrap());
        let fd = (gp - gm) / (2.0 * step);
        let hv = &h * DVector::from_vec(v);
        prop_assert!((fd - hv).norm() < 1e-4 * a.scale().max(1.0));
    }

    #[test]
    fn area_is_translation_of_angles_invariant_up_to_frame((a, cfg) in arm_with_config()) {
        // Rotating every edge direction by the same angle while keeping
        // the frame pinned is not a symmetry; but re-wrapping angles by
        // full turns is. (Guards the canonical range choice.)
        let shifted = AngleConfig::new(
            cfg.thetas()
                .iter()
                .map(|t| t + 4.0 * std::f64::consts::TAU)
                .collect(),
        );
        let area = oriented_area(&realize(&a, &cfg).unwrap());
        let sarea = oriented_area(&realize(&a, &shifted).unwrap());
        prop_assert!((area - sarea).abs() < 1e-9 * a.scale());
    }
}
