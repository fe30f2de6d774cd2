use bykov_core::audit::wilson_interval;
use bykov_core::circle::{k_of_lambda, lambda_a_n, CircleMap, CircleMapFamily};
use bykov_core::model::{circle_dist, wrap_angle, MapKind};
use bykov_core::{CylinderPoint, ModelParams, Perturbation, ReturnMap};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn map(k: f64, lambda: f64) -> ReturnMap {
    let params = ModelParams::reference(1.0, lambda).unwrap().with_twisting_number(k).unwrap();
    ReturnMap::new(params, Perturbation::reference())
}

proptest! {
    #[test]
    fn wrapped_angles_stay_in_range(x in -1e6f64..1e6) {
        let w = wrap_angle(x);
        prop_assert!((0.0..TAU).contains(&w));
    }

    #[test]
    fn rescaled_map_is_conjugate(x in 0.0f64..TAU, ybar in 0.0f64..1.0, lambda in 1e-5f64..1e-1, k in 0.5f64..20.0) {
        let m = map(k, lambda);
        let (rx, ry) = m.apply_rescaled(x, ybar).unwrap();
        let q = m.apply(CylinderPoint::new(x, lambda * ybar)).unwrap();
        prop_assert!(circle_dist(rx, q.x) < 1e-9);
        prop_assert!((ry - q.y / lambda).abs() <= 1e-9 * ry.abs().max(1e-300));
    }

    #[test]
    fn determinant_factorises(x in 0.0f64..TAU, y in 0.0f64..1.0, lambda in 0.0f64..0.05) {
        let m = map(3.0, lambda);
        let det = m.jacobian(MapKind::Return, x, y).unwrap().det();
        let fact = m.det_factorized(x, y).unwrap();
        prop_assert!((det - fact).abs() <= 1e-12 * fact.abs());
    }

    #[test]
    fn height_is_contracted_near_the_network(x in 0.0f64..TAU, y in 0.0f64..0.5) {
        let q = map(3.0, 1e-3).apply(CylinderPoint::new(x, y)).unwrap();
        prop_assert!(q.y >= 0.0 && q.y < (y + 1e-3 * 2.1).max(1e-300));
    }

    #[test]
    fn lambda_sequence_lands_on_parameter(k in 0.5f64..20.0, a in 0.0f64..TAU, n in 1u32..30) {
        let twist = k_of_lambda(k, lambda_a_n(k, a, n));
        prop_assert!(circle_dist(wrap_angle(twist), a) < 1e-12);
    }

    #[test]
    fn circle_map_is_equivariant_in_a(x in 0.0f64..TAU, a in 0.0f64..TAU, s in 0.0f64..TAU) {
        let h = CircleMapFamily::reference(5.0);
        prop_assert!(circle_dist(h.eval(a + s, x), wrap_angle(h.eval(a, x) + s)) < 1e-12);
    }

    #[test]
    fn wilson_interval_brackets_estimate(n in 1usize..10_000, frac in 0.0f64..=1.0) {
        let hits = ((n as f64) * frac).round() as usize;
        let (lo, hi) = wilson_interval(hits, n, 1.96);
        let p = hits as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
    }
}
