//! Saddle-focus data, the perturbation pair and the maps composing the
//! first return map to the cross-section `Out(O₂)`.

mod maps;
mod params;
mod perturbation;

pub use maps::{
    eta, local_map_o1, local_map_o1_with, local_map_o2, local_map_o2_with, psi_21, MapKind,
    Remainders, ReturnMap, ZeroRemainders, FD_STEP,
};
pub use params::{derived_constants, DerivedConstants, ModelParams, ModelParamsSpec, SaddleFocus};
pub use perturbation::{Field, FieldSpec, Harmonic, Perturbation, PerturbationSpec, TrigPoly};

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Reduces an angle to `[0, 2π)` with an exact remainder.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to TAU for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed angular difference `a - b` reduced to `(-π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Distance between two angles on the circle.
pub fn circle_dist(a: f64, b: f64) -> f64 {
    angle_diff(a, b).abs()
}

/// A point on the cylinder cross-section: angle `x` and height `y`.
///
/// `x` is always stored in `[0, 2π)`. Heights of user-supplied points are
/// checked by [`CylinderPoint::try_new`]; map outputs may leave `[-1, 1]`
/// slightly (the return map can push `y` up to `(1 + λ max Φ₂)^δ`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderPoint {
    pub x: f64,
    pub y: f64,
}

impl CylinderPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x: wrap_angle(x), y }
    }

    pub fn try_new(x: f64, y: f64) -> crate::Result<Self> {
        if !x.is_finite() || !y.is_finite() || y.abs() > 1.0 {
            return Err(crate::Error::Domain { map: "cylinder", x, y });
        }
        Ok(Self::new(x, y))
    }

    /// Circle distance in `x` plus absolute distance in `y` (max norm).
    pub fn dist(&self, other: &CylinderPoint) -> f64 {
        circle_dist(self.x, other.x).max((self.y - other.y).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wrap_handles_tiny_negative() {
        assert_eq!(wrap_angle(-1e-18), 0.0);
        assert_eq!(wrap_angle(TAU), 0.0);
        assert!((wrap_angle(-1.0) - (TAU - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn try_new_rejects_tall_points() {
        assert!(CylinderPoint::try_new(0.0, 1.5).is_err());
        assert!(CylinderPoint::try_new(f64::NAN, 0.0).is_err());
        let p = CylinderPoint::try_new(-0.5, -1.0).unwrap();
        assert!(p.x > 0.0);
    }

    proptest! {
        #[test]
        fn wrapped_angle_in_range(x in -1e6f64..1e6) {
            let w = wrap_angle(x);
            prop_assert!((0.0..TAU).contains(&w));
            prop_assert!(circle_dist(w, x) < 1e-9);
        }

        #[test]
        fn angle_diff_is_antisymmetric(a in -10.0f64..10.0, b in -10.0f64..10.0) {
            let d = angle_diff(a, b);
            prop_assert!(d > -PI - 1e-12 && d <= PI + 1e-12);
            prop_assert!((circle_dist(a, b) - circle_dist(b, a)).abs() < 1e-12);
        }
    }
}
