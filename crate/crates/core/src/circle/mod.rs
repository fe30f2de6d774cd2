//! The singular-limit circle maps `h_a(x) = x + ξ + a − K_ω ln Φ₂(x, 0)` and
//! the one-dimensional machinery built on them.
//!
//! Everything here is generic over [`CircleMap`], so the same checks run on
//! the family coming from the model and on synthetic harness maps such as
//! the doubling map.

mod critical;
mod misiurewicz;
mod partition;
mod rotation;
mod sequences;
mod singular_limit;
mod superstable;

pub use critical::{critical_points, CriticalPoint, CriticalSet, DEFAULT_CRITICAL_CELLS};
pub use misiurewicz::{
    collet_eckmann_check, misiurewicz_check, CeReport, MisiurewiczCertificate,
    MisiurewiczOptions,
};
pub use partition::{
    iii_holds, monotonicity_partition, accumulation_conditions, transition_matrix, Partition, AccumulationReport,
    TransitionMatrix, MAX_PRIMITIVE_POWER,
};
pub use rotation::{rotation_interval, RotationInterval};
pub use sequences::{k_of_lambda, lambda_a_n, lambda_n, pullback_lambda};
pub use singular_limit::{
    naive_residual, residual, singular_limit_convergence, ConvergenceGrid, ConvergenceRow, ConvergenceTable,
    SINGULAR_LIMIT_FD_STEP,
};
pub use superstable::{
    confirm_in_plane, superstable_search, PlaneConfirmation, SuperstableOptions,
    SuperstableOrbit,
};

use crate::model::{wrap_angle, ModelParams, Perturbation, TrigPoly};
use crate::{Error, Result};
use std::f64::consts::TAU;

/// A one-parameter family of circle maps whose lift is
/// `x̂ ↦ d·x̂ + a + base(x̂)` with `base` 2π-periodic and `d` the degree.
///
/// The parameter enters additively, so the critical set does not depend on
/// `a` and the family is equivariant under rigid rotations.
pub trait CircleMap: Sync {
    fn degree(&self) -> u32;

    /// The periodic part of the lift at `a = 0`.
    fn base(&self, x: f64) -> f64;

    fn base_d1(&self, x: f64) -> f64;

    fn base_d2(&self, x: f64) -> f64;

    fn lift(&self, a: f64, x: f64) -> f64 {
        self.degree() as f64 * x + a + self.base(x)
    }

    fn eval(&self, a: f64, x: f64) -> f64 {
        wrap_angle(self.lift(a, x))
    }

    fn derivative(&self, x: f64) -> f64 {
        self.degree() as f64 + self.base_d1(x)
    }

    fn second_derivative(&self, x: f64) -> f64 {
        self.base_d2(x)
    }

    /// Iterates `n` times and accumulates `ln |(hⁿ)'(x)|`.
    fn orbit_log_derivative(&self, a: f64, x: f64, n: usize) -> (f64, f64) {
        let mut x = wrap_angle(x);
        let mut log_d = 0.0;
        for _ in 0..n {
            log_d += self.derivative(x).abs().ln();
            x = self.eval(a, x);
        }
        (x, log_d)
    }
}

/// `h_a(x) = x + ξ + a − K_ω ln Φ₂(x, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMapFamily {
    xi: f64,
    k_omega: f64,
    section: TrigPoly,
}

impl CircleMapFamily {
    pub fn new(xi: f64, k_omega: f64, section: TrigPoly) -> Result<Self> {
        if !(k_omega.is_finite() && k_omega >= 0.0) || !xi.is_finite() {
            return Err(Error::InvalidParams(format!(
                "circle family needs finite xi and K_omega >= 0 (got xi={xi}, K_omega={k_omega})"
            )));
        }
        let n = 1 << 14;
        for i in 0..n {
            let x = TAU * i as f64 / n as f64;
            let v = section.value(x);
            if !(v > 0.0) {
                return Err(Error::Config(format!(
                    "Phi2(x, 0) must be positive, got {v} at x={x}"
                )));
            }
        }
        Ok(Self { xi, k_omega, section })
    }

    /// The family obtained in the singular limit of the given model.
    pub fn from_model(params: &ModelParams, pert: &Perturbation) -> Result<Self> {
        Self::new(params.xi(), params.k_omega(), pert.phi2_field().base.clone())
    }

    /// The reference family `Φ₂(x, 0) = 1.1 + sin x` with `ξ = 0`.
    pub fn reference(k_omega: f64) -> Self {
        let pert = Perturbation::reference();
        Self::new(0.0, k_omega, pert.phi2_field().base.clone()).expect("reference section is positive")
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn k_omega(&self) -> f64 {
        self.k_omega
    }

    pub fn section(&self) -> &TrigPoly {
        &self.section
    }

    pub fn with_k_omega(&self, k_omega: f64) -> Result<Self> {
        Self::new(self.xi, k_omega, self.section.clone())
    }
}

impl CircleMap for CircleMapFamily {
    fn degree(&self) -> u32 {
        1
    }

    fn base(&self, x: f64) -> f64 {
        self.xi - self.k_omega * self.section.value(x).ln()
    }

    fn base_d1(&self, x: f64) -> f64 {
        -self.k_omega * self.section.d1(x) / self.section.value(x)
    }

    fn base_d2(&self, x: f64) -> f64 {
        let v = self.section.value(x);
        let r = self.section.d1(x) / v;
        -self.k_omega * (self.section.d2(x) / v - r * r)
    }
}

/// `x ↦ d·x + a`; `d = 2` is the doubling map used as an expanding harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpandingMap {
    pub degree: u32,
}

impl ExpandingMap {
    pub fn doubling() -> Self {
        Self { degree: 2 }
    }
}

impl CircleMap for ExpandingMap {
    fn degree(&self) -> u32 {
        self.degree
    }

    fn base(&self, _x: f64) -> f64 {
        0.0
    }

    fn base_d1(&self, _x: f64) -> f64 {
        0.0
    }

    fn base_d2(&self, _x: f64) -> f64 {
        0.0
    }
}

/// Samples `(x, h_a(x))` on a uniform grid, for plotting.
pub fn graph<M: CircleMap + ?Sized>(map: &M, a: f64, points: usize) -> Vec<(f64, f64)> {
    (0..points)
        .map(|i| {
            let x = TAU * i as f64 / points as f64;
            (x, map.eval(a, x))
        })
        .collect()
}

/// Distance from `x` to the nearest point of `set` on the circle.
pub(crate) fn dist_to_set(x: f64, set: &[f64]) -> f64 {
    set.iter().map(|&c| crate::model::circle_dist(x, c)).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::circle_dist;
    use proptest::prelude::*;

    #[test]
    fn constant_section_is_rigid_rotation() {
        let fam = CircleMapFamily::new(0.2, 3.0, TrigPoly::constant(1.5)).unwrap();
        let shift = 0.2 + 0.7 - 3.0 * 1.5f64.ln();
        for i in 0..50 {
            let x = i as f64 * 0.12;
            assert!(circle_dist(fam.eval(0.7, x), wrap_angle(x + shift)) < 1e-14);
            assert_eq!(fam.derivative(x), 1.0);
        }
    }

    #[test]
    fn reference_value_at_zero() {
        let fam = CircleMapFamily::reference(3.0);
        let v = fam.eval(0.0, 0.0);
        assert!((v - (TAU - 3.0 * 1.1f64.ln())).abs() < 1e-14);
        assert!((v - 5.99726).abs() < 1e-5);
    }

    #[test]
    fn nonpositive_section_is_a_config_error() {
        let section = TrigPoly::new(0.5, vec![crate::model::Harmonic { k: 1, cos: 0.0, sin: 1.0 }]);
        assert!(matches!(CircleMapFamily::new(0.0, 1.0, section), Err(Error::Config(_))));
    }

    #[test]
    fn derivatives_match_differences() {
        let fam = CircleMapFamily::reference(5.0);
        let h = 1e-5;
        for i in 0..40 {
            let x = 0.157 * i as f64;
            let d = (fam.lift(0.0, x + h) - fam.lift(0.0, x - h)) / (2.0 * h);
            let dd = (fam.derivative(x + h) - fam.derivative(x - h)) / (2.0 * h);
            assert!((d - fam.derivative(x)).abs() < 1e-8);
            assert!((dd - fam.second_derivative(x)).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn lift_has_degree_one(x in -20.0f64..20.0, a in -7.0f64..7.0, k in 0.0f64..20.0) {
            let fam = CircleMapFamily::reference(k);
            let diff = fam.lift(a, x + TAU) - fam.lift(a, x);
            prop_assert!((diff - TAU).abs() < 1e-9);
            let m = (fam.lift(a, x) - fam.eval(a, x)) / TAU;
            prop_assert!((m - m.round()).abs() < 1e-9);
        }

        #[test]
        fn family_is_rotation_equivariant(x in 0.0f64..TAU, a in -7.0f64..7.0, s in -7.0f64..7.0) {
            let fam = CircleMapFamily::reference(5.0);
            let lhs = fam.eval(a + s, x);
            prop_assert!(circle_dist(lhs, wrap_angle(fam.eval(a, x) + s)) < 1e-11);
        }
    }
}
