use super::{critical_points, CircleMap, DEFAULT_CRITICAL_CELLS};
use crate::model::wrap_angle;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Rotation numbers (in turns per iterate) realised by a degree-one map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationInterval {
    pub rho_min: f64,
    pub rho_max: f64,
    /// Each endpoint is accurate to within this many turns.
    pub error_bound: f64,
    /// Set when the interval is narrower than `2/n_iter`.
    pub single: Option<f64>,
    pub seed_min: f64,
    pub seed_max: f64,
    pub n_iter: usize,
    pub seeds: usize,
}

impl RotationInterval {
    pub fn width(&self) -> f64 {
        self.rho_max - self.rho_min
    }
}

/// Estimates the rotation interval of `h_a`.
///
/// Seed orbits give interior points. The endpoints come from the monotone
/// upper and lower maps `F⁺(x) = max_{t ≤ x} F(t)` and
/// `F⁻(x) = min_{t ≥ x} F(t)`, whose rotation numbers are the extreme
/// rotation numbers of the lift `F`.
pub fn rotation_interval<M: CircleMap + ?Sized>(
    map: &M,
    a: f64,
    n_iter: usize,
    n_seeds: usize,
) -> Result<RotationInterval> {
    if map.degree() != 1 {
        return Err(Error::Precondition("rotation numbers need a degree-one map".into()));
    }
    if n_iter < 1000 || n_seeds == 0 {
        return Err(Error::Precondition(format!(
            "rotation interval needs n_iter >= 1000 and at least one seed (got {n_iter}, {n_seeds})"
        )));
    }
    let critical = critical_points(map, DEFAULT_CRITICAL_CELLS)?;
    let maxima: Vec<f64> = critical.points.iter().filter(|p| p.is_local_max()).map(|p| p.x).collect();
    let minima: Vec<f64> = critical.points.iter().filter(|p| !p.is_local_max()).map(|p| p.x).collect();

    let lift = |x: f64| map.lift(a, x);
    let upper = |x: f64| {
        maxima.iter().fold(lift(x), |best, &m| {
            let k = ((x - m) / TAU).floor();
            best.max(lift(m) + TAU * k)
        })
    };
    let lower = |x: f64| {
        minima.iter().fold(lift(x), |best, &m| {
            let k = ((x - m) / TAU).ceil();
            best.min(lift(m) + TAU * k)
        })
    };

    let mut seed_min = f64::INFINITY;
    let mut seed_max = f64::NEG_INFINITY;
    for s in 0..n_seeds {
        let x0 = TAU * (s as f64 + 0.381_966_011_250_105) / n_seeds as f64;
        let rho = mean_displacement(&lift, x0, n_iter);
        seed_min = seed_min.min(rho);
        seed_max = seed_max.max(rho);
    }
    let rho_min = seed_min.min(mean_displacement(&lower, 0.0, n_iter));
    let rho_max = seed_max.max(mean_displacement(&upper, 0.0, n_iter));
    let n = n_iter as f64;
    let single = (rho_max - rho_min <= 2.0 / n).then(|| 0.5 * (rho_min + rho_max));
    Ok(RotationInterval {
        rho_min,
        rho_max,
        error_bound: 1.0 / n,
        single,
        seed_min,
        seed_max,
        n_iter,
        seeds: n_seeds,
    })
}

/// `(F̂ⁿ(x) − x)/(2πn)` accumulated step by step on the reduced angle.
fn mean_displacement(lift: &dyn Fn(f64) -> f64, x0: f64, n: usize) -> f64 {
    let mut x = wrap_angle(x0);
    let mut total = 0.0;
    for _ in 0..n {
        let next = lift(x);
        total += next - x;
        x = wrap_angle(next);
    }
    total / (TAU * n as f64)
}
