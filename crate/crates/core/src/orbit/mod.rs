//! Orbits of the two-dimensional return map and the statistics computed
//! along them.

mod classify;
mod lyapunov;
mod rotation;
mod stats;

pub use classify::{
    classify_cell, column_boundaries, scan, Boundary, Budget, RegimeCell, RegimeLabel, ScanResult,
};
pub use lyapunov::{lyapunov, lyapunov_along, LyapunovEstimate, LyapunovOptions, SATURATED_EXPONENT};
pub use rotation::{rotation_set_2d, RotationSet};
pub use stats::{autocorrelation, birkhoff_average, Autocorrelation, BirkhoffAverage};

use crate::linalg::Mat2;
use crate::model::{CylinderPoint, MapKind, ReturnMap};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A map of the cylinder with a lift in the angular direction.
pub trait PlaneMap: Sync {
    /// Image of `p` and the lift displacement `x̂' − x̂`.
    fn step(&self, p: CylinderPoint) -> Result<(CylinderPoint, f64)>;

    fn jacobian(&self, p: CylinderPoint) -> Result<Mat2>;

    fn log_abs_det(&self, p: CylinderPoint) -> Result<f64> {
        Ok(self.jacobian(p)?.det().abs().ln())
    }

    /// Whether the orbit reached a point where the height has collapsed to
    /// zero through underflow rather than by leaving the domain.
    fn collapsed(&self, _p: CylinderPoint) -> bool {
        false
    }
}

impl PlaneMap for ReturnMap {
    fn step(&self, p: CylinderPoint) -> Result<(CylinderPoint, f64)> {
        self.step_with_displacement(p)
    }

    fn jacobian(&self, p: CylinderPoint) -> Result<Mat2> {
        ReturnMap::jacobian(self, MapKind::Return, p.x, p.y)
    }

    /// `ln δ + (δ−1) ln Y + ln |det DΨ|`, which stays finite where the
    /// determinant itself would underflow.
    fn log_abs_det(&self, p: CylinderPoint) -> Result<f64> {
        let big_y = self.entry_height(p);
        if !(big_y > 0.0) {
            return Err(Error::Escape(p));
        }
        let d = self.params().derived();
        let psi = ReturnMap::jacobian(self, MapKind::Psi21, p.x, p.y)?;
        Ok(d.delta.ln() + (d.delta - 1.0) * big_y.ln() + psi.det().abs().ln())
    }

    fn collapsed(&self, p: CylinderPoint) -> bool {
        self.params().lambda() == 0.0 && p.y == 0.0
    }
}

/// An orbit segment with escape bookkeeping.
///
/// When the orbit escapes, the last stored point is the one that could not
/// be mapped and `escape_index` is its position in `points`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub points: Vec<CylinderPoint>,
    /// Lift displacement of each step taken after burn-in.
    pub displacements: Vec<f64>,
    pub burn_in: usize,
    pub escaped: bool,
    pub escape_index: Option<usize>,
    /// Set when the escape happened during burn-in.
    pub escaped_in_burn_in: bool,
}

impl OrbitRecord {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points that have an image (all of them unless the orbit escaped).
    pub fn mapped_points(&self) -> &[CylinderPoint] {
        match self.escape_index {
            Some(i) => &self.points[..i],
            None => &self.points,
        }
    }
}

/// Iterates `map` from `p0`, discarding `burn_in` steps and storing the next
/// `n` points. Escapes are recorded, not raised.
pub fn iterate<M: PlaneMap + ?Sized>(map: &M, p0: CylinderPoint, n: usize, burn_in: usize) -> OrbitRecord {
    let mut p = p0;
    for _ in 0..burn_in {
        match map.step(p) {
            Ok((q, _)) => p = q,
            Err(_) => {
                return OrbitRecord {
                    points: vec![p],
                    displacements: Vec::new(),
                    burn_in,
                    escaped: true,
                    escape_index: Some(0),
                    escaped_in_burn_in: true,
                }
            }
        }
    }
    let mut points = Vec::with_capacity(n);
    let mut displacements = Vec::with_capacity(n);
    for k in 0..n {
        points.push(p);
        if k + 1 == n {
            break;
        }
        match map.step(p) {
            Ok((q, dx)) => {
                displacements.push(dx);
                p = q;
            }
            Err(_) => {
                return OrbitRecord {
                    points,
                    displacements,
                    burn_in,
                    escaped: true,
                    escape_index: Some(k),
                    escaped_in_burn_in: false,
                };
            }
        }
    }
    OrbitRecord { points, displacements, burn_in, escaped: false, escape_index: None, escaped_in_burn_in: false }
}
