use super::CircleMap;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Default number of grid cells used to bracket roots of `h'`.
pub const DEFAULT_CRITICAL_CELLS: usize = 1 << 14;

const ROOT_TOL: f64 = 1e-12;
const MORSE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub x: f64,
    pub second_derivative: f64,
}

impl CriticalPoint {
    pub fn is_local_max(&self) -> bool {
        self.second_derivative < 0.0
    }
}

/// Critical points of `h`, sorted in `[0, 2π)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CriticalSet {
    pub points: Vec<CriticalPoint>,
}

impl CriticalSet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }
}

/// Finds every zero of `h'` on the circle.
///
/// Sign changes are bracketed on `cells` uniform cells, located by bisection
/// and polished by Newton while the iterate stays inside the bracket. A root
/// with `|h''| < 1e-8`, or a grid point where `|h'|` has a local minimum
/// below that level without changing sign, is reported as non-Morse.
pub fn critical_points<M: CircleMap + ?Sized>(map: &M, cells: usize) -> Result<CriticalSet> {
    if cells < 8 {
        return Err(Error::Precondition(format!("need at least 8 grid cells, got {cells}")));
    }
    let step = TAU / cells as f64;
    let d: Vec<f64> = (0..=cells).map(|i| map.derivative(i as f64 * step)).collect();
    let mut points = Vec::new();
    for i in 0..cells {
        let (x0, x1) = (i as f64 * step, (i + 1) as f64 * step);
        let (f0, f1) = (d[i], d[i + 1]);
        if f0 == 0.0 {
            points.push(polish(map, x0, x0, x0)?);
            continue;
        }
        if f0.signum() != f1.signum() && f1 != 0.0 {
            points.push(polish(map, x0, x1, 0.5 * (x0 + x1))?);
            continue;
        }
        // A tangency of h' with zero does not change sign; catch it as a
        // near-zero local minimum of |h'| on the grid.
        let prev = d[(i + cells - 1) % cells].abs();
        if f0.abs() < MORSE_TOL && f0.abs() <= prev && f0.abs() <= f1.abs() {
            return Err(Error::NonMorse { x: x0, second_derivative: map.second_derivative(x0) });
        }
    }
    points.sort_by(|a, b| a.x.total_cmp(&b.x));
    points.dedup_by(|a, b| (a.x - b.x).abs() < 1e-9);
    Ok(CriticalSet { points })
}

fn polish<M: CircleMap + ?Sized>(map: &M, lo: f64, hi: f64, start: f64) -> Result<CriticalPoint> {
    let (mut lo, mut hi) = (lo, hi);
    let mut x = start;
    if hi > lo {
        let f_lo = map.derivative(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let f = map.derivative(mid);
            if f == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if f.signum() == f_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-13 {
                break;
            }
        }
        x = 0.5 * (lo + hi);
    }
    for _ in 0..8 {
        let f = map.derivative(x);
        if f.abs() <= ROOT_TOL {
            break;
        }
        let next = x - f / map.second_derivative(x);
        if !(next >= lo - 1e-12 && next <= hi + 1e-12) {
            break;
        }
        x = next;
    }
    let second = map.second_derivative(x);
    if second.abs() < MORSE_TOL {
        return Err(Error::NonMorse { x, second_derivative: second });
    }
    Ok(CriticalPoint { x: crate::model::wrap_angle(x), second_derivative: second })
}
