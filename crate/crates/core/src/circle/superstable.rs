use super::{critical_points, pullback_lambda, CircleMap, DEFAULT_CRITICAL_CELLS};
use crate::model::{circle_dist, CylinderPoint, MapKind, ReturnMap};
use crate::{Error, Mat2, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuperstableOptions {
    pub period: usize,
    pub a_min: f64,
    pub a_max: f64,
    /// Number of grid cells used to bracket roots in `a`.
    pub grid: usize,
    pub tolerance: f64,
}

impl Default for SuperstableOptions {
    fn default() -> Self {
        Self { period: 2, a_min: 0.0, a_max: TAU, grid: 4096, tolerance: 1e-10 }
    }
}

/// A parameter `a*` at which a critical point is periodic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperstableOrbit {
    pub a_star: f64,
    pub critical_point: f64,
    pub period: usize,
    pub minimal_period: usize,
    /// Integer number of turns made by the lift over one period.
    pub winding: i64,
    /// `|h^p(c) − c|` on the circle.
    pub closure_error: f64,
    /// `(h^p)'(c)`.
    pub multiplier: f64,
    pub orbit: Vec<f64>,
}

impl SuperstableOrbit {
    /// `λ_(a*,n)` for `n = 1..=cap`.
    pub fn pullbacks(&self, k_omega: f64, cap: u32) -> Vec<(u32, f64)> {
        (1..=cap).map(|n| (n, pullback_lambda(k_omega, self.a_star, n))).collect()
    }
}

/// Finds parameters with `h_a^p(c) = c` for a critical point `c`.
///
/// For each `c`, `g(a) = ĥ_a^p(c) − c` is sampled on the window; every
/// crossing of a level `2πm` is bracketed and bisected until
/// `|g − 2πm| ≤ tolerance`. Results are sorted by `a*`, then by `c`.
pub fn superstable_search<M: CircleMap + ?Sized>(
    map: &M,
    opts: &SuperstableOptions,
) -> Result<Vec<SuperstableOrbit>> {
    if opts.period == 0 || opts.grid < 2 || !(opts.a_max > opts.a_min) {
        return Err(Error::Precondition("superstable search needs period >= 1, grid >= 2 and a nonempty window".into()));
    }
    let cs = critical_points(map, DEFAULT_CRITICAL_CELLS)?.xs();
    if cs.is_empty() {
        return Err(Error::Precondition("superstable search needs a nonempty critical set".into()));
    }
    let p = opts.period;
    let mut found = Vec::new();
    for &c in &cs {
        let g = |a: f64| iterate_lift(map, a, c, p) - c;
        let step = (opts.a_max - opts.a_min) / opts.grid as f64;
        let mut prev_a = opts.a_min;
        let mut prev_g = g(prev_a);
        for i in 1..=opts.grid {
            let a = opts.a_min + step * i as f64;
            let ga = g(a);
            let (lo_m, hi_m) = (prev_g.min(ga) / TAU, prev_g.max(ga) / TAU);
            let mut m = lo_m.ceil() as i64;
            while (m as f64) <= hi_m {
                let target = TAU * m as f64;
                if let Some(root) = bisect(&|a| g(a) - target, prev_a, a, opts.tolerance) {
                    found.push(describe(map, root, c, p, m));
                }
                m += 1;
            }
            prev_a = a;
            prev_g = ga;
        }
    }
    found.retain(|o| o.closure_error <= opts.tolerance);
    found.sort_by(|x, y| x.a_star.total_cmp(&y.a_star).then(x.critical_point.total_cmp(&y.critical_point)));
    found.dedup_by(|x, y| (x.a_star - y.a_star).abs() < 1e-9 && x.critical_point == y.critical_point);
    Ok(found)
}

fn iterate_lift<M: CircleMap + ?Sized>(map: &M, a: f64, x: f64, n: usize) -> f64 {
    (0..n).fold(x, |x, _| map.lift(a, x))
}

fn bisect(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= tol * 1e-2 || hi - lo < 1e-15 {
            return Some(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn describe<M: CircleMap + ?Sized>(map: &M, a: f64, c: f64, p: usize, m: i64) -> SuperstableOrbit {
    let mut orbit = vec![c];
    let mut x = c;
    let mut multiplier = 1.0;
    for _ in 0..p {
        multiplier *= map.derivative(x);
        x = map.eval(a, x);
        orbit.push(x);
    }
    orbit.pop();
    let closure_error = circle_dist(x, c);
    let minimal_period = (1..=p)
        .find(|&d| p % d == 0 && circle_dist(orbit.get(d).copied().unwrap_or(x), c) <= 1e-8)
        .unwrap_or(p);
    SuperstableOrbit { a_star: a, critical_point: c, period: p, minimal_period, winding: m, closure_error, multiplier, orbit }
}

/// Outcome of iterating the two-dimensional return map near a critical
/// periodic orbit of the singular limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneConfirmation {
    pub lambda: f64,
    pub period: Option<usize>,
    pub orbit: Vec<CylinderPoint>,
    /// Moduli of the eigenvalues of the Jacobian product over one period.
    pub multipliers: Option<[f64; 2]>,
    pub closure_error: f64,
}

impl PlaneConfirmation {
    pub fn is_attracting_with(&self, bound: f64) -> bool {
        self.multipliers.is_some_and(|m| m[0] < bound && m[1] < bound)
    }
}

/// Iterates `map` from `start` for `burn_in` steps, then looks for a period
/// up to `max_period` with closure below `1e-10`, and returns the multipliers
/// of the Jacobian product over that cycle.
pub fn confirm_in_plane(
    map: &ReturnMap,
    start: CylinderPoint,
    burn_in: usize,
    max_period: usize,
) -> Result<PlaneConfirmation> {
    let mut p = start;
    for _ in 0..burn_in {
        p = map.apply(p)?;
    }
    let mut orbit = vec![p];
    for _ in 0..max_period {
        orbit.push(map.apply(*orbit.last().unwrap())?);
    }
    let period = (1..=max_period).find(|&q| orbit[q].dist(&orbit[0]) <= 1e-10);
    let lambda = map.params().lambda();
    let Some(q) = period else {
        let closure_error = (1..=max_period).map(|q| orbit[q].dist(&orbit[0])).fold(f64::INFINITY, f64::min);
        return Ok(PlaneConfirmation { lambda, period: None, orbit, multipliers: None, closure_error });
    };
    orbit.truncate(q + 1);
    let closure_error = orbit[q].dist(&orbit[0]);
    orbit.pop();
    let mut product = Mat2::IDENTITY;
    for pt in &orbit {
        product = map.jacobian(MapKind::Return, pt.x, pt.y)? * product;
    }
    Ok(PlaneConfirmation {
        lambda,
        period: Some(q),
        orbit,
        multipliers: Some(product.eigenvalue_moduli()),
        closure_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::CircleMapFamily;

    #[test]
    fn finds_period_two_roots_at_large_twist() {
        let fam = CircleMapFamily::reference(5.0);
        let roots = superstable_search(&fam, &SuperstableOptions::default()).unwrap();
        let two: Vec<_> = roots.iter().filter(|o| o.minimal_period == 2).collect();
        assert!(!two.is_empty());
        for o in roots {
            assert!(o.closure_error <= 1e-10);
            assert!(o.multiplier.abs() <= 1e-10, "{o:?}");
        }
    }

    #[test]
    fn empty_critical_set_is_rejected() {
        let fam = CircleMapFamily::reference(0.3);
        assert!(superstable_search(&fam, &SuperstableOptions::default()).is_err());
    }
}
