use super::lambda_a_n;
use crate::model::{angle_diff, ReturnMap};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Step of the central differences applied to the residual.
///
/// The residual is a small smooth function, so the step can be far larger
/// than the general-purpose one without hurting truncation error.
pub const SINGULAR_LIMIT_FD_STEP: f64 = 1e-4;

/// Uniform grid over `x ∈ [0, 2π)` and `ȳ ∈ [0, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceGrid {
    pub nx: usize,
    pub ny: usize,
    pub y_max: f64,
}

impl Default for ConvergenceGrid {
    fn default() -> Self {
        Self { nx: 128, ny: 17, y_max: 1.0 }
    }
}

impl ConvergenceGrid {
    fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let ny = self.ny.max(2);
        (0..self.nx).flat_map(move |i| {
            (0..ny).map(move |j| (TAU * i as f64 / self.nx as f64, self.y_max * j as f64 / (ny - 1) as f64))
        })
    }
}

/// Sup-norm distances between the rescaled return map at `λ_(a,n)` and its
/// singular limit `(h_a(x, ȳ), 0)` over the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: u32,
    pub lambda: f64,
    pub first_component_error: f64,
    pub second_component_error: f64,
    pub value_error: f64,
    pub d1_error: f64,
    pub d2_error: f64,
    /// `λ^{δ−1} (y_max + max Φ₂)^δ`, an upper bound for the second component.
    pub second_component_bound: f64,
    /// Largest second component on the `ȳ = 0` line.
    pub second_component_on_axis: f64,
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub a: f64,
    pub grid: ConvergenceGrid,
    pub fd_step: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    fn column_decreasing(&self, col: impl Fn(&ConvergenceRow) -> f64) -> bool {
        self.rows.windows(2).all(|w| col(&w[1]) < col(&w[0]))
    }

    pub fn values_decreasing(&self) -> bool {
        self.column_decreasing(|r| r.value_error)
    }

    pub fn d1_decreasing(&self) -> bool {
        self.column_decreasing(|r| r.d1_error)
    }

    pub fn d2_decreasing(&self) -> bool {
        self.column_decreasing(|r| r.d2_error)
    }

    pub fn last(&self) -> Option<&ConvergenceRow> {
        self.rows.last()
    }
}

/// Residual of the rescaled map against the singular limit, computed without
/// forming the two nearly equal large angles.
///
/// With `λ = λ_(a,n)`, `−K_ω ln λ = 2πn + a`, so modulo 2π the first
/// component of the residual is
/// `λΦ₁(x, λȳ) − K_ω ln(1 + (Φ₂(x, λȳ) − Φ₂(x, 0))/(ȳ + Φ₂(x, 0)))`.
pub fn residual(map: &ReturnMap, lambda: f64, x: f64, ybar: f64) -> Option<(f64, f64)> {
    let pert = map.perturbation();
    let d = map.params().derived();
    let y = lambda * ybar;
    let frozen = ybar + pert.phi2(x, 0.0);
    let moving = ybar + pert.phi2(x, y);
    if !(frozen > 0.0 && moving > 0.0) {
        return None;
    }
    let r1 = lambda * pert.phi1(x, y)
        - d.k_omega * ((pert.phi2(x, y) - pert.phi2(x, 0.0)) / frozen).ln_1p();
    let r2 = lambda.powf(d.delta - 1.0) * moving.powf(d.delta);
    Some((r1, r2))
}

/// The same residual obtained by evaluating both maps and subtracting.
pub fn naive_residual(map: &ReturnMap, a: f64, x: f64, ybar: f64) -> Result<(f64, f64)> {
    let (fx, fy) = map.apply_rescaled(x, ybar)?;
    let pert = map.perturbation();
    let params = map.params();
    let frozen = ybar + pert.phi2(x, 0.0);
    let hx = x + params.xi() + a - params.k_omega() * frozen.ln();
    Ok((angle_diff(fx, hx), fy))
}

pub fn singular_limit_convergence(
    map: &ReturnMap,
    a: f64,
    ns: &[u32],
    grid: ConvergenceGrid,
) -> Result<ConvergenceTable> {
    if grid.nx == 0 || grid.ny == 0 || !(grid.y_max > 0.0) {
        return Err(Error::Precondition("convergence grid must be nonempty".into()));
    }
    let k = map.params().k_omega();
    let d = map.params().derived();
    let (_, phi2_max) = map.perturbation().phi2_section_range();
    let h = SINGULAR_LIMIT_FD_STEP;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let lambda = lambda_a_n(k, a, n);
        let map_n = map.with_params(map.params().with_lambda(lambda)?);
        let r = |x: f64, yb: f64| residual(&map_n, lambda, x, yb);
        let mut row = ConvergenceRow {
            n,
            lambda,
            first_component_error: 0.0,
            second_component_error: 0.0,
            value_error: 0.0,
            d1_error: 0.0,
            d2_error: 0.0,
            second_component_bound: lambda.powf(d.delta - 1.0) * (grid.y_max + phi2_max).powf(d.delta),
            second_component_on_axis: 0.0,
            excluded: 0,
        };
        for (x, yb) in grid.points() {
            let stencil = [
                r(x, yb),
                r(x + h, yb),
                r(x - h, yb),
                r(x, yb + h),
                r(x, yb - h),
                r(x + h, yb + h),
                r(x + h, yb - h),
                r(x - h, yb + h),
                r(x - h, yb - h),
            ];
            if stencil.iter().any(Option::is_none) {
                row.excluded += 1;
                continue;
            }
            let s: Vec<(f64, f64)> = stencil.into_iter().map(Option::unwrap).collect();
            let (c, xp, xm, yp, ym, pp, pm, mp, mm) = (s[0], s[1], s[2], s[3], s[4], s[5], s[6], s[7], s[8]);
            row.first_component_error = row.first_component_error.max(c.0.abs());
            row.second_component_error = row.second_component_error.max(c.1.abs());
            if yb == 0.0 {
                row.second_component_on_axis = row.second_component_on_axis.max(c.1.abs());
            }
            for comp in [|p: (f64, f64)| p.0, |p: (f64, f64)| p.1] {
                let dx = (comp(xp) - comp(xm)) / (2.0 * h);
                let dy = (comp(yp) - comp(ym)) / (2.0 * h);
                let dxx = (comp(xp) - 2.0 * comp(c) + comp(xm)) / (h * h);
                let dyy = (comp(yp) - 2.0 * comp(c) + comp(ym)) / (h * h);
                let dxy = (comp(pp) - comp(pm) - comp(mp) + comp(mm)) / (4.0 * h * h);
                row.d1_error = row.d1_error.max(dx.abs()).max(dy.abs());
                row.d2_error = row.d2_error.max(dxx.abs()).max(dyy.abs()).max(dxy.abs());
            }
        }
        row.value_error = row.first_component_error.max(row.second_component_error);
        rows.push(row);
    }
    Ok(ConvergenceTable { a, grid, fd_step: h, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelParams, Perturbation};
    use std::f64::consts::PI;

    fn reference() -> ReturnMap {
        ReturnMap::new(ModelParams::reference(1.0, 0.0).unwrap(), Perturbation::reference())
    }

    #[test]
    fn stable_and_naive_residuals_agree() {
        let map = reference();
        let a = 1.0;
        for n in [1u32, 2, 3] {
            let lambda = lambda_a_n(3.0, a, n);
            let m = map.with_params(map.params().with_lambda(lambda).unwrap());
            for i in 0..32 {
                let (x, yb) = (0.2 * i as f64, 0.03 * i as f64);
                let s = residual(&m, lambda, x, yb).unwrap();
                let nv = naive_residual(&m, a, x, yb).unwrap();
                assert!((s.0 - nv.0).abs() < 1e-12, "n={n}: {s:?} vs {nv:?}");
                assert!((s.1 - nv.1).abs() <= 1e-12 * s.1.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn first_component_error_is_lambda_phi1_for_y_independent_phi2() {
        let t = singular_limit_convergence(&reference(), PI, &[3, 4, 5], ConvergenceGrid::default()).unwrap();
        for row in &t.rows {
            // sup |λ cos x| is attained at x = 0, which lies on the grid.
            assert!((row.first_component_error - row.lambda).abs() < 1e-15 * row.lambda.max(1.0));
        }
    }

    #[test]
    fn second_component_ratio_matches_sequence_geometry() {
        let t = singular_limit_convergence(&reference(), 0.0, &[4, 5, 6, 7], ConvergenceGrid::default()).unwrap();
        let expected = (-TAU * 5.0 / 3.0).exp();
        for w in t.rows.windows(2) {
            let ratio = w[1].second_component_error / w[0].second_component_error;
            assert!((ratio / expected - 1.0).abs() < 1e-9, "ratio {ratio} vs {expected}");
            let ratio1 = w[1].first_component_error / w[0].first_component_error;
            assert!((ratio1 / (-TAU / 3.0).exp() - 1.0).abs() < 1e-9);
        }
    }
}
