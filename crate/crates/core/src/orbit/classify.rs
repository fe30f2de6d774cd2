use super::{iterate, lyapunov_along, rotation_set_2d};
use crate::model::{circle_dist, CylinderPoint, ModelParams, Perturbation, ReturnMap};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Iterate counts and thresholds used to label a parameter cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budget {
    pub burn_in: usize,
    pub iterates: usize,
    pub chi_thresh: f64,
    /// Largest transverse thickness (in `ln y`) accepted for an invariant curve.
    pub curve_thresh: f64,
    pub recurrence_tol: f64,
    pub max_period: usize,
    /// Points at the end of the orbit checked for periodicity.
    pub period_window: usize,
    pub rotation_seeds: usize,
    pub rotation_iterates: usize,
    pub start: (f64, f64),
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            burn_in: 10_000,
            iterates: 100_000,
            chi_thresh: 5e-3,
            curve_thresh: 0.5,
            recurrence_tol: 1e-8,
            max_period: 64,
            period_window: 128,
            rotation_seeds: 8,
            rotation_iterates: 2_000,
            start: (1.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeLabel {
    InvariantCurve,
    PeriodicSink,
    TransientChaos,
    StrangeAttractorCandidate,
    Escaped,
}

impl RegimeLabel {
    pub const ALL: [RegimeLabel; 5] = [
        RegimeLabel::InvariantCurve,
        RegimeLabel::PeriodicSink,
        RegimeLabel::TransientChaos,
        RegimeLabel::StrangeAttractorCandidate,
        RegimeLabel::Escaped,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeLabel::InvariantCurve => "InvariantCurve",
            RegimeLabel::PeriodicSink => "PeriodicSink",
            RegimeLabel::TransientChaos => "TransientChaos",
            RegimeLabel::StrangeAttractorCandidate => "StrangeAttractorCandidate",
            RegimeLabel::Escaped => "Escaped",
        }
    }
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeCell {
    pub lambda: f64,
    pub k_omega: f64,
    pub label: RegimeLabel,
    pub period: Option<usize>,
    pub chi1: f64,
    pub chi2: f64,
    pub thickness: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub escaped_fraction: f64,
}

/// Labels the attractor reached from `budget.start`.
///
/// Decision order: escape, detected period, `χ₁ > χ_thresh`, thin orbit
/// closure with `|χ₁| ≤ χ_thresh`, otherwise transient chaos.
pub fn classify_cell(map: &ReturnMap, budget: &Budget) -> Result<RegimeCell> {
    let lambda = map.params().lambda();
    if !(lambda > 0.0) {
        return Err(Error::Precondition("cells need lambda > 0".into()));
    }
    let mut cell = RegimeCell {
        lambda,
        k_omega: map.params().k_omega(),
        label: RegimeLabel::Escaped,
        period: None,
        chi1: f64::NAN,
        chi2: f64::NAN,
        thickness: f64::NAN,
        rho_min: f64::NAN,
        rho_max: f64::NAN,
        escaped_fraction: 0.0,
    };

    let eps = map.perturbation().epsilon();
    let seeds: Vec<CylinderPoint> = (0..budget.rotation_seeds)
        .map(|i| {
            let t = (i as f64 + 0.5) / budget.rotation_seeds as f64;
            CylinderPoint::new(TAU * t, eps * (2.0 * t - 1.0))
        })
        .collect();
    if let Ok(rot) = rotation_set_2d(map, &seeds, budget.rotation_iterates, 0) {
        cell.rho_min = rot.rho_min;
        cell.rho_max = rot.rho_max;
        cell.escaped_fraction = rot.escaped_fraction();
    } else {
        cell.escaped_fraction = 1.0;
    }

    let start = CylinderPoint::new(budget.start.0, budget.start.1);
    let rec = iterate(map, start, budget.iterates, budget.burn_in);
    if rec.escaped {
        return Ok(cell);
    }
    let est = lyapunov_along(map, &rec, 10, budget.iterates / 100)?;
    cell.chi1 = est.chi1;
    cell.chi2 = est.chi2;
    cell.thickness = thickness(&rec.points);

    let window = budget.period_window.min(rec.points.len());
    let tail = &rec.points[rec.points.len() - window..];
    cell.period = detect_period(tail, budget.max_period, budget.recurrence_tol);
    cell.label = if cell.period.is_some() {
        RegimeLabel::PeriodicSink
    } else if est.chi1 > budget.chi_thresh {
        RegimeLabel::StrangeAttractorCandidate
    } else if est.chi1.abs() <= budget.chi_thresh && cell.thickness < budget.curve_thresh {
        RegimeLabel::InvariantCurve
    } else {
        RegimeLabel::TransientChaos
    };
    Ok(cell)
}

fn detect_period(tail: &[CylinderPoint], max_period: usize, tol: f64) -> Option<usize> {
    (1..=max_period.min(tail.len().saturating_sub(1))).find(|&q| {
        (0..tail.len() - q).all(|i| {
            let (a, b) = (tail[i], tail[i + q]);
            circle_dist(a.x, b.x) <= tol && (a.y - b.y).abs() <= tol
        })
    })
}

/// Transverse thickness of the orbit closure: points are sorted by angle
/// and the 99th percentile of `|Δ ln y|` between angular neighbours is
/// returned. A graph-like invariant curve gives a small value; a folded or
/// two-dimensional cloud gives a large one.
fn thickness(points: &[CylinderPoint]) -> f64 {
    let mut pts: Vec<(f64, f64)> = points.iter().filter(|p| p.y > 0.0).map(|p| (p.x, p.y.ln())).collect();
    if pts.len() < 3 {
        return 0.0;
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut jumps: Vec<f64> = pts.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect();
    jumps.push((pts[0].1 - pts[pts.len() - 1].1).abs());
    jumps.sort_by(f64::total_cmp);
    jumps[((jumps.len() as f64 * 0.99) as usize).min(jumps.len() - 1)]
}

/// Empirical regime boundaries in one `K_ω` column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub k_omega: f64,
    /// Largest `λ` of the run of invariant-curve cells starting at the
    /// smallest `λ` (none if that cell is not an invariant curve).
    pub t2: Option<f64>,
    /// Smallest `λ` labelled as a strange-attractor candidate.
    pub t1: Option<f64>,
    /// `t2 ≤ t1`, or vacuously true if either is undefined.
    pub ordered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub lambdas: Vec<f64>,
    pub k_omegas: Vec<f64>,
    /// Row-major: all `λ` for the first `K_ω`, then the next column.
    pub cells: Vec<Result<RegimeCell, String>>,
    pub boundaries: Vec<Boundary>,
}

impl ScanResult {
    pub fn cell(&self, k_index: usize, lambda_index: usize) -> &Result<RegimeCell, String> {
        &self.cells[k_index * self.lambdas.len() + lambda_index]
    }

    pub fn column(&self, k_index: usize) -> &[Result<RegimeCell, String>] {
        let n = self.lambdas.len();
        &self.cells[k_index * n..(k_index + 1) * n]
    }
}

/// Classifies every `(λ, K_ω)` cell. Cells run in parallel on the current
/// rayon pool and are assembled by grid index, so the result does not
/// depend on scheduling. Per-cell failures are kept as messages.
pub fn scan(
    base: &ModelParams,
    pert: &Perturbation,
    lambdas: &[f64],
    k_omegas: &[f64],
    budget: &Budget,
) -> Result<ScanResult> {
    let sorted = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
    if lambdas.is_empty() || k_omegas.is_empty() || !sorted(lambdas) || !sorted(k_omegas) {
        return Err(Error::Config("scan grids must be nonempty and strictly increasing".into()));
    }
    let nl = lambdas.len();
    let cells: Vec<Result<RegimeCell, String>> = (0..nl * k_omegas.len())
        .into_par_iter()
        .map(|idx| {
            let (k, l) = (k_omegas[idx / nl], lambdas[idx % nl]);
            let params = base.with_twisting_number(k).and_then(|p| p.with_lambda(l)).map_err(|e| e.to_string())?;
            classify_cell(&ReturnMap::new(params, pert.clone()), budget).map_err(|e| e.to_string())
        })
        .collect();
    let mut result = ScanResult { lambdas: lambdas.to_vec(), k_omegas: k_omegas.to_vec(), cells, boundaries: Vec::new() };
    result.boundaries = (0..k_omegas.len()).map(|k| column_boundaries(k_omegas[k], lambdas, result.column(k))).collect();
    Ok(result)
}

pub fn column_boundaries(k_omega: f64, lambdas: &[f64], column: &[Result<RegimeCell, String>]) -> Boundary {
    let label = |i: usize| column[i].as_ref().ok().map(|c| c.label);
    let mut t2 = None;
    for (i, &l) in lambdas.iter().enumerate() {
        if label(i) == Some(RegimeLabel::InvariantCurve) {
            t2 = Some(l);
        } else {
            break;
        }
    }
    let t1 = (0..lambdas.len()).find(|&i| label(i) == Some(RegimeLabel::StrangeAttractorCandidate)).map(|i| lambdas[i]);
    let ordered = match (t2, t1) {
        (Some(a), Some(b)) => a <= b,
        _ => true,
    };
    Boundary { k_omega, t2, t1, ordered }
}
