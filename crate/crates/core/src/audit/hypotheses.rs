//! The individual checks of the rank-one hypothesis suite.

use crate::circle::{
    critical_points, misiurewicz_check, monotonicity_partition, singular_limit_convergence,
    transition_matrix, CircleMap, ConvergenceGrid, ConvergenceTable, CriticalSet, MisiurewiczCertificate,
    MisiurewiczOptions, TransitionMatrix, 
};
use crate::model::{circle_dist, wrap_angle, MapKind, ModelParams, Perturbation, ReturnMap};
use crate::verdict::{Outcome, Verdict, Witness};
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct H1Options {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_count: usize,
    /// Grid points per axis in `(x, ȳ) ∈ [0, 2π) × [0, 1]`.
    pub grid: usize,
    pub ratio_cap: f64,
    pub injectivity_points: usize,
}

impl Default for H1Options {
    fn default() -> Self {
        Self {
            lambda_min: 1e-4,
            lambda_max: 1e-2,
            lambda_count: 8,
            grid: 64,
            ratio_cap: 1e3,
            injectivity_points: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H1Evidence {
    /// `(λ, max/min of |det D𝓕|)` for each sampled `λ`.
    pub ratios: Vec<(f64, f64)>,
    /// `sqrt` of the largest ratio.
    pub k: f64,
    /// Largest sampled `λ` up to which every ratio stayed under the cap.
    pub lambda2: Option<f64>,
    pub injectivity_collisions: usize,
    pub verdicts: Vec<Verdict>,
}

/// Distortion bound (H1)(3) and an injectivity spot check (H1)(2).
pub fn audit_h1(params: &ModelParams, pert: &Perturbation, opts: &H1Options, seed: u64) -> Result<H1Evidence> {
    let n = opts.lambda_count.max(1);
    let lambdas: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 == n {
                return opts.lambda_max;
            }
            let t = i as f64 / (n - 1) as f64;
            (opts.lambda_min.ln() + t * (opts.lambda_max / opts.lambda_min).ln()).exp()
        })
        .collect();
    let g = opts.grid.max(2);
    let mut ratios = Vec::with_capacity(n);
    let mut degenerate: Option<(f64, f64, f64)> = None;
    for &lambda in &lambdas {
        let map = ReturnMap::new(params.with_lambda(lambda)?, pert.clone());
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..g {
            for j in 0..g {
                let x = TAU * i as f64 / g as f64;
                let yb = j as f64 / (g - 1) as f64;
                let det = map.jacobian(MapKind::Rescaled, x, yb)?.det().abs();
                if det <= 1e-300 && degenerate.is_none() {
                    degenerate = Some((lambda, x, yb));
                }
                lo = lo.min(det);
                hi = hi.max(det);
            }
        }
        ratios.push((lambda, hi / lo));
    }
    let worst = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut lambda2 = None;
    for &(l, r) in &ratios {
        if r <= opts.ratio_cap {
            lambda2 = Some(l);
        } else {
            break;
        }
    }
    let bound_ok = degenerate.is_none() && ratios.iter().all(|r| r.1 <= opts.ratio_cap);
    let mut w = Witness::note(match degenerate {
        Some(_) => "degenerate determinant".to_string(),
        None => "largest determinant ratio over the sampled lambdas".to_string(),
    })
    .compare(worst, opts.ratio_cap);
    if let Some((l, x, _)) = degenerate {
        w = w.x(x).compare(l, 1e-300);
    }
    let mut verdicts = vec![Verdict::check("H1(3)", bound_ok, w)];

    let collisions = injectivity_collisions(params, pert, opts.lambda_max, opts.injectivity_points, seed)?;
    verdicts.push(Verdict::check(
        "H1(2)",
        collisions == 0,
        Witness::note("image pairs within 1e-12 whose preimages are more than 1e-9 apart")
            .compare(collisions as f64, 0.0),
    ));
    Ok(H1Evidence { ratios, k: worst.sqrt(), lambda2, injectivity_collisions: collisions, verdicts })
}

fn injectivity_collisions(params: &ModelParams, pert: &Perturbation, lambda: f64, n: usize, seed: u64) -> Result<usize> {
    let map = ReturnMap::new(params.with_lambda(lambda)?, pert.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut images = Vec::with_capacity(n);
    for _ in 0..n {
        let x = rng.gen_range(0.0..TAU);
        let yb = rng.gen_range(0.0..1.0);
        if let Ok((fx, fy)) = map.apply_rescaled(x, yb) {
            images.push((fx, fy, x, yb));
        }
    }
    images.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut collisions = 0;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[j].0 - images[i].0 > 1e-12 {
                break;
            }
            let (a, b) = (images[i], images[j]);
            let close_image = (a.1 - b.1).abs() <= 1e-12;
            let far_pre = circle_dist(a.2, b.2).max((a.3 - b.3).abs()) > 1e-9;
            if close_image && far_pre {
                collisions += 1;
            }
        }
    }
    Ok(collisions)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct H23Options {
    pub a: f64,
    pub n_min: u32,
    /// Largest `n`; chosen from `K_ω` and the tolerance when absent.
    pub n_max: Option<u32>,
    pub tolerance: f64,
    pub grid: ConvergenceGrid,
}

impl Default for H23Options {
    fn default() -> Self {
        Self { a: 1.0, n_min: 3, n_max: None, tolerance: 1e-3, grid: ConvergenceGrid::default() }
    }
}

impl H23Options {
    /// Smallest `n ≥ 12` with `λ_(a,n) < tolerance / 10`: slower decay of
    /// `λ_n` at larger `K_ω` needs more turns.
    pub fn resolved_n_max(&self, k_omega: f64) -> u32 {
        self.n_max.unwrap_or_else(|| {
            let needed = (k_omega * (10.0 / self.tolerance).ln() - self.a) / TAU;
            (needed.ceil().max(0.0) as u32 + 1).max(12).max(self.n_min + 1)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H23Evidence {
    pub table: ConvergenceTable,
    pub verdicts: Vec<Verdict>,
}

/// Singular limit and `C²` convergence along `λ_(a,n)`.
pub fn audit_h2_h3(params: &ModelParams, pert: &Perturbation, opts: &H23Options) -> Result<H23Evidence> {
    let n_max = opts.resolved_n_max(params.k_omega());
    let ns: Vec<u32> = (opts.n_min..=n_max).collect();
    let map = ReturnMap::new(params.clone(), pert.clone());
    let table = singular_limit_convergence(&map, opts.a, &ns, opts.grid)?;
    let last = table.last().cloned();
    let tol = opts.tolerance;
    let mk = |cond: &str, decreasing: bool, value: f64| {
        Verdict::check(
            cond,
            decreasing && value < tol,
            Witness::note(if decreasing { "monotone table; final error vs tolerance" } else { "table not monotone decreasing" })
                .at(n_max as u64)
                .compare(value, tol),
        )
    };
    let verdicts = match last {
        None => vec![Verdict::new("H2", Outcome::Fail, Some(Witness::note("empty table")))],
        Some(r) => vec![
            mk("H2", table.values_decreasing(), r.value_error),
            mk("H3(d1)", table.d1_decreasing(), r.d1_error),
            mk("H3(d2)", table.d2_decreasing(), r.d2_error),
        ],
    };
    Ok(H23Evidence { table, verdicts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct H4Options {
    pub a_points: usize,
    pub misiurewicz: MisiurewiczOptions,
}

impl Default for H4Options {
    fn default() -> Self {
        Self { a_points: 256, misiurewicz: MisiurewiczOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H4Evidence {
    /// Parameters whose certificate passed, with `(λ₀, b₀)`.
    pub passing: Vec<(f64, f64, f64)>,
    /// Certificate at the selected `a*` (largest `λ₀` among passing values).
    pub selected: Option<MisiurewiczCertificate>,
    pub critical: CriticalSet,
    pub verdict: Verdict,
}

/// Scans `a` over `[0, 2π)` for Misiurewicz-type members of the family.
pub fn audit_h4<M: CircleMap + ?Sized>(map: &M, opts: &H4Options) -> Result<H4Evidence> {
    let critical = critical_points(map, opts.misiurewicz.grid_cells)?;
    let n = opts.a_points.max(1);
    let certs: Vec<Result<MisiurewiczCertificate>> = (0..n)
        .into_par_iter()
        .map(|i| misiurewicz_check(map, TAU * i as f64 / n as f64, &opts.misiurewicz))
        .collect();
    let mut passing = Vec::new();
    let mut selected: Option<MisiurewiczCertificate> = None;
    for cert in certs {
        let cert = cert?;
        if cert.passed() {
            passing.push((cert.a, cert.lambda0, cert.b0));
            if selected.as_ref().map_or(true, |s| cert.lambda0 > s.lambda0) {
                selected = Some(cert);
            }
        }
    }
    let verdict = if critical.is_empty() {
        if selected.is_some() {
            Verdict::check("H4", true, Witness::note("vacuous: empty critical set and uniformly expanding"))
        } else {
            Verdict::check(
                "H4",
                false,
                Witness::note("diffeomorphism regime - increase K_omega (empty critical set, no expansion)"),
            )
        }
    } else {
        Verdict::check(
            "H4",
            !passing.is_empty(),
            Witness::note("number of Misiurewicz-passing parameters in the scan").compare(passing.len() as f64, 1.0),
        )
    };
    Ok(H4Evidence { passing, selected, critical, verdict })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct H5Options {
    pub threshold: f64,
    pub horizon: usize,
    pub fd_step: f64,
}

impl Default for H5Options {
    fn default() -> Self {
        Self { threshold: 1e-3, horizon: 20, fd_step: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H5Evidence {
    /// Per critical point: `d/da h_a(c) − d/da p(a)` from continuation.
    pub margins: Vec<f64>,
    /// The same quantity from `1 + Σ 1/(hᵏ)'(p)`.
    pub series_margins: Vec<f64>,
    /// Continuation margins at steps `1e-3, 1e-4, 1e-5` for the first
    /// critical point.
    pub step_consistency: Vec<(f64, f64)>,
    pub proxy: bool,
    pub verdict: Verdict,
}

/// Numerical proxy for parameter transversality.
///
/// `p = h_{a*}(c)` is continued to nearby `a` by pulling its orbit point
/// `h^N(p)` back along the same inverse branches; `d/da h_a(c) = 1` since
/// `a` enters additively.
pub fn audit_h5_proxy<M: CircleMap + ?Sized>(map: &M, cert: &MisiurewiczCertificate, opts: &H5Options) -> Result<H5Evidence> {
    let cs = cert.critical.xs();
    if cs.is_empty() {
        let verdict = Verdict::check(
            "H5",
            false,
            Witness::note("proxy - not a proof; no critical points (degenerate case)").compare(0.0, opts.threshold),
        );
        return Ok(H5Evidence { margins: vec![0.0], series_margins: vec![0.0], step_consistency: Vec::new(), proxy: true, verdict });
    }
    let a = cert.a;
    let mut margins = Vec::new();
    let mut series = Vec::new();
    let mut steps = Vec::new();
    let mut ambiguous = None;
    for (ci, &c) in cs.iter().enumerate() {
        let p = map.eval(a, c);
        let mut orbit = vec![p];
        for _ in 0..opts.horizon {
            orbit.push(map.eval(a, *orbit.last().unwrap()));
        }
        if let Some(k) = orbit.iter().position(|&x| crate::circle::dist_to_set(x, &cs) < 0.5 * cert.delta0) {
            ambiguous = Some((ci, k));
            margins.push(f64::NAN);
            series.push(f64::NAN);
            continue;
        }
        let cont = |s: f64| continuation_derivative(map, a, &orbit, s);
        let m = 1.0 - cont(opts.fd_step);
        margins.push(m);
        // (hᵏ)'(p) kept as log-modulus and sign to avoid overflow.
        let (mut log_d, mut negative, mut sum) = (0.0, false, 0.0);
        for &x in orbit.iter().take(opts.horizon) {
            let d = map.derivative(x);
            log_d += d.abs().ln();
            negative ^= d < 0.0;
            let term = (-log_d).exp();
            sum += if negative { -term } else { term };
        }
        series.push(1.0 + sum);
        if ci == 0 {
            for s in [1e-3, 1e-4, 1e-5] {
                steps.push((s, 1.0 - cont(s)));
            }
        }
    }
    let verdict = if let Some((ci, k)) = ambiguous {
        Verdict::new(
            "H5",
            Outcome::Inconclusive,
            Some(Witness::note("proxy - not a proof; continuation ambiguous: orbit of p passes within delta0/2 of the critical set").at(k as u64).x(cs[ci])),
        )
    } else {
        let worst = margins.iter().map(|m| m.abs()).fold(f64::INFINITY, f64::min);
        Verdict::check(
            "H5",
            worst > opts.threshold,
            Witness::note("proxy - not a proof; smallest |margin| over critical points").compare(worst, opts.threshold),
        )
    };
    Ok(H5Evidence { margins, series_margins: series, step_consistency: steps, proxy: true, verdict })
}

/// `dp/da` at `a` by central differences of the pulled-back point.
fn continuation_derivative<M: CircleMap + ?Sized>(map: &M, a: f64, orbit: &[f64], s: f64) -> f64 {
    let plus = pull_back(map, a + s, orbit);
    let minus = pull_back(map, a - s, orbit);
    crate::model::angle_diff(plus, minus) / (2.0 * s)
}

/// Starting from the last orbit point, solves `h_ã(z_k) = z_{k+1}` with
/// Newton's method seeded at `x_k`, which keeps the itinerary of the
/// original orbit.
fn pull_back<M: CircleMap + ?Sized>(map: &M, a: f64, orbit: &[f64]) -> f64 {
    let mut z_next = *orbit.last().unwrap();
    for &x in orbit[..orbit.len() - 1].iter().rev() {
        // Lift the target so that it sits next to h_ã(x).
        let fx = map.lift(a, x);
        let target = fx + crate::model::angle_diff(z_next, fx);
        let mut z = x;
        for _ in 0..50 {
            let step = (map.lift(a, z) - target) / map.derivative(z);
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        z_next = wrap_angle(z);
    }
    z_next
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct H6Options {
    pub fd_step: f64,
    pub threshold: f64,
}

impl Default for H6Options {
    fn default() -> Self {
        Self { fd_step: 1e-6, threshold: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H6Evidence {
    /// `(c, finite-difference derivative, closed form)` per critical point.
    pub values: Vec<(f64, f64, f64)>,
    pub verdict: Verdict,
}

/// First component of the singular-limit extension off the circle,
/// `x + ξ + a − K_ω ln(y + Φ₂(x, y))`.
pub fn turn_extension(params: &ModelParams, pert: &Perturbation, a: f64, x: f64, y: f64) -> f64 {
    x + params.xi() + a - params.k_omega() * (y + pert.phi2(x, y)).ln()
}

/// Nondegeneracy at turns: `∂/∂y` of the extension at `y = 0` is nonzero at
/// every critical point. Closed form: `−K_ω (1 + ∂Φ₂/∂y) / Φ₂` at `(c, 0)`.
pub fn audit_h6(params: &ModelParams, pert: &Perturbation, critical: &CriticalSet, a: f64, opts: &H6Options) -> H6Evidence {
    let h = opts.fd_step;
    let values: Vec<(f64, f64, f64)> = critical
        .points
        .iter()
        .map(|p| {
            let c = p.x;
            let fd = (turn_extension(params, pert, a, c, h) - turn_extension(params, pert, a, c, -h)) / (2.0 * h);
            let closed = -params.k_omega() * (1.0 + pert.phi2_field().dy(c, 0.0)) / pert.phi2(c, 0.0);
            (c, fd, closed)
        })
        .collect();
    let verdict = if values.is_empty() {
        Verdict::check("H6", false, Witness::note("no critical points to check"))
    } else {
        let (c, fd, _) = values.iter().copied().fold((0.0, f64::INFINITY, 0.0), |acc, v| if v.1.abs() < acc.1.abs() { v } else { acc });
        Verdict::check(
            "H6",
            fd.abs() > opts.threshold,
            Witness::note("smallest |d/dy| of the turn extension at a critical point").x(c).compare(fd.abs(), opts.threshold),
        )
    };
    H6Evidence { values, verdict }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H7Evidence {
    pub lambda0: f64,
    pub transition: Option<TransitionMatrix>,
    pub verdicts: Vec<Verdict>,
}

/// `exp(λ₀/3) > 2`.
pub fn h7_expansion_holds(lambda0: f64) -> bool {
    (lambda0 / 3.0).exp() > 2.0
}

/// Mixing: strong enough expansion and a primitive transition matrix.
pub fn audit_h7<M: CircleMap + ?Sized>(map: &M, cert: &MisiurewiczCertificate) -> H7Evidence {
    let expansion = Verdict::check(
        "H7(a)",
        h7_expansion_holds(cert.lambda0),
        Witness::note("exp(lambda0/3) vs 2").compare((cert.lambda0 / 3.0).exp(), 2.0),
    );
    let (transition, primitive) = match monotonicity_partition(map, cert.a) {
        Ok(p) => {
            let q = transition_matrix(&p);
            let v = Verdict::check(
                "H7(b)",
                q.is_primitive(),
                Witness::note("smallest N with Q^N > 0").compare(q.primitive_power.map_or(f64::INFINITY, |n| n as f64), crate::circle::MAX_PRIMITIVE_POWER as f64),
            );
            (Some(q), v)
        }
        Err(e) => (None, Verdict::check("H7(b)", false, Witness::note(e.to_string()))),
    };
    H7Evidence { lambda0: cert.lambda0, transition, verdicts: vec![expansion, primitive] }
}
