use super::{critical_points, dist_to_set, CircleMap, CriticalSet, DEFAULT_CRITICAL_CELLS};
use crate::linalg::fit_line;
use crate::model::wrap_angle;
use crate::verdict::{combine, Outcome, Verdict, Witness};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MisiurewiczOptions {
    pub delta0: f64,
    pub horizon: usize,
    /// Number of seed orbits used to fit `(λ₀, b₀)`.
    pub seeds: usize,
    /// Minimal fitted expansion rate accepted for (2a).
    pub min_expansion: f64,
    pub grid_cells: usize,
}

impl Default for MisiurewiczOptions {
    fn default() -> Self {
        Self { delta0: 0.05, horizon: 50, seeds: 32, min_expansion: 1e-2, grid_cells: DEFAULT_CRITICAL_CELLS }
    }
}

/// Finite-horizon evidence that `h_a` is of Misiurewicz type.
///
/// A pass means every sampled orbit satisfied the inequalities up to the
/// horizon with the recorded constants; it is not a proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisiurewiczCertificate {
    pub a: f64,
    pub delta0: f64,
    /// Exclusion radius used for the expansion fit (`δ₀/2`, or 1 when the
    /// critical set is empty).
    pub delta: f64,
    pub b0: f64,
    pub lambda0: f64,
    pub horizon: usize,
    pub seeds: usize,
    pub samples: usize,
    pub critical: CriticalSet,
    pub vacuous: bool,
    pub verdicts: Vec<Verdict>,
}

impl MisiurewiczCertificate {
    pub fn passed(&self) -> bool {
        combine(&self.verdicts) == Outcome::Pass
    }

    pub fn verdict(&self, condition: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.condition == condition)
    }
}

pub fn misiurewicz_check<M: CircleMap + ?Sized>(
    map: &M,
    a: f64,
    opts: &MisiurewiczOptions,
) -> Result<MisiurewiczCertificate> {
    if opts.horizon < 1 || !(opts.delta0 > 0.0) || opts.seeds == 0 {
        return Err(Error::Precondition(format!(
            "Misiurewicz check needs horizon >= 1, delta0 > 0 and seeds >= 1 (got {}, {}, {})",
            opts.horizon, opts.delta0, opts.seeds
        )));
    }
    let critical = critical_points(map, opts.grid_cells)?;
    let cs = critical.xs();
    let vacuous = cs.is_empty();
    let delta = if vacuous { 1.0 } else { 0.5 * opts.delta0 };
    let mut verdicts = Vec::new();

    if vacuous {
        verdicts.push(Verdict::new("1a", Outcome::Pass, Some(Witness::note("empty critical set"))));
        verdicts.push(Verdict::new("1b", Outcome::Pass, Some(Witness::note("empty critical set"))));
    } else {
        verdicts.push(check_1a(map, &cs, opts.delta0));
        verdicts.push(check_1b(map, a, &cs, opts.delta0, opts.horizon));
    }

    let samples = expansion_samples(map, a, &cs, delta, opts.delta0, opts.horizon, opts.seeds);
    let fit = fit_line(&samples.iter().map(|s| (s.n as f64, s.log_d)).collect::<Vec<_>>());
    let lambda0 = fit.map_or(f64::NAN, |f| f.slope);
    let b0 = samples
        .iter()
        .map(|s| (s.log_d - lambda0 * s.n as f64).exp() / delta)
        .fold(f64::INFINITY, f64::min);

    let expanding = lambda0 > opts.min_expansion && b0.is_finite() && b0 > 0.0;
    verdicts.push(Verdict::check(
        "2a",
        expanding,
        Witness::note(if expanding {
            "fitted growth rate and constant over orbits avoiding the critical neighbourhood"
        } else {
            "expansion failure: fitted growth rate not above the required minimum"
        })
        .compare(lambda0, opts.min_expansion),
    ));

    // (2b): orbits landing in C_δ₀ must have grown by at least b₀ e^{λ₀ n}.
    let mut worst: Option<(f64, &Sample)> = None;
    if expanding {
        for s in samples.iter().filter(|s| s.lands_near_critical) {
            let margin = s.log_d - (b0.ln() + lambda0 * s.n as f64);
            if worst.map_or(true, |(m, _)| margin < m) {
                worst = Some((margin, s));
            }
        }
    }
    let v2b = match worst {
        _ if !expanding => Verdict::new("2b", Outcome::Fail, Some(Witness::note("no expansion constants"))),
        None => Verdict::new("2b", Outcome::Pass, Some(Witness::note("no sampled orbit segment landed in C_delta0"))),
        Some((margin, s)) => Verdict::check(
            "2b",
            margin >= 0.0,
            Witness::note("tightest landing segment").at(s.n as u64).x(s.x).compare(s.log_d, b0.ln() + lambda0 * s.n as f64),
        ),
    };
    verdicts.push(v2b);

    Ok(MisiurewiczCertificate {
        a,
        delta0: opts.delta0,
        delta,
        b0,
        lambda0,
        horizon: opts.horizon,
        seeds: opts.seeds,
        samples: samples.len(),
        critical,
        vacuous,
        verdicts,
    })
}

fn check_1a<M: CircleMap + ?Sized>(map: &M, cs: &[f64], delta0: f64) -> Verdict {
    let mut worst = (f64::INFINITY, 0.0);
    for &c in cs {
        for j in 0..=64 {
            let x = wrap_angle(c - delta0 + 2.0 * delta0 * j as f64 / 64.0);
            let v = map.second_derivative(x).abs();
            if v < worst.0 {
                worst = (v, x);
            }
        }
    }
    Verdict::check(
        "1a",
        worst.0 > 1e-8,
        Witness::note("smallest |h''| sampled in C_delta0").x(worst.1).compare(worst.0, 1e-8),
    )
}

fn check_1b<M: CircleMap + ?Sized>(map: &M, a: f64, cs: &[f64], delta0: f64, horizon: usize) -> Verdict {
    let mut worst = (f64::INFINITY, 0u64, 0.0);
    for &c in cs {
        let mut x = c;
        for n in 1..=horizon {
            x = map.eval(a, x);
            let d = dist_to_set(x, cs);
            if d < worst.0 {
                worst = (d, n as u64, c);
            }
        }
    }
    Verdict::check(
        "1b",
        worst.0 >= delta0,
        Witness::note("closest approach of a critical orbit to the critical set")
            .at(worst.1)
            .x(worst.2)
            .compare(worst.0, delta0),
    )
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    n: usize,
    log_d: f64,
    x: f64,
    lands_near_critical: bool,
}

/// Collects `(n, ln |(hⁿ)'(x)|)` for orbit segments whose first `n` points
/// stay outside `C_δ`.
fn expansion_samples<M: CircleMap + ?Sized>(
    map: &M,
    a: f64,
    cs: &[f64],
    delta: f64,
    delta0: f64,
    horizon: usize,
    seeds: usize,
) -> Vec<Sample> {
    const GOLDEN: f64 = 0.618_033_988_749_894_8;
    let stride = (horizon / 64).max(1);
    let mut out = Vec::new();
    for s in 0..seeds {
        // Irrational offset keeps seeds off any finite set of special points.
        let mut x = wrap_angle(TAU * ((s as f64 + GOLDEN) / seeds as f64));
        let mut xs = Vec::with_capacity(horizon + 1);
        let mut prefix = Vec::with_capacity(horizon + 1);
        prefix.push(0.0);
        for _ in 0..horizon {
            xs.push(x);
            let last = *prefix.last().unwrap();
            prefix.push(last + map.derivative(x).abs().ln());
            x = map.eval(a, x);
        }
        xs.push(x);
        let outside: Vec<bool> = xs.iter().map(|&p| cs.is_empty() || dist_to_set(p, cs) >= delta).collect();
        let near0: Vec<bool> = xs.iter().map(|&p| !cs.is_empty() && dist_to_set(p, cs) < delta0).collect();
        for k in (0..horizon).step_by(stride) {
            for n in 1..=horizon - k {
                if !outside[k + n - 1] {
                    break;
                }
                out.push(Sample {
                    n,
                    log_d: prefix[k + n] - prefix[k],
                    x: xs[k],
                    lands_near_critical: near0[k + n],
                });
            }
        }
    }
    out
}

/// Per-critical-point (CE1)/(CE2) verdicts for a Misiurewicz-certified map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CeReport {
    pub a: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub horizon: usize,
    pub delta0: f64,
    pub b0: f64,
    pub lambda0: f64,
    pub verdicts: Vec<Verdict>,
}

impl CeReport {
    pub fn passed(&self) -> bool {
        combine(&self.verdicts) == Outcome::Pass
    }
}

/// Checks (CE1) `dist(hⁿ(c), C) ≥ min{δ₀/2, 2e^{−αn}}` and (CE2)
/// `|(hⁿ)'(h(c))| ≥ 2b₀δ₀e^{λn}` for `1 ≤ n ≤ horizon`.
pub fn collet_eckmann_check<M: CircleMap + ?Sized>(
    map: &M,
    cert: &MisiurewiczCertificate,
    lambda: f64,
    alpha: f64,
    horizon: usize,
) -> Result<CeReport> {
    if !(cert.lambda0.is_finite() && lambda < cert.lambda0 / 5.0) {
        return Err(Error::Precondition(format!(
            "Collet-Eckmann rate must satisfy lambda < lambda0/5 = {} (got {lambda})",
            cert.lambda0 / 5.0
        )));
    }
    if !(alpha > 0.0) {
        return Err(Error::Precondition(format!("alpha must be positive, got {alpha}")));
    }
    let cs = cert.critical.xs();
    let mut verdicts = Vec::new();
    if cs.is_empty() {
        verdicts.push(Verdict::new("CE1", Outcome::Pass, Some(Witness::note("empty critical set"))));
        verdicts.push(Verdict::new("CE2", Outcome::Pass, Some(Witness::note("empty critical set"))));
    }
    let log_bound2 = (2.0 * cert.b0 * cert.delta0).ln();
    for (i, &c) in cs.iter().enumerate() {
        let mut x = map.eval(cert.a, c);
        let mut log_d = 0.0;
        let mut ce1 = (f64::INFINITY, 0u64, 0.0, 0.0);
        let mut ce2 = (f64::INFINITY, 0u64, 0.0, 0.0);
        for n in 1..=horizon {
            // x = hⁿ(c); log_d = ln |(h^{n-1})'(h(c))|.
            let bound1 = (0.5 * cert.delta0).min(2.0 * (-alpha * n as f64).exp());
            let d = dist_to_set(x, &cs);
            if d - bound1 < ce1.0 {
                ce1 = (d - bound1, n as u64, d, bound1);
            }
            log_d += map.derivative(x).abs().ln();
            let bound2 = log_bound2 + lambda * n as f64;
            if log_d - bound2 < ce2.0 {
                ce2 = (log_d - bound2, n as u64, log_d, bound2);
            }
            x = map.eval(cert.a, x);
        }
        verdicts.push(Verdict::check(
            format!("CE1[c{}]", i + 1),
            ce1.0 >= 0.0,
            Witness::note("tightest distance to the critical set").at(ce1.1).x(c).compare(ce1.2, ce1.3),
        ));
        verdicts.push(Verdict::check(
            format!("CE2[c{}]", i + 1),
            ce2.0 >= 0.0,
            Witness::note("tightest log-derivative along the critical value orbit")
                .at(ce2.1)
                .x(c)
                .compare(ce2.2, ce2.3),
        ));
    }
    Ok(CeReport {
        a: cert.a,
        lambda,
        alpha,
        horizon,
        delta0: cert.delta0,
        b0: cert.b0,
        lambda0: cert.lambda0,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{CircleMapFamily, ExpandingMap};

    #[test]
    fn doubling_is_vacuous_with_log_two_rate() {
        let opts = MisiurewiczOptions { horizon: 200, ..Default::default() };
        let cert = misiurewicz_check(&ExpandingMap::doubling(), 0.0, &opts).unwrap();
        assert!(cert.vacuous && cert.passed());
        assert!((cert.lambda0 - std::f64::consts::LN_2).abs() < 0.01);
    }

    #[test]
    fn diffeomorphism_records_expansion_failure() {
        let opts = MisiurewiczOptions { horizon: 1000, ..Default::default() };
        let cert = misiurewicz_check(&CircleMapFamily::reference(0.3), 1.0, &opts).unwrap();
        assert!(cert.vacuous);
        assert!(!cert.verdict("2a").unwrap().pass, "lambda0 = {}", cert.lambda0);
        assert!(!cert.passed());
    }

    #[test]
    fn ce_requires_small_rate() {
        let cert = misiurewicz_check(&ExpandingMap::doubling(), 0.0, &MisiurewiczOptions::default()).unwrap();
        let err = collet_eckmann_check(&ExpandingMap::doubling(), &cert, cert.lambda0, 0.01, 50);
        assert!(matches!(err, Err(Error::Precondition(_))));
        let ok = collet_eckmann_check(&ExpandingMap::doubling(), &cert, 0.01, 0.01, 50).unwrap();
        assert!(ok.passed());
    }

    #[test]
    fn ce2_margin_shrinks_as_b0_grows() {
        let fam = CircleMapFamily::reference(5.0);
        let mut cert = misiurewicz_check(&fam, 2.0, &MisiurewiczOptions::default()).unwrap();
        let margin = |cert: &MisiurewiczCertificate| {
            let rep = collet_eckmann_check(&fam, cert, 0.01, 0.01, 30).unwrap();
            let v = rep.verdicts.iter().find(|v| v.condition == "CE2[c1]").unwrap().clone();
            let w = v.witness.unwrap();
            w.value.unwrap() - w.bound.unwrap()
        };
        cert.lambda0 = cert.lambda0.max(1.0);
        let mut last = f64::INFINITY;
        for b0 in [1e-3, 1e-2, 1e-1, 1.0, 10.0] {
            cert.b0 = b0;
            let m = margin(&cert);
            assert!(m < last);
            last = m;
        }
    }
}
