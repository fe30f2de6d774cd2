use super::*;
use crate::circle::{critical_points, misiurewicz_check, ExpandingMap, MisiurewiczOptions, DEFAULT_CRITICAL_CELLS};
use crate::model::{FieldSpec, Harmonic, PerturbationSpec};

fn reference(k: f64) -> (ModelParams, Perturbation) {
    let p = ModelParams::reference(1.0, 1e-3).unwrap().with_twisting_number(k).unwrap();
    (p, Perturbation::reference())
}

/// `Φ₂ = 1.1 + sin x − y`, so `y + Φ₂` does not depend on `y`.
fn cancelling() -> Perturbation {
    let phi2 = FieldSpec {
        constant: 1.1,
        terms: vec![Harmonic { k: 1, cos: 0.0, sin: 1.0 }],
        y_slope: Some(TrigPoly::constant(-1.0)),
    };
    let phi1 = FieldSpec { constant: 0.0, terms: vec![Harmonic { k: 1, cos: 1.0, sin: 0.0 }], y_slope: None };
    Perturbation::from_spec(PerturbationSpec::Trig { phi1, phi2, epsilon: 0.05 }).unwrap()
}

use crate::model::TrigPoly;

#[test]
fn h7_boundary_is_exact() {
    let t = 3.0 * std::f64::consts::LN_2;
    assert!(h7_expansion_holds(t + 1e-12));
    assert!(!h7_expansion_holds(t - 1e-12));
    assert!(h7_expansion_holds(2.2));
    assert!(((2.2f64 / 3.0).exp() - 2.0820).abs() < 1e-4);
}

#[test]
fn h6_closed_form_matches_differences() {
    let (p, pert) = reference(5.0);
    let fam = CircleMapFamily::from_model(&p, &pert).unwrap();
    let crit = critical_points(&fam, DEFAULT_CRITICAL_CELLS).unwrap();
    let ev = audit_h6(&p, &pert, &crit, 0.7, &H6Options::default());
    assert_eq!(ev.values.len(), 2);
    for (c, fd, closed) in &ev.values {
        assert!(((fd - closed) / closed).abs() < 1e-6, "{fd} vs {closed}");
        let expected = -5.0 / (1.1 + c.sin());
        assert!((closed - expected).abs() < 1e-12);
    }
    assert!(ev.verdict.pass);
}

#[test]
fn h6_detects_engineered_cancellation() {
    let (p, _) = reference(5.0);
    let pert = cancelling();
    let fam = CircleMapFamily::from_model(&p, &pert).unwrap();
    let crit = critical_points(&fam, DEFAULT_CRITICAL_CELLS).unwrap();
    assert!(!crit.is_empty());
    let ev = audit_h6(&p, &pert, &crit, 0.0, &H6Options::default());
    assert!(!ev.verdict.pass);
    for (_, fd, closed) in &ev.values {
        assert!(fd.abs() < 1e-6 && closed.abs() < 1e-12);
    }
}

#[test]
fn h4_fails_in_diffeomorphism_regime() {
    let fam = CircleMapFamily::reference(0.3);
    let ev = audit_h4(&fam, &H4Options { a_points: 16, ..Default::default() }).unwrap();
    assert!(ev.critical.is_empty());
    assert!(!ev.verdict.pass);
    assert!(ev.verdict.witness.as_ref().unwrap().note.contains("diffeomorphism regime"));
}

#[test]
fn h4_is_vacuous_for_the_doubling_map() {
    let ev = audit_h4(&ExpandingMap::doubling(), &H4Options { a_points: 8, ..Default::default() }).unwrap();
    assert!(ev.verdict.pass);
    assert!(ev.verdict.witness.as_ref().unwrap().note.contains("vacuous"));
}

#[test]
fn h5_margin_agrees_with_series() {
    let fam = CircleMapFamily::reference(5.0);
    let cert = misiurewicz_check(&fam, 0.0, &MisiurewiczOptions::default()).unwrap();
    assert!(cert.passed());
    let ev = audit_h5_proxy(&fam, &cert, &H5Options::default()).unwrap();
    assert!(ev.proxy);
    assert!(ev.verdict.witness.as_ref().unwrap().note.contains("proxy"));
    for (m, s) in ev.margins.iter().zip(&ev.series_margins) {
        if m.is_finite() {
            assert!((m - s).abs() < 1e-4 * s.abs().max(1.0), "{m} vs {s}");
        }
    }
    let m: Vec<f64> = ev.step_consistency.iter().map(|s| s.1).collect();
    if !m.is_empty() {
        assert!((m[0] - m[2]).abs() < 1e-3 * m[2].abs().max(1.0), "{m:?}");
    }
}

#[test]
fn h5_rejects_family_without_critical_points() {
    let fam = CircleMapFamily::reference(0.3);
    let cert = misiurewicz_check(&fam, 0.0, &MisiurewiczOptions::default()).unwrap();
    let ev = audit_h5_proxy(&fam, &cert, &H5Options::default()).unwrap();
    assert_eq!(ev.margins, vec![0.0]);
    assert!(!ev.verdict.pass);
}

#[test]
fn h1_cap_and_injectivity_on_reference_model() {
    let (p, pert) = reference(5.0);
    let opts = H1Options { lambda_count: 3, grid: 32, injectivity_points: 20_000, ..Default::default() };
    let ev = audit_h1(&p, &pert, &opts, 1).unwrap();
    assert!(ev.k.is_finite() && ev.k > 1.0);
    assert_eq!(ev.injectivity_collisions, 0);
    // The default cap is violated by the Y^(δ−1) factor, ratio ≈ 3.1^5 / ...
    let ratios: Vec<f64> = ev.ratios.iter().map(|r| r.1).collect();
    assert!(ratios.iter().all(|r| *r > 1e3));
    assert!(!ev.verdicts[0].pass);
    assert!(ev.lambda2.is_none());
}

#[test]
fn h1_with_relaxed_cap_passes() {
    let (p, pert) = reference(5.0);
    let opts = H1Options { lambda_count: 3, grid: 32, injectivity_points: 1000, ratio_cap: 1e9, ..Default::default() };
    let ev = audit_h1(&p, &pert, &opts, 1).unwrap();
    assert!(ev.verdicts.iter().all(|v| v.pass));
    assert_eq!(ev.lambda2, Some(1e-2));
}

#[test]
fn h2_h3_schedule_grows_with_k() {
    let o = H23Options::default();
    assert_eq!(o.resolved_n_max(1.0), 12);
    assert!(o.resolved_n_max(20.0) > o.resolved_n_max(10.0));
}

#[test]
fn audit_is_deterministic_and_ordered() {
    let (p, pert) = reference(5.0);
    let cfg = AuditConfig {
        h1: H1Options { lambda_count: 2, grid: 16, injectivity_points: 2000, ..Default::default() },
        h4: H4Options { a_points: 32, ..Default::default() },
        ..Default::default()
    };
    let a = run_audit(&p, &pert, &cfg, 3).unwrap();
    let b = run_audit(&p, &pert, &cfg, 3).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let names: Vec<&str> = a.verdicts.iter().map(|v| v.condition.as_str()).collect();
    let first = |s: &str| names.iter().position(|n| n.starts_with(s)).unwrap();
    assert!(first("H1") < first("H2") && first("H2") < first("H3") && first("H3") < first("H4"));
    assert!(first("H4") < first("H5") && first("H5") < first("H6") && first("H6") < first("H7"));
    assert_eq!(a.passed(), a.verdicts.iter().all(|v| v.pass));
}
