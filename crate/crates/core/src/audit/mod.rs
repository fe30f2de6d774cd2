//! Numerical audit of the rank-one hypotheses (H1)-(H7).
//!
//! Every check is finite: a pass means "not contradicted at the recorded
//! horizons and tolerances". (H5) is a proxy and is always labelled so.

mod fraction;
mod hypotheses;

pub use fraction::{strange_attractor_fraction, wilson_interval, AttractorFraction};
pub use hypotheses::{
    audit_h1, audit_h2_h3, audit_h4, audit_h5_proxy, audit_h6, audit_h7, h7_expansion_holds,
    turn_extension, H1Evidence, H1Options, H23Evidence, H23Options, H4Evidence, H4Options,
    H5Evidence, H5Options, H6Evidence, H6Options, H7Evidence,
};

use crate::circle::CircleMapFamily;
use crate::model::{ModelParams, Perturbation};
use crate::verdict::{combine, Outcome, Verdict, Witness};
use crate::Result;
use serde::{Deserialize, Serialize};

pub const SUPPORTED_STATEMENT: &str = "hypotheses numerically supported at recorded horizons (H5 proxy)";
pub const UNSUPPORTED_STATEMENT: &str = "hypotheses not supported at recorded horizons";

/// Thresholds and horizons for every sub-audit; all overridable from config.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditConfig {
    pub h1: H1Options,
    pub h2_h3: H23Options,
    pub h4: H4Options,
    pub h5: H5Options,
    pub h6: H6Options,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisAudit {
    pub h1: H1Evidence,
    pub h2_h3: H23Evidence,
    pub h4: H4Evidence,
    pub h5: Option<H5Evidence>,
    pub h6: H6Evidence,
    pub h7: Option<H7Evidence>,
    /// Flattened verdicts in the order H1 to H7.
    pub verdicts: Vec<Verdict>,
    pub overall: Outcome,
    pub statement: String,
}

impl HypothesisAudit {
    pub fn passed(&self) -> bool {
        self.overall == Outcome::Pass
    }

    pub fn verdict(&self, condition: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.condition == condition)
    }
}

fn missing_a_star(condition: &str) -> Verdict {
    Verdict::check(condition, false, Witness::note("no Misiurewicz parameter a* from H4"))
}

/// Runs (H1)-(H7) in order and merges the verdicts.
pub fn run_audit(params: &ModelParams, pert: &Perturbation, config: &AuditConfig, seed: u64) -> Result<HypothesisAudit> {
    let family = CircleMapFamily::from_model(params, pert)?;
    let h1 = audit_h1(params, pert, &config.h1, seed)?;
    let h2_h3 = audit_h2_h3(params, pert, &config.h2_h3)?;
    let h4 = audit_h4(&family, &config.h4)?;
    let h5 = h4.selected.as_ref().map(|c| audit_h5_proxy(&family, c, &config.h5)).transpose()?;
    let a_star = h4.selected.as_ref().map_or(0.0, |c| c.a);
    let h6 = audit_h6(params, pert, &h4.critical, a_star, &config.h6);
    let h7 = h4.selected.as_ref().map(|c| audit_h7(&family, c));

    let mut verdicts = h1.verdicts.clone();
    verdicts.extend(h2_h3.verdicts.iter().cloned());
    verdicts.push(h4.verdict.clone());
    verdicts.push(h5.as_ref().map_or_else(|| missing_a_star("H5"), |e| e.verdict.clone()));
    verdicts.push(h6.verdict.clone());
    match &h7 {
        Some(e) => verdicts.extend(e.verdicts.iter().cloned()),
        None => verdicts.push(missing_a_star("H7")),
    }
    let overall = combine(&verdicts);
    let statement = if overall == Outcome::Pass { SUPPORTED_STATEMENT } else { UNSUPPORTED_STATEMENT }.to_string();
    Ok(HypothesisAudit { h1, h2_h3, h4, h5, h6, h7, verdicts, overall, statement })
}

#[cfg(test)]
mod tests;
