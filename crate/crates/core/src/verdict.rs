//! Pass/fail evidence shared by certificates, checks and audits.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    /// The check could not be carried out meaningfully (for example an orbit
    /// came too close to the critical set).
    Inconclusive,
}

impl Outcome {
    pub fn from_bool(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

/// Numeric evidence attached to a verdict: where the tightest case occurred
/// and how it compared to the bound.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

impl Witness {
    pub fn note(note: impl Into<String>) -> Self {
        Self { note: note.into(), ..Self::default() }
    }

    pub fn at(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn x(mut self, x: f64) -> Self {
        self.x = Some(x);
        self
    }

    pub fn compare(mut self, value: f64, bound: f64) -> Self {
        self.value = Some(value);
        self.bound = Some(bound);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub condition: String,
    pub pass: bool,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn new(condition: impl Into<String>, outcome: Outcome, witness: Option<Witness>) -> Self {
        Self { condition: condition.into(), pass: outcome == Outcome::Pass, outcome, witness }
    }

    pub fn check(condition: impl Into<String>, pass: bool, witness: Witness) -> Self {
        Self::new(condition, Outcome::from_bool(pass), Some(witness))
    }
}

/// Combined outcome: any failure fails, otherwise any inconclusive entry
/// makes the whole inconclusive.
pub fn combine<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> Outcome {
    let mut out = Outcome::Pass;
    for v in verdicts {
        match v.outcome {
            Outcome::Fail => return Outcome::Fail,
            Outcome::Inconclusive => out = Outcome::Inconclusive,
            Outcome::Pass => {}
        }
    }
    out
}
