//! Strict TOML run configuration.

use crate::audit::AuditConfig;
use crate::circle::{ConvergenceGrid, MisiurewiczOptions, SuperstableOptions};
use crate::model::{ModelParams, ModelParamsSpec, Perturbation, PerturbationSpec};
use crate::orbit::{Budget, LyapunovOptions};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Everything a command needs. `[model]` and `[perturbation]` are required;
/// every other table falls back to documented defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParamsSpec,
    pub perturbation: PerturbationSpec,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; not part of the resolved-config hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Output directory; not part of the resolved-config hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub iterate: IterateSection,
    #[serde(default)]
    pub lyapunov: LyapunovSection,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub audit: AuditConfig,
    #[serde(default)]
    pub misiurewicz: MisiurewiczSection,
    #[serde(default)]
    pub superstable: SuperstableSection,
    #[serde(default)]
    pub rotation: RotationSection,
    #[serde(default)]
    pub singular_limit: SingularLimitSection,
    #[serde(default)]
    pub plot: PlotSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IterateSection {
    pub x0: f64,
    pub y0: f64,
    pub iterates: usize,
    pub burn_in: usize,
}

impl Default for IterateSection {
    fn default() -> Self {
        Self { x0: 1.0, y0: 0.0, iterates: 10_000, burn_in: 1_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LyapunovSection {
    pub x0: f64,
    pub y0: f64,
    pub options: LyapunovOptions,
    /// Largest lag of the `cos x` autocorrelation.
    pub max_lag: usize,
}

impl Default for LyapunovSection {
    fn default() -> Self {
        Self { x0: 1.0, y0: 0.0, options: LyapunovOptions::default(), max_lag: 50 }
    }
}

/// Scan grid. `lambdas` wins over the log-spaced range when given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    pub lambdas: Option<Vec<f64>>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_count: usize,
    /// Twisting numbers; the `[model]` value when absent.
    pub k_omegas: Option<Vec<f64>>,
    pub budget: Budget,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            lambdas: None,
            lambda_min: 1e-4,
            lambda_max: 1e-1,
            lambda_count: 8,
            k_omegas: None,
            budget: Budget::default(),
        }
    }
}

impl ScanSection {
    pub fn lambda_grid(&self) -> Result<Vec<f64>> {
        if let Some(l) = &self.lambdas {
            return Ok(l.clone());
        }
        let n = self.lambda_count;
        if n == 0 || !(self.lambda_min > 0.0) || !(self.lambda_max >= self.lambda_min) {
            return Err(Error::Config("scan needs 0 < lambda_min <= lambda_max and lambda_count >= 1".into()));
        }
        Ok((0..n)
            .map(|i| match i {
                0 => self.lambda_min,
                _ if i + 1 == n => self.lambda_max,
                _ => {
                    let t = i as f64 / (n - 1) as f64;
                    (self.lambda_min.ln() + t * (self.lambda_max / self.lambda_min).ln()).exp()
                }
            })
            .collect())
    }
}

/// Collet-Eckmann follow-up on certified parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CeSection {
    /// Rate as a fraction of `λ₀`; must stay below 1/5.
    pub rate_fraction: f64,
    pub alpha: f64,
    pub horizon: usize,
}

impl Default for CeSection {
    fn default() -> Self {
        Self { rate_fraction: 0.1, alpha: 0.1, horizon: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MisiurewiczSection {
    /// Explicit parameters; an evenly spaced scan over `[0, 2π)` otherwise.
    pub a_values: Option<Vec<f64>>,
    pub a_points: usize,
    pub options: MisiurewiczOptions,
    pub ce: CeSection,
}

impl Default for MisiurewiczSection {
    fn default() -> Self {
        Self { a_values: None, a_points: 64, options: MisiurewiczOptions::default(), ce: CeSection::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuperstableSection {
    pub options: SuperstableOptions,
    /// Number of pulled-back `λ` values listed per root.
    pub pullbacks: u32,
    /// Iterates before the return map is checked for a periodic sink.
    pub confirm_burn_in: usize,
    pub confirm_max_period: usize,
}

impl Default for SuperstableSection {
    fn default() -> Self {
        Self { options: SuperstableOptions::default(), pullbacks: 5, confirm_burn_in: 10_000, confirm_max_period: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RotationSection {
    pub a: f64,
    pub iterates: usize,
    pub seeds: usize,
    pub burn_in: usize,
}

impl Default for RotationSection {
    fn default() -> Self {
        Self { a: 0.0, iterates: 10_000, seeds: 16, burn_in: 1_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SingularLimitSection {
    pub a: f64,
    pub n_min: u32,
    pub n_max: u32,
    pub grid: ConvergenceGrid,
}

impl Default for SingularLimitSection {
    fn default() -> Self {
        Self { a: 1.0, n_min: 3, n_max: 12, grid: ConvergenceGrid::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlotSection {
    pub a: f64,
    pub k_omegas: Vec<f64>,
    pub points: usize,
}

impl Default for PlotSection {
    fn default() -> Self {
        Self { a: 0.1, k_omegas: vec![0.1, 0.5, 2.0, 5.0], points: 512 }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Builds the validated model objects.
    pub fn resolve(&self) -> Result<(ModelParams, Perturbation)> {
        let params = ModelParams::try_from(self.model)?;
        let pert = Perturbation::from_spec(self.perturbation.clone())?;
        Ok((params, pert))
    }

    /// The config with run-environment fields (threads, output directory)
    /// cleared; this is what outputs embed and hash.
    pub fn canonical(&self) -> Self {
        Self { threads: None, out: None, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[model]
c1 = 2.0
e1 = 1.0
omega1 = 1.0
c2 = 3.0
e2 = 1.0
omega2 = 1.0
xi = 0.0
lambda = 0.001

[perturbation]
family = "reference"
phi1_amplitude = 1.0
phi2_offset = 1.1
phi2_amplitude = 1.0
epsilon = 0.05
"#;

    #[test]
    fn minimal_config_resolves_with_defaults() {
        let c = RunConfig::from_toml_str(MINIMAL).unwrap();
        let (p, _) = c.resolve().unwrap();
        assert_eq!(p.k_omega(), 3.0);
        assert_eq!(c.seed, 0);
        assert_eq!(c.superstable.options.period, 2);
        assert_eq!(c.scan.lambda_grid().unwrap().len(), 8);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for extra in ["bogus = 1\n", "[scan]\nlambda_cnt = 3\n", "[audit.h1]\ncap = 3\n"] {
            let text = if extra.starts_with('[') { format!("{MINIMAL}\n{extra}") } else { format!("{extra}{MINIMAL}") };
            assert!(matches!(RunConfig::from_toml_str(&text), Err(Error::Config(_))), "{extra}");
        }
    }

    #[test]
    fn physical_parameters_have_no_defaults() {
        let without_model = MINIMAL.replace("[model]", "[unused]");
        assert!(RunConfig::from_toml_str(&without_model).is_err());
        let missing_xi = MINIMAL.replace("xi = 0.0\n", "");
        assert!(RunConfig::from_toml_str(&missing_xi).is_err());
    }

    #[test]
    fn invalid_physics_is_a_validation_error() {
        let bad = MINIMAL.replace("c1 = 2.0", "c1 = 0.5");
        let e = RunConfig::from_toml_str(&bad).unwrap().resolve().unwrap_err();
        assert!(e.is_validation());
    }

    #[test]
    fn nested_tables_parse() {
        let text = format!(
            "{MINIMAL}\n[scan]\nk_omegas = [1.0, 2.0]\nlambdas = [1e-3]\n[scan.budget]\niterates = 20000\n[audit.h1]\nratio_cap = 1e9\n[superstable.options]\nperiod = 3\n"
        );
        let c = RunConfig::from_toml_str(&text).unwrap();
        assert_eq!(c.scan.budget.iterates, 20_000);
        assert_eq!(c.audit.h1.ratio_cap, 1e9);
        assert_eq!(c.superstable.options.period, 3);
    }
}
