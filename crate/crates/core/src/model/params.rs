use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Eigenvalue data of one saddle-focus: a real rate and a complex pair.
///
/// For `O₁` the real eigenvalue is the expansion `E` and the pair is
/// `-C ± iω`; for `O₂` the roles of `C` and `E` swap. In both cases the
/// orderings are `C > E > 0`, `ω > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleFocus {
    pub contraction: f64,
    pub expansion: f64,
    pub frequency: f64,
}

impl SaddleFocus {
    pub fn new(contraction: f64, expansion: f64, frequency: f64) -> Result<Self> {
        let all_finite = contraction.is_finite() && expansion.is_finite() && frequency.is_finite();
        if !all_finite || !(contraction > expansion && expansion > 0.0) || !(frequency > 0.0) {
            return Err(Error::InvalidParams(format!(
                "saddle-focus needs C > E > 0 and ω > 0, got C={contraction}, E={expansion}, ω={frequency}"
            )));
        }
        Ok(Self { contraction, expansion, frequency })
    }

    /// Saddle value `C/E`.
    pub fn saddle_value(&self) -> f64 {
        self.contraction / self.expansion
    }
}

/// `(δ₁, δ₂, δ, K_ω)` derived from the two saddle-foci.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub delta1: f64,
    pub delta2: f64,
    pub delta: f64,
    pub k_omega: f64,
}

/// Flat, serialisable form of [`ModelParams`]; also the `[model]` config table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParamsSpec {
    pub c1: f64,
    pub e1: f64,
    pub omega1: f64,
    pub c2: f64,
    pub e2: f64,
    pub omega2: f64,
    pub xi: f64,
    pub lambda: f64,
}

/// Validated model parameters. Immutable; use the `with_*` methods to derive
/// neighbouring parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelParamsSpec", into = "ModelParamsSpec")]
pub struct ModelParams {
    o1: SaddleFocus,
    o2: SaddleFocus,
    xi: f64,
    lambda: f64,
    derived: DerivedConstants,
}

impl ModelParams {
    pub fn new(o1: SaddleFocus, o2: SaddleFocus, xi: f64, lambda: f64) -> Result<Self> {
        // Re-validate: the fields of SaddleFocus are public.
        let o1 = SaddleFocus::new(o1.contraction, o1.expansion, o1.frequency)?;
        let o2 = SaddleFocus::new(o2.contraction, o2.expansion, o2.frequency)?;
        if !xi.is_finite() {
            return Err(Error::InvalidParams(format!("xi must be finite, got {xi}")));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParams(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        let delta1 = o1.saddle_value();
        let delta2 = o2.saddle_value();
        let k_omega = (o2.expansion * o1.frequency + o1.contraction * o2.frequency)
            / (o1.expansion * o2.expansion);
        let derived = DerivedConstants { delta1, delta2, delta: delta1 * delta2, k_omega };
        Ok(Self { o1, o2, xi, lambda, derived })
    }

    /// Reference set used throughout the tests: `C₁=2, E₁=1, C₂=3, E₂=1,
    /// ξ=0, ω₁=ω₂=ω`, so that `δ=6` and `K_ω = 3ω`.
    pub fn reference(omega: f64, lambda: f64) -> Result<Self> {
        Self::new(
            SaddleFocus::new(2.0, 1.0, omega)?,
            SaddleFocus::new(3.0, 1.0, omega)?,
            0.0,
            lambda,
        )
    }

    pub fn o1(&self) -> SaddleFocus {
        self.o1
    }

    pub fn o2(&self) -> SaddleFocus {
        self.o2
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn derived(&self) -> DerivedConstants {
        self.derived
    }

    pub fn delta(&self) -> f64 {
        self.derived.delta
    }

    pub fn k_omega(&self) -> f64 {
        self.derived.k_omega
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.o1, self.o2, self.xi, lambda)
    }

    pub fn with_xi(&self, xi: f64) -> Result<Self> {
        Self::new(self.o1, self.o2, xi, self.lambda)
    }

    /// Rescales both frequencies so that the twisting number becomes `k_omega`.
    /// `K_ω` is linear in `(ω₁, ω₂)`, so the saddle values are untouched.
    pub fn with_twisting_number(&self, k_omega: f64) -> Result<Self> {
        if !(k_omega > 0.0) || !k_omega.is_finite() {
            return Err(Error::InvalidParams(format!("K_omega must be > 0, got {k_omega}")));
        }
        let s = k_omega / self.derived.k_omega;
        let mut o1 = self.o1;
        let mut o2 = self.o2;
        o1.frequency *= s;
        o2.frequency *= s;
        Self::new(o1, o2, self.xi, self.lambda)
    }
}

impl TryFrom<ModelParamsSpec> for ModelParams {
    type Error = Error;

    fn try_from(s: ModelParamsSpec) -> Result<Self> {
        Self::new(
            SaddleFocus::new(s.c1, s.e1, s.omega1)?,
            SaddleFocus::new(s.c2, s.e2, s.omega2)?,
            s.xi,
            s.lambda,
        )
    }
}

impl From<ModelParams> for ModelParamsSpec {
    fn from(p: ModelParams) -> Self {
        Self {
            c1: p.o1.contraction,
            e1: p.o1.expansion,
            omega1: p.o1.frequency,
            c2: p.o2.contraction,
            e2: p.o2.expansion,
            omega2: p.o2.frequency,
            xi: p.xi,
            lambda: p.lambda,
        }
    }
}

/// Returns `(δ₁, δ₂, δ, K_ω)` after validating the raw record.
pub fn derived_constants(spec: ModelParamsSpec) -> Result<DerivedConstants> {
    ModelParams::try_from(spec).map(|p| p.derived())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(c1: f64, omega: f64) -> ModelParamsSpec {
        ModelParamsSpec { c1, e1: 1.0, omega1: omega, c2: 3.0, e2: 1.0, omega2: omega, xi: 0.0, lambda: 0.0 }
    }

    #[test]
    fn reference_constants() {
        let d = derived_constants(spec(2.0, 1.0)).unwrap();
        assert_eq!((d.delta1, d.delta2, d.delta, d.k_omega), (2.0, 3.0, 6.0, 3.0));
    }

    #[test]
    fn twisting_number_is_three_omega() {
        for omega in [1.0, 2.0, 5.0] {
            let d = derived_constants(spec(2.0, omega)).unwrap();
            assert_eq!(d.k_omega, 3.0 * omega);
        }
    }

    #[test]
    fn saddle_value_boundary_is_rejected() {
        assert!(derived_constants(spec(1.0, 1.0)).is_err());
        assert!(derived_constants(spec(1.0 + 1e-9, 1.0)).is_ok());
        let d = derived_constants(spec(1.0 + 1e-9, 1.0)).unwrap();
        assert!(d.delta1 > 1.0);
    }

    #[test]
    fn bad_orderings_rejected() {
        let mut s = spec(2.0, 1.0);
        s.e2 = 4.0;
        assert!(ModelParams::try_from(s).is_err());
        let mut s = spec(2.0, 1.0);
        s.omega2 = 0.0;
        assert!(ModelParams::try_from(s).is_err());
        let mut s = spec(2.0, 1.0);
        s.lambda = -1e-3;
        assert!(ModelParams::try_from(s).is_err());
    }

    #[test]
    fn with_twisting_number_keeps_saddle_values() {
        let p = ModelParams::reference(1.0, 0.0).unwrap();
        let q = p.with_twisting_number(5.0).unwrap();
        assert!((q.k_omega() - 5.0).abs() < 1e-14);
        assert_eq!(q.delta(), 6.0);
    }

    #[test]
    fn serde_round_trip_is_flat() {
        let p = ModelParams::reference(2.0, 0.01).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"omega1\":2.0"));
        let back: ModelParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        let bad = json.replace("\"c1\":2.0", "\"c1\":0.5");
        assert!(serde_json::from_str::<ModelParams>(&bad).is_err());
    }
}
