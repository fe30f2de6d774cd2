use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::{Error, Result};

/// One harmonic `cos·cos(kx) + sin·sin(kx)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(u32, f64, f64)", into = "(u32, f64, f64)")]
pub struct Harmonic {
    pub k: u32,
    pub cos: f64,
    pub sin: f64,
}

impl From<(u32, f64, f64)> for Harmonic {
    fn from((k, cos, sin): (u32, f64, f64)) -> Self {
        Self { k, cos, sin }
    }
}

impl From<Harmonic> for (u32, f64, f64) {
    fn from(h: Harmonic) -> Self {
        (h.k, h.cos, h.sin)
    }
}

/// Trigonometric polynomial in the angle, with analytic derivatives.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPoly {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub terms: Vec<Harmonic>,
}

impl TrigPoly {
    pub fn constant(c: f64) -> Self {
        Self { constant: c, terms: Vec::new() }
    }

    pub fn new(constant: f64, terms: Vec<Harmonic>) -> Self {
        Self { constant, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.terms.iter().all(|h| h.cos == 0.0 && h.sin == 0.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.terms.iter().fold(self.constant, |acc, h| {
            let (s, c) = (h.k as f64 * x).sin_cos();
            acc + h.cos * c + h.sin * s
        })
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.terms.iter().fold(0.0, |acc, h| {
            let k = h.k as f64;
            let (s, c) = (k * x).sin_cos();
            acc + k * (h.sin * c - h.cos * s)
        })
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.terms.iter().fold(0.0, |acc, h| {
            let k = h.k as f64;
            let (s, c) = (k * x).sin_cos();
            acc - k * k * (h.cos * c + h.sin * s)
        })
    }

    /// Upper bound on `|value'|` (sum of harmonic amplitudes times `k`).
    pub fn lipschitz_bound(&self) -> f64 {
        self.terms.iter().map(|h| h.k as f64 * (h.cos.abs() + h.sin.abs())).sum()
    }
}

/// A smooth function on the strip, affine in the height:
/// `f(x, y) = base(x) + y·slope(x)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub terms: Vec<Harmonic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_slope: Option<TrigPoly>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Field {
    pub base: TrigPoly,
    pub slope: TrigPoly,
}

impl Field {
    pub fn new(base: TrigPoly, slope: TrigPoly) -> Self {
        Self { base, slope }
    }

    pub fn y_independent(base: TrigPoly) -> Self {
        Self { base, slope: TrigPoly::default() }
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        if self.slope.is_zero() {
            self.base.value(x)
        } else {
            self.base.value(x) + y * self.slope.value(x)
        }
    }

    pub fn dx(&self, x: f64, y: f64) -> f64 {
        if self.slope.is_zero() {
            self.base.d1(x)
        } else {
            self.base.d1(x) + y * self.slope.d1(x)
        }
    }

    pub fn dy(&self, x: f64, _y: f64) -> f64 {
        self.slope.value(x)
    }

    pub fn dxx(&self, x: f64, y: f64) -> f64 {
        if self.slope.is_zero() {
            self.base.d2(x)
        } else {
            self.base.d2(x) + y * self.slope.d2(x)
        }
    }

    pub fn is_y_independent(&self) -> bool {
        self.slope.is_zero()
    }

    fn from_spec(s: &FieldSpec) -> Self {
        Self {
            base: TrigPoly::new(s.constant, s.terms.clone()),
            slope: s.y_slope.clone().unwrap_or_default(),
        }
    }
}

/// Config form of the perturbation pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PerturbationSpec {
    /// `Φ₁ = A cos x`, `Φ₂ = offset + B sin x`.
    Reference {
        phi1_amplitude: f64,
        phi2_offset: f64,
        phi2_amplitude: f64,
        epsilon: f64,
    },
    /// Constant `Φ₁`, `Φ₂`; the singular limit is then a rigid rotation.
    Constant { phi1: f64, phi2: f64, epsilon: f64 },
    /// General trigonometric polynomials, optionally affine in `y`.
    Trig { phi1: FieldSpec, phi2: FieldSpec, epsilon: f64 },
}

impl PerturbationSpec {
    /// `Φ₁ = cos x`, `Φ₂ = 1.1 + sin x` on the strip `|y| <= 0.05`.
    pub fn reference() -> Self {
        Self::Reference { phi1_amplitude: 1.0, phi2_offset: 1.1, phi2_amplitude: 1.0, epsilon: 0.05 }
    }
}

/// The transition perturbation `(Φ₁, Φ₂)` with `Φ₂ > 0` on the strip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PerturbationSpec", into = "PerturbationSpec")]
pub struct Perturbation {
    phi1: Field,
    phi2: Field,
    epsilon: f64,
    spec: PerturbationSpec,
}

const POSITIVITY_GRID: usize = 1 << 14;

impl Perturbation {
    pub fn from_spec(spec: PerturbationSpec) -> Result<Self> {
        let (phi1, phi2, epsilon) = match &spec {
            PerturbationSpec::Reference { phi1_amplitude, phi2_offset, phi2_amplitude, epsilon } => (
                Field::y_independent(TrigPoly::new(0.0, vec![Harmonic { k: 1, cos: *phi1_amplitude, sin: 0.0 }])),
                Field::y_independent(TrigPoly::new(
                    *phi2_offset,
                    vec![Harmonic { k: 1, cos: 0.0, sin: *phi2_amplitude }],
                )),
                *epsilon,
            ),
            PerturbationSpec::Constant { phi1, phi2, epsilon } => (
                Field::y_independent(TrigPoly::constant(*phi1)),
                Field::y_independent(TrigPoly::constant(*phi2)),
                *epsilon,
            ),
            PerturbationSpec::Trig { phi1, phi2, epsilon } => {
                (Field::from_spec(phi1), Field::from_spec(phi2), *epsilon)
            }
        };
        let p = Self { phi1, phi2, epsilon, spec };
        p.validate()?;
        Ok(p)
    }

    /// `Φ₁ = cos x`, `Φ₂ = 1.1 + sin x`.
    pub fn reference() -> Self {
        Self::from_spec(PerturbationSpec::reference()).expect("reference perturbation is valid")
    }

    pub fn constant(phi1: f64, phi2: f64) -> Result<Self> {
        Self::from_spec(PerturbationSpec::Constant { phi1, phi2, epsilon: 0.05 })
    }

    fn validate(&self) -> Result<()> {
        let eps = self.epsilon;
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidPerturbation(format!("epsilon must be > 0, got {eps}")));
        }
        let all_coeffs = [&self.phi1.base, &self.phi1.slope, &self.phi2.base, &self.phi2.slope];
        for poly in all_coeffs {
            let finite = poly.constant.is_finite()
                && poly.terms.iter().all(|h| h.cos.is_finite() && h.sin.is_finite());
            if !finite {
                return Err(Error::InvalidPerturbation("non-finite coefficient".into()));
            }
        }
        // Φ₂ is affine in y, so its minimum over the strip sits at y = ±ε.
        // A grid minimum minus a Lipschitz allowance bounds the true minimum.
        let h = TAU / POSITIVITY_GRID as f64;
        let lip = self.phi2.base.lipschitz_bound() + eps * self.phi2.slope.lipschitz_bound();
        let mut worst = (f64::INFINITY, 0.0, 0.0);
        for i in 0..POSITIVITY_GRID {
            let x = i as f64 * h;
            for y in [-eps, eps] {
                let v = self.phi2.value(x, y);
                if v < worst.0 {
                    worst = (v, x, y);
                }
            }
        }
        if worst.0 - 0.5 * h * lip <= 0.0 {
            return Err(Error::InvalidPerturbation(format!(
                "Φ₂ must be positive on the strip; min ≈ {:.6e} at (x={:.6}, y={})",
                worst.0, worst.1, worst.2
            )));
        }
        Ok(())
    }

    pub fn spec(&self) -> &PerturbationSpec {
        &self.spec
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn phi1_field(&self) -> &Field {
        &self.phi1
    }

    pub fn phi2_field(&self) -> &Field {
        &self.phi2
    }

    pub fn phi1(&self, x: f64, y: f64) -> f64 {
        self.phi1.value(x, y)
    }

    pub fn phi2(&self, x: f64, y: f64) -> f64 {
        self.phi2.value(x, y)
    }

    /// Minimum and maximum of `Φ₂(·, 0)` sampled on a dense grid.
    pub fn phi2_section_range(&self) -> (f64, f64) {
        let h = TAU / POSITIVITY_GRID as f64;
        (0..POSITIVITY_GRID).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let v = self.phi2.value(i as f64 * h, 0.0);
            (lo.min(v), hi.max(v))
        })
    }

    /// Critical points of `ln Φ₂(·, 0)`, checked for nondegeneracy.
    ///
    /// Positivity is enforced at construction; the Morse property is not,
    /// because constant `Φ₂` is a legitimate (rigid-rotation) configuration.
    pub fn morse_critical_points(&self) -> Result<Vec<f64>> {
        let base = &self.phi2.base;
        let d = |x: f64| base.d1(x) / base.value(x);
        let dd = |x: f64| {
            let v = base.value(x);
            base.d2(x) / v - (base.d1(x) / v).powi(2)
        };
        let n = POSITIVITY_GRID;
        let h = TAU / n as f64;
        let mut roots = Vec::new();
        for i in 0..n {
            let (x0, x1) = (i as f64 * h, (i + 1) as f64 * h);
            let (f0, f1) = (d(x0), d(x1));
            if f0 == 0.0 && f1 == 0.0 {
                return Err(Error::NonMorse { x: x0, second_derivative: dd(x0) });
            }
            if f0 == 0.0 || f0.signum() != f1.signum() && f1 != 0.0 {
                let (mut lo, mut hi) = (x0, x1);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if d(lo).signum() == d(mid).signum() && d(mid) != 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-15 {
                        break;
                    }
                }
                let c = 0.5 * (lo + hi);
                let second = dd(c);
                if second.abs() < 1e-8 {
                    return Err(Error::NonMorse { x: c, second_derivative: second });
                }
                roots.push(c);
            }
        }
        Ok(roots)
    }
}

impl TryFrom<PerturbationSpec> for Perturbation {
    type Error = Error;

    fn try_from(spec: PerturbationSpec) -> Result<Self> {
        Self::from_spec(spec)
    }
}

impl From<Perturbation> for PerturbationSpec {
    fn from(p: Perturbation) -> Self {
        p.spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let p = Perturbation::reference();
        assert_eq!(p.phi1(0.0, 0.0), 1.0);
        assert!((p.phi2(std::f64::consts::FRAC_PI_2, 0.0) - 2.1).abs() < 1e-15);
        let (lo, hi) = p.phi2_section_range();
        assert!((lo - 0.1).abs() < 1e-6 && (hi - 2.1).abs() < 1e-6);
    }

    #[test]
    fn reference_log_phi2_has_two_morse_points() {
        let c = Perturbation::reference().morse_critical_points().unwrap();
        assert_eq!(c.len(), 2);
        assert!((c[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        assert!((c[1] - 3.0 * std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn constant_phi2_is_not_morse() {
        let p = Perturbation::constant(0.0, 2.0).unwrap();
        assert!(matches!(p.morse_critical_points(), Err(Error::NonMorse { .. })));
    }

    #[test]
    fn bare_sine_is_rejected() {
        let spec = PerturbationSpec::Reference {
            phi1_amplitude: 1.0,
            phi2_offset: 0.0,
            phi2_amplitude: 1.0,
            epsilon: 0.05,
        };
        assert!(matches!(Perturbation::from_spec(spec), Err(Error::InvalidPerturbation(_))));
    }

    #[test]
    fn y_slope_enters_positivity_check() {
        let field = |slope: f64| FieldSpec {
            constant: 0.2,
            terms: vec![],
            y_slope: Some(TrigPoly::constant(slope)),
        };
        let mk = |slope| PerturbationSpec::Trig { phi1: FieldSpec::default(), phi2: field(slope), epsilon: 0.1 };
        assert!(Perturbation::from_spec(mk(1.0)).is_ok());
        assert!(Perturbation::from_spec(mk(3.0)).is_err());
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let poly = TrigPoly::new(0.3, vec![(1, 0.5, -0.2).into(), (3, 0.1, 0.7).into()]);
        let h = 1e-5;
        for i in 0..50 {
            let x = i as f64 * 0.13;
            let fd1 = (poly.value(x + h) - poly.value(x - h)) / (2.0 * h);
            let fd2 = (poly.d1(x + h) - poly.d1(x - h)) / (2.0 * h);
            assert!((fd1 - poly.d1(x)).abs() < 1e-8);
            assert!((fd2 - poly.d2(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn spec_parses_from_toml() {
        let src = r#"
            family = "trig"
            epsilon = 0.05
            [phi1]
            terms = [[1, 1.0, 0.0]]
            [phi2]
            constant = 1.1
            terms = [[1, 0.0, 1.0]]
        "#;
        let p: Perturbation = toml::from_str(src).unwrap();
        let r = Perturbation::reference();
        for i in 0..20 {
            let x = i as f64 * 0.3;
            assert!((p.phi1(x, 0.0) - r.phi1(x, 0.0)).abs() < 1e-15);
            assert!((p.phi2(x, 0.0) - r.phi2(x, 0.0)).abs() < 1e-15);
        }
        let unknown = format!("bogus = 1\n{src}");
        assert!(toml::from_str::<Perturbation>(&unknown).is_err());
    }
}
