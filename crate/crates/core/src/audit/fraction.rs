//! Sampled estimate of how often small `λ` carry a strange attractor.

use crate::model::{ModelParams, Perturbation, ReturnMap};
use crate::orbit::{classify_cell, Budget, RegimeLabel};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractorFraction {
    pub r: f64,
    pub samples: usize,
    /// Samples labelled as strange attractor candidates.
    pub hits: usize,
    /// Samples whose orbit left the domain; excluded from the denominator.
    pub escaped: usize,
    pub fraction: f64,
    /// Wilson 95% interval for `fraction`.
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

/// Wilson score interval at `z`.
pub fn wilson_interval(hits: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Draws `λ` uniformly from `(0, r]` and counts cells with a positive top
/// Lyapunov exponent that are neither periodic nor escaping.
pub fn strange_attractor_fraction(
    params: &ModelParams,
    pert: &Perturbation,
    r: f64,
    samples: usize,
    budget: &Budget,
    seed: u64,
) -> Result<AttractorFraction> {
    if !(r > 0.0) {
        return Err(Error::Precondition("r must be positive".into()));
    }
    if samples < 100 {
        return Err(Error::Precondition("at least 100 samples are required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // 1 − U with U ∈ [0, 1) gives (0, 1].
    let lambdas: Vec<f64> = (0..samples).map(|_| r * (1.0 - rng.gen::<f64>())).collect();
    let labels: Vec<Result<RegimeLabel>> = lambdas
        .into_par_iter()
        .map(|l| {
            let map = ReturnMap::new(params.with_lambda(l)?, pert.clone());
            Ok(classify_cell(&map, budget)?.label)
        })
        .collect();
    let (mut hits, mut escaped) = (0, 0);
    for label in labels {
        match label? {
            RegimeLabel::StrangeAttractorCandidate => hits += 1,
            RegimeLabel::Escaped => escaped += 1,
            _ => {}
        }
    }
    let n = samples - escaped;
    let (ci_low, ci_high) = wilson_interval(hits, n, 1.96);
    let fraction = if n == 0 { 0.0 } else { hits as f64 / n as f64 };
    Ok(AttractorFraction { r, samples, hits, escaped, fraction, ci_low, ci_high, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wilson_matches_known_value() {
        // 50/100 at z = 1.96: 0.5 ± 0.0962.
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4);
    }

    #[test]
    fn rejects_small_sample_counts() {
        let p = ModelParams::reference(1.0, 0.01).unwrap();
        let e = strange_attractor_fraction(&p, &Perturbation::reference(), 0.05, 10, &Budget::default(), 0);
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    proptest! {
        #[test]
        fn interval_contains_estimate_and_shrinks(hits in 0usize..100, scale in 1usize..20) {
            let n = 100;
            let (lo, hi) = wilson_interval(hits, n, 1.96);
            let p = hits as f64 / n as f64;
            prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
            let (lo4, hi4) = wilson_interval(hits * 4 * scale, n * 4 * scale, 1.96);
            prop_assert!(hi4 - lo4 < hi - lo);
        }
    }
}
