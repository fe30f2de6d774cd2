use super::{critical_points, CircleMap, MisiurewiczCertificate, DEFAULT_CRITICAL_CELLS};
use crate::verdict::{Verdict, Witness};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_10, TAU};

/// Cap on the power searched when testing primitivity.
pub const MAX_PRIMITIVE_POWER: usize = 64;

/// Monotonicity intervals `J_i = [c_i, c_{i+1}]` of `h_a` (the last one wraps
/// past 2π) with the lifted image `[lo, hi]` of each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub a: f64,
    pub intervals: Vec<(f64, f64)>,
    pub images: Vec<(f64, f64)>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Length of the lifted image of branch `i`.
    pub fn variation(&self, i: usize) -> f64 {
        self.images[i].1 - self.images[i].0
    }
}

pub fn monotonicity_partition<M: CircleMap + ?Sized>(map: &M, a: f64) -> Result<Partition> {
    let cs = critical_points(map, DEFAULT_CRITICAL_CELLS)?.xs();
    if cs.is_empty() {
        return Err(Error::Precondition(
            "no critical points: the map is a diffeomorphism and has no monotonicity partition".into(),
        ));
    }
    let q = cs.len();
    let mut intervals = Vec::with_capacity(q);
    let mut images = Vec::with_capacity(q);
    for i in 0..q {
        let lo = cs[i];
        let hi = if i + 1 < q { cs[i + 1] } else { cs[0] + TAU };
        let (f0, f1) = (map.lift(a, lo), map.lift(a, hi));
        intervals.push((lo, hi));
        images.push((f0.min(f1), f0.max(f1)));
    }
    Ok(Partition { a, intervals, images })
}

/// `q_im = 1` iff `J_m ⊂ h(J_i)` on the circle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    pub entries: Vec<Vec<u8>>,
    /// Smallest `N ≤ 64` with `Qᴺ > 0` entrywise, if any.
    pub primitive_power: Option<usize>,
}

impl TransitionMatrix {
    pub fn from_entries(entries: Vec<Vec<u8>>) -> Self {
        let primitive_power = primitive_power(&entries);
        Self { entries, primitive_power }
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive_power.is_some()
    }
}

pub fn transition_matrix(partition: &Partition) -> TransitionMatrix {
    let r = partition.len();
    let mut entries = vec![vec![0u8; r]; r];
    for (i, row) in entries.iter_mut().enumerate() {
        let (lo, hi) = partition.images[i];
        for (m, entry) in row.iter_mut().enumerate() {
            let (s, e) = partition.intervals[m];
            let covered = if hi - lo >= TAU {
                true
            } else {
                let shift = TAU * ((lo - s) / TAU).ceil();
                e + shift <= hi
            };
            *entry = covered as u8;
        }
    }
    TransitionMatrix::from_entries(entries)
}

fn primitive_power(q: &[Vec<u8>]) -> Option<usize> {
    let r = q.len();
    if r == 0 || q.iter().any(|row| row.len() != r) {
        return None;
    }
    let mut power: Vec<Vec<bool>> = q.iter().map(|row| row.iter().map(|&v| v != 0).collect()).collect();
    for n in 1..=MAX_PRIMITIVE_POWER {
        if power.iter().all(|row| row.iter().all(|&v| v)) {
            return Some(n);
        }
        let next = (0..r)
            .map(|i| (0..r).map(|j| (0..r).any(|k| power[i][k] && q[k][j] != 0)).collect())
            .collect();
        power = next;
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccumulationReport {
    pub a: f64,
    pub lambda0: f64,
    pub variations: Vec<f64>,
    pub verdicts: Vec<Verdict>,
}

impl AccumulationReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

/// Conditions for superstable orbits to accumulate near `a*`:
/// (i) `h_{a*}` is Misiurewicz-type, (ii) every monotone branch covers the
/// circle, (iii) `exp(λ₀) > ln 10`.
pub fn accumulation_conditions<M: CircleMap + ?Sized>(
    map: &M,
    cert: &MisiurewiczCertificate,
) -> Result<AccumulationReport> {
    let partition = monotonicity_partition(map, cert.a)?;
    let variations: Vec<f64> = (0..partition.len()).map(|i| partition.variation(i)).collect();
    let (worst_i, worst) = variations
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let verdicts = vec![
        Verdict::check(
            "i",
            cert.passed(),
            Witness::note("Misiurewicz certificate").compare(cert.lambda0, cert.b0),
        ),
        Verdict::check(
            "ii",
            worst >= TAU,
            Witness::note("smallest lifted branch variation").at(worst_i as u64 + 1).compare(worst, TAU),
        ),
        Verdict::check("iii", iii_holds(cert.lambda0), Witness::note("exp(lambda0) vs ln 10").compare(cert.lambda0.exp(), LN_10)),
    ];
    Ok(AccumulationReport { a: cert.a, lambda0: cert.lambda0, variations, verdicts })
}

/// `exp(λ₀) > ln 10`.
pub fn iii_holds(lambda0: f64) -> bool {
    lambda0.exp() > LN_10
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::CircleMapFamily;

    #[test]
    fn surjective_branches_give_all_ones() {
        let q = TransitionMatrix::from_entries(vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(q.primitive_power, Some(1));
    }

    #[test]
    fn permutation_is_not_primitive() {
        let q = TransitionMatrix::from_entries(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(q.primitive_power, None);
        let q = TransitionMatrix::from_entries(vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(q.primitive_power, Some(2));
    }

    #[test]
    fn full_branch_row_is_all_ones() {
        let fam = CircleMapFamily::reference(5.0);
        let p = monotonicity_partition(&fam, 1.0).unwrap();
        let q = transition_matrix(&p);
        for i in 0..p.len() {
            if p.variation(i) >= TAU {
                assert!(q.entries[i].iter().all(|&v| v == 1));
            }
        }
    }

    #[test]
    fn diffeomorphism_has_no_partition() {
        assert!(monotonicity_partition(&CircleMapFamily::reference(0.3), 0.0).is_err());
    }

    #[test]
    fn iii_arithmetic() {
        assert!(iii_holds(0.9));
        assert!((0.9f64.exp() - 2.4596).abs() < 1e-4);
        let edge = LN_10.ln();
        assert!(iii_holds(edge + 1e-12));
        assert!(!iii_holds(edge - 1e-12));
    }
}
