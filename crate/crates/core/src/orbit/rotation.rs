use super::iterate;
use crate::model::{CylinderPoint, ReturnMap};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Mean angular displacement per iterate (in turns) over several seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationSet {
    pub rho_min: f64,
    pub rho_max: f64,
    pub per_seed: Vec<Option<f64>>,
    pub escaped: usize,
}

impl RotationSet {
    pub fn width(&self) -> f64 {
        self.rho_max - self.rho_min
    }

    pub fn escaped_fraction(&self) -> f64 {
        self.escaped as f64 / self.per_seed.len() as f64
    }
}

/// Rotation numbers of the return map's lift from each seed.
///
/// Requires `λ > 0`: at `λ = 0` the height collapses to zero and the
/// displacement `−K_ω ln yₙ` diverges.
pub fn rotation_set_2d(map: &ReturnMap, seeds: &[CylinderPoint], n: usize, burn_in: usize) -> Result<RotationSet> {
    if !(map.params().lambda() > 0.0) {
        return Err(Error::Precondition(
            "rotation numbers of the return map need lambda > 0 (the displacement diverges at lambda = 0)".into(),
        ));
    }
    if seeds.is_empty() || n < 2 {
        return Err(Error::Precondition("need at least one seed and two iterates".into()));
    }
    let mut per_seed = Vec::with_capacity(seeds.len());
    for &s in seeds {
        let rec = iterate(map, s, n, burn_in);
        per_seed.push((!rec.escaped).then(|| rec.displacements.iter().sum::<f64>() / (TAU * rec.displacements.len() as f64)));
    }
    let escaped = per_seed.iter().filter(|r| r.is_none()).count();
    if escaped == seeds.len() {
        return Err(Error::Precondition("every seed escaped; no rotation estimate".into()));
    }
    let rho_min = per_seed.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let rho_max = per_seed.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(RotationSet { rho_min, rho_max, per_seed, escaped })
}
