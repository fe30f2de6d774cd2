use super::{iterate, OrbitRecord, PlaneMap};
use crate::model::CylinderPoint;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Exponents below this per-iterate value are reported as this value and
/// flagged as saturated.
pub const SATURATED_EXPONENT: f64 = -50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LyapunovOptions {
    pub iterates: usize,
    pub burn_in: usize,
    /// Iterates between renormalisations of the tangent vector.
    pub cadence: usize,
    /// Iterates used only to align the tangent frame before accumulating.
    pub transient: usize,
}

impl Default for LyapunovOptions {
    fn default() -> Self {
        Self { iterates: 100_000, burn_in: 1_000, cadence: 10, transient: 1_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub chi1: f64,
    /// `mean ln |det| − χ₁`.
    pub chi2: f64,
    /// Second exponent from a per-step Givens QR, independent of the
    /// determinant.
    pub chi2_qr: f64,
    pub mean_log_det: f64,
    /// `|χ₁ + χ₂(QR) − mean ln |det||`.
    pub sum_defect: f64,
    pub saturated: bool,
    pub inconclusive: bool,
    pub transient: usize,
    pub iterates: usize,
    pub cadence: usize,
}

pub fn lyapunov<M: PlaneMap + ?Sized>(map: &M, p0: CylinderPoint, opts: &LyapunovOptions) -> Result<LyapunovEstimate> {
    if opts.iterates < 10_000 {
        return Err(Error::Precondition(format!(
            "Lyapunov estimates need at least 10^4 iterates, got {}",
            opts.iterates
        )));
    }
    let record = iterate(map, p0, opts.iterates + opts.transient, opts.burn_in);
    lyapunov_along(map, &record, opts.cadence, opts.transient)
}

/// Exponents along a stored orbit. The first `transient` points only align
/// the tangent frame.
pub fn lyapunov_along<M: PlaneMap + ?Sized>(
    map: &M,
    record: &OrbitRecord,
    cadence: usize,
    transient: usize,
) -> Result<LyapunovEstimate> {
    let cadence = cadence.max(1);
    let pts = record.mapped_points();
    let collapsed = record.escaped && record.points.last().is_some_and(|p| map.collapsed(*p));
    let total = record.len().max(1);
    let inconclusive = record.escaped && !collapsed && pts.len() < total.div_ceil(2).max(1).min(total);
    let inconclusive = inconclusive || record.escaped_in_burn_in && !collapsed;
    let transient = transient.min(pts.len() / 2);

    let mut v = [std::f64::consts::FRAC_1_SQRT_2; 2];
    let mut q = [[1.0, 0.0], [0.0, 1.0]];
    let (mut log_norm, mut log_r2, mut log_det) = (0.0, 0.0, 0.0);
    let mut counted = 0usize;
    for (k, p) in pts.iter().enumerate() {
        let j = map.jacobian(*p)?;
        let accumulate = k >= transient;
        let nv = j.apply(v);
        v = nv;
        // QR of J·Q by one Givens rotation.
        let m1 = j.apply([q[0][0], q[1][0]]);
        let m2 = j.apply([q[0][1], q[1][1]]);
        let r11 = m1[0].hypot(m1[1]);
        let (c, s) = if r11 > 0.0 { (m1[0] / r11, m1[1] / r11) } else { (1.0, 0.0) };
        let r22 = -s * m2[0] + c * m2[1];
        q = [[c, -s], [s, c]];
        if accumulate {
            log_r2 += r22.abs().ln();
            log_det += map.log_abs_det(*p)?;
            counted += 1;
        }
        let norm = v[0].hypot(v[1]);
        let due = (k + 1) % cadence == 0 || !(1e-150..=1e150).contains(&norm);
        if due || k + 1 == pts.len() || k + 1 == transient {
            if accumulate {
                log_norm += norm.ln();
            }
            v = [v[0] / norm, v[1] / norm];
        }
    }
    if counted == 0 {
        return Ok(LyapunovEstimate {
            chi1: f64::NAN,
            chi2: if collapsed { SATURATED_EXPONENT } else { f64::NAN },
            chi2_qr: f64::NAN,
            mean_log_det: f64::NAN,
            sum_defect: f64::NAN,
            saturated: collapsed,
            inconclusive: !collapsed,
            transient,
            iterates: 0,
            cadence,
        });
    }
    let n = counted as f64;
    let chi1 = log_norm / n;
    let mean_log_det = log_det / n;
    let mut chi2 = mean_log_det - chi1;
    let chi2_qr = log_r2 / n;
    let sum_defect = (chi1 + chi2_qr - mean_log_det).abs();
    let saturated = collapsed || chi2 < SATURATED_EXPONENT;
    if saturated {
        chi2 = SATURATED_EXPONENT;
    }
    Ok(LyapunovEstimate {
        chi1,
        chi2,
        chi2_qr,
        mean_log_det,
        sum_defect,
        saturated,
        inconclusive,
        transient,
        iterates: counted,
        cadence,
    })
}
