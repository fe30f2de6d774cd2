use super::OrbitRecord;
use crate::linalg::fit_line;
use crate::model::CylinderPoint;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffAverage {
    pub value: f64,
    /// `|mean over the last quarter − mean over everything|`.
    pub drift: f64,
    pub samples: usize,
    /// The orbit escaped, so only the part before the escape was averaged.
    pub partial: bool,
}

pub fn birkhoff_average(record: &OrbitRecord, observable: impl Fn(CylinderPoint) -> f64) -> Result<BirkhoffAverage> {
    let pts = record.mapped_points();
    let pts = if record.escaped { pts } else { &record.points[..] };
    if pts.is_empty() {
        return Err(Error::Precondition("time average of an empty orbit".into()));
    }
    let values: Vec<f64> = pts.iter().map(|&p| observable(p)).collect();
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let value = mean(&values);
    let quarter = &values[values.len() - (values.len() / 4).max(1)..];
    Ok(BirkhoffAverage { value, drift: (mean(quarter) - value).abs(), samples: values.len(), partial: record.escaped })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Autocorrelation {
    /// Normalised autocovariance at lags `0..=max_lag`.
    pub values: Vec<f64>,
    /// Fitted `τ` in `|C(k)| ≈ B τ^k`, when enough lags rise above noise.
    pub rate: Option<f64>,
    pub r_squared: Option<f64>,
    /// Lags used in the fit.
    pub fitted_lags: usize,
    /// The exponential model does not describe the data (no decay, too few
    /// lags above noise, or poor fit).
    pub poor_fit: bool,
}

pub fn autocorrelation(series: &[f64], max_lag: usize) -> Result<Autocorrelation> {
    let n = series.len();
    if max_lag == 0 || n < 10 * max_lag {
        return Err(Error::Precondition(format!(
            "autocorrelation needs at least 10 * max_lag samples (got {n} for max_lag {max_lag})"
        )));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let var = series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let scale = series.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    if !(var > (1e-12 * scale).powi(2)) {
        return Err(Error::Precondition("observable has (near) zero variance; correlations are undefined".into()));
    }
    let values: Vec<f64> = (0..=max_lag)
        .map(|k| {
            let c: f64 = (0..n - k).map(|i| (series[i] - mean) * (series[i + k] - mean)).sum();
            c / (n as f64 * var)
        })
        .collect();
    let floor = 2.0 / (n as f64).sqrt();
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .skip(1)
        .take_while(|(_, c)| c.abs() > floor)
        .map(|(k, c)| (k as f64, c.abs().ln()))
        .collect();
    let fit = if pts.len() >= 3 { fit_line(&pts) } else { None };
    let rate = fit.map(|f| f.slope.exp());
    let r_squared = fit.map(|f| f.r_squared);
    let poor_fit = match (rate, r_squared) {
        (Some(t), Some(r2)) => t >= 0.99 || r2 < 0.5,
        _ => true,
    };
    Ok(Autocorrelation { values, rate, r_squared, fitted_lags: pts.len(), poor_fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::iterate;
    use crate::orbit::harness::LinearMap;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_observable_is_exact() {
        let rec = iterate(&LinearMap { a: 2.0, d: 0.5 }, CylinderPoint::new(0.3, 0.2), 1000, 0);
        let avg = birkhoff_average(&rec, |_| 3.25).unwrap();
        assert_eq!(avg.value, 3.25);
        assert_eq!(avg.drift, 0.0);
    }

    #[test]
    fn period_two_has_no_decay() {
        let series: Vec<f64> = (0..2000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let ac = autocorrelation(&series, 50).unwrap();
        assert!(ac.poor_fit);
        assert!((ac.values[2] - 1.0).abs() < 1e-2);
    }

    #[test]
    fn iid_sequence_is_uncorrelated() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let series: Vec<f64> = (0..100_000).map(|_| rng.gen::<f64>()).collect();
        let ac = autocorrelation(&series, 100).unwrap();
        assert_eq!(ac.values[0], 1.0);
        assert!(ac.values[1..].iter().all(|c| c.abs() < 0.02));
    }

    #[test]
    fn ar1_rate_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut x = 0.0;
        let series: Vec<f64> = (0..200_000)
            .map(|_| {
                x = 0.7 * x + rng.gen::<f64>() - 0.5;
                x
            })
            .collect();
        let ac = autocorrelation(&series, 20).unwrap();
        let rate = ac.rate.unwrap();
        assert!((rate - 0.7).abs() < 0.05, "{rate}");
        assert!(!ac.poor_fit);
    }

    #[test]
    fn zero_variance_is_flagged() {
        assert!(autocorrelation(&[2.0; 1000], 10).is_err());
    }
}
