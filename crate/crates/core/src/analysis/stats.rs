use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::variations::compensated_sum;

/// Monte Carlo sample with a provenance note.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    values: Vec<f64>,
    descriptor: String,
}

impl SampleSet {
    pub fn new(values: Vec<f64>, descriptor: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("sample set is empty"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("sample set contains non-finite value {bad}")));
        }
        Ok(Self { values, descriptor: descriptor.into() })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    pub fn variance(&self) -> f64 {
        sample_variance(&self.values)
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        (self.variance() / self.len() as f64).sqrt()
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    compensated_sum(xs.iter().copied()) / xs.len() as f64
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    compensated_sum(xs.iter().map(|x| (x - m) * (x - m))) / (xs.len() as f64 - 1.0)
}

/// Sample covariance of paired observations.
pub fn sample_covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (mx, my) = (mean(xs), mean(ys));
    compensated_sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my))) / (xs.len() as f64 - 1.0)
}

/// Pearson correlation.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    sample_covariance(xs, ys) / (sample_variance(xs) * sample_variance(ys)).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Moment estimate with its jackknife standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

pub const MAX_MOMENT_ORDER: u32 = 8;
pub const MIN_MOMENT_SAMPLES: usize = 100;

/// Plug-in raw moment `E[X^order]` with a delete-one jackknife standard error.
pub fn mc_moment(samples: &SampleSet, order: u32) -> Result<MomentEstimate> {
    if order == 0 || order > MAX_MOMENT_ORDER {
        return Err(Error::domain(format!("moment order must be in 1..={MAX_MOMENT_ORDER}, got {order}")));
    }
    if samples.len() < MIN_MOMENT_SAMPLES {
        return Err(Error::domain(format!(
            "need at least {MIN_MOMENT_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let powers: Vec<f64> = samples.values().iter().map(|x| x.powi(order as i32)).collect();
    let m = powers.len() as f64;
    let total = compensated_sum(powers.iter().copied());
    let estimate = total / m;
    let leave_out: Vec<f64> = powers.iter().map(|p| (total - p) / (m - 1.0)).collect();
    let centre = mean(&leave_out);
    let spread = compensated_sum(leave_out.iter().map(|t| (t - centre) * (t - centre)));
    let std_error = ((m - 1.0) / m * spread).sqrt();
    Ok(MomentEstimate { estimate, std_error })
}
