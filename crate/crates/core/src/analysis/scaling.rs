//! Scaling exponents of windowed moments, estimated by log-log regression.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeedPolicy;
use crate::sampler::{FbmSampler, Grid, SamplingMethod};
use crate::smooth::SmoothMap;
use crate::variations::{midpoint_weighted_power, signed_cubic, CompensatedSum};

pub const MIN_SCALING_REPLICATIONS: usize = 200;

pub const DEFAULT_GAPS: [usize; 5] = [8, 16, 32, 64, 128];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(ln x, ln y)` pairs the line was fitted to.
    pub points: Vec<(f64, f64)>,
}

impl ScalingFit {
    /// Ordinary least squares of `y` on `x`.
    pub fn fit(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::domain("a scaling fit needs at least two points"));
        }
        let k = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
        let my = points.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
        if sxx <= 1e-12 * (1.0 + mx * mx) {
            return Err(Error::domain("degenerate regression: all abscissae equal"));
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
        Ok(Self { slope, intercept, r_squared, points })
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MomentEstimator {
    /// `E|V_n(B,t_d) - V_n(B,t_c)|^4`, bounded by `C (t_d - t_c)^2`.
    Cubic4th,
    /// `E|sum g(beta_j) dB_j^5|^2`, bounded by `C dt^(1/3) (t_d - t_c)^(4/3)`.
    Quintic2nd,
    /// `E|sum g(beta_j) dB_j^3|^2`, bounded by `C (t_d - t_c)`.
    WeightedCubic2nd,
}

impl MomentEstimator {
    pub const ALL: [MomentEstimator; 3] = [Self::Cubic4th, Self::Quintic2nd, Self::WeightedCubic2nd];

    /// Exponent of the bound in the window length.
    pub fn theoretical_exponent(self) -> f64 {
        match self {
            Self::Cubic4th => 2.0,
            Self::Quintic2nd => 4.0 / 3.0,
            Self::WeightedCubic2nd => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Cubic4th => "cubic_4th",
            Self::Quintic2nd => "quintic_2nd",
            Self::WeightedCubic2nd => "weighted_cubic_2nd",
        }
    }

    fn moment_order(self) -> i32 {
        match self {
            Self::Cubic4th => 4,
            Self::Quintic2nd | Self::WeightedCubic2nd => 2,
        }
    }
}

impl std::fmt::Display for MomentEstimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MomentEstimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cubic_4th" | "cubic4th" => Ok(Self::Cubic4th),
            "quintic_2nd" | "quintic2nd" => Ok(Self::Quintic2nd),
            "weighted_cubic_2nd" | "weightedcubic2nd" => Ok(Self::WeightedCubic2nd),
            other => Err(Error::Parse(format!("unknown moment estimator '{other}'"))),
        }
    }
}

/// Inputs for [`moment_scaling`]. Windows are `(start, start + gap]` in grid
/// steps on `[0, 1]`; `weight` is ignored by the unweighted cubic estimator.
#[derive(Debug, Clone)]
pub struct ScalingRequest {
    pub estimator: MomentEstimator,
    pub n: u64,
    pub gaps: Vec<usize>,
    pub replications: usize,
    pub seeds: SeedPolicy,
    pub weight: SmoothMap,
    pub start: usize,
}

impl ScalingRequest {
    pub fn new(estimator: MomentEstimator, n: u64, replications: usize, seeds: SeedPolicy) -> Self {
        Self {
            estimator,
            n,
            gaps: DEFAULT_GAPS.to_vec(),
            replications,
            seeds,
            weight: SmoothMap::sin(),
            start: 0,
        }
    }
}

/// Per-gap moment estimates together with the fitted exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingOutcome {
    pub estimator: MomentEstimator,
    pub gaps: Vec<usize>,
    pub moments: Vec<f64>,
    pub fit: ScalingFit,
}

/// Monte Carlo moments over nested windows, then regression of the log moment
/// on `ln(gap / n)`. Replication `r` uses stream `seeds.stream_id + r`.
pub fn moment_scaling(req: &ScalingRequest) -> Result<ScalingOutcome> {
    if req.replications < MIN_SCALING_REPLICATIONS {
        return Err(Error::domain(format!(
            "moment scaling needs at least {MIN_SCALING_REPLICATIONS} replications, got {}",
            req.replications
        )));
    }
    if req.gaps.is_empty() || req.gaps.contains(&0) {
        return Err(Error::domain("gaps must be positive"));
    }
    let grid = Grid::unit(req.n)?;
    if let Some(&g) = req.gaps.iter().find(|&&g| req.start + g > grid.m()) {
        return Err(Error::domain(format!(
            "window ({}, {}] exceeds the grid of {} steps",
            req.start,
            req.start + g,
            grid.m()
        )));
    }
    if req.gaps.iter().all(|&g| g == req.gaps[0]) {
        return Err(Error::domain("degenerate regression: all gaps equal"));
    }
    let sampler = FbmSampler::new(grid, SamplingMethod::Circulant)?;
    let order = req.estimator.moment_order();

    let per_rep: Vec<Vec<f64>> = (0..req.replications as u64)
        .into_par_iter()
        .map(|r| {
            let path = sampler.sample(req.seeds.with_stream(req.seeds.stream_id + r));
            let sums = match req.estimator {
                MomentEstimator::Cubic4th => signed_cubic(&path),
                MomentEstimator::Quintic2nd => midpoint_weighted_power(&req.weight, &path, 5),
                MomentEstimator::WeightedCubic2nd => midpoint_weighted_power(&req.weight, &path, 3),
            };
            req.gaps
                .iter()
                .map(|&g| sums.window(req.start, req.start + g).powi(order))
                .collect()
        })
        .collect();

    let moments: Vec<f64> = (0..req.gaps.len())
        .map(|k| {
            let mut acc = CompensatedSum::default();
            per_rep.iter().for_each(|v| acc.add(v[k]));
            acc.value() / req.replications as f64
        })
        .collect();
    let n = req.n as f64;
    let points = req
        .gaps
        .iter()
        .zip(&moments)
        .map(|(&g, &m)| ((g as f64 / n).ln(), m.ln()))
        .collect();
    Ok(ScalingOutcome {
        estimator: req.estimator,
        gaps: req.gaps.clone(),
        moments,
        fit: ScalingFit::fit(points)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts = (1..6).map(|k| (f64::from(k), 2.5 * f64::from(k) - 1.0)).collect();
        let f = ScalingFit::fit(pts).unwrap();
        assert!((f.slope - 2.5).abs() < 1e-12);
        assert!((f.intercept + 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!((f.predict(10.0) - 24.0).abs() < 1e-10);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(ScalingFit::fit(vec![(1.0, 2.0)]).is_err());
        assert!(ScalingFit::fit(vec![(1.0, 2.0), (1.0, 3.0)]).is_err());
        let seeds = SeedPolicy::new(1, 0);
        let mut req = ScalingRequest::new(MomentEstimator::Cubic4th, 256, 200, seeds);
        req.gaps = vec![8, 8, 8];
        assert!(moment_scaling(&req).is_err());
        req.gaps = vec![8, 512];
        assert!(moment_scaling(&req).is_err());
        req.gaps = vec![8, 16];
        req.replications = 199;
        assert!(moment_scaling(&req).is_err());
    }

    #[test]
    fn estimator_names_round_trip() {
        for e in MomentEstimator::ALL {
            assert_eq!(e.name().parse::<MomentEstimator>().unwrap(), e);
        }
    }
}
