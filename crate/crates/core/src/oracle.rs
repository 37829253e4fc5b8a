//! Samples of the limit law: `[[B]] = kappa W` with `W` an independent
//! Brownian motion, Ito integrals against `W` by left-endpoint sums, and the
//! weak Stratonovich integral
//!
//! `int_0^t g(B) dB = G(B(t)) - G(B(0)) + (1/12) int_0^t G'''(B) d[[B]]`
//!
//! with `G' = g`.

use crate::error::{Error, Result};
use crate::kernel;
use crate::rng::SeedPolicy;
use crate::sampler::{sample_bm, FbmSampler, Grid, Path, PathKind, SamplingMethod};
use crate::smooth::SmoothMap;
use crate::variations::{CompensatedSum, StepProcess};

/// `kappa W(t_j)` on the grid of `w_path`.
pub fn signed_cubic_limit(w_path: &Path, kappa: f64) -> Result<StepProcess> {
    if w_path.kind() != PathKind::Bm {
        return Err(Error::domain("signed cubic limit needs a Brownian path"));
    }
    let partials = w_path.values().iter().map(|w| kappa * w).collect();
    StepProcess::from_partials(*w_path.grid(), partials, "kappa W")
}

/// `sum_{k <= j} f(t_{k-1}) dW_k`. One integrand value per grid point; the
/// last one is never used.
pub fn ito_left_sum(integrand_values: &[f64], w_path: &Path) -> Result<StepProcess> {
    if integrand_values.len() != w_path.values().len() {
        return Err(Error::domain(format!(
            "integrand has {} values, path grid has {} points",
            integrand_values.len(),
            w_path.values().len()
        )));
    }
    let summands = integrand_values
        .iter()
        .zip(w_path.increments())
        .map(|(f, dw)| f * dw);
    Ok(StepProcess::from_summands(*w_path.grid(), summands, "ito left sum"))
}

/// A joint draw of `B` and an independent `W` on a common fine grid.
#[derive(Debug, Clone)]
pub struct LimitSample {
    b_path: Path,
    w_path: Path,
    kappa: f64,
}

impl LimitSample {
    /// Pairs an fBm path with a Brownian path. `W` must live on a grid at
    /// least as fine as `B`'s, with a matching horizon.
    pub fn new(b_path: Path, w_path: Path, kappa: f64) -> Result<Self> {
        if b_path.kind() != PathKind::Fbm || w_path.kind() != PathKind::Bm {
            return Err(Error::domain("limit sample needs an fBm path and a Brownian path"));
        }
        let (gb, gw) = (b_path.grid(), w_path.grid());
        if (gb.horizon() - gw.horizon()).abs() > 1e-12 {
            return Err(Error::domain("B and W must share the horizon"));
        }
        if gw.n() < gb.n() || gw.n() % gb.n() != 0 {
            return Err(Error::domain(format!(
                "refinement {} must be a multiple of the fBm grid size {}",
                gw.n(),
                gb.n()
            )));
        }
        Ok(Self { b_path, w_path, kappa })
    }

    /// Draws `B` with `fbm` and `W` from the disjoint Brownian substream of
    /// the same seeds, both on `fbm`'s grid.
    pub fn draw(fbm: &FbmSampler, seeds: SeedPolicy, kappa: f64) -> Self {
        let b_path = fbm.sample(seeds);
        let w_path = sample_bm(*fbm.grid(), seeds);
        Self { b_path, w_path, kappa }
    }

    /// Convenience wrapper building a circulant sampler on `[0, horizon]`.
    pub fn sample(refinement: u64, horizon: f64, seeds: SeedPolicy) -> Result<Self> {
        let grid = Grid::new(refinement, horizon)?;
        let fbm = FbmSampler::new(grid, SamplingMethod::Circulant)?;
        Ok(Self::draw(&fbm, seeds, kernel::kappa()))
    }

    pub fn b_path(&self) -> &Path {
        &self.b_path
    }

    pub fn w_path(&self) -> &Path {
        &self.w_path
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Grid size of the oracle (the Brownian grid).
    pub fn refinement(&self) -> u64 {
        self.w_path.grid().n()
    }

    /// `B` at the left end of each fine step, by the step rule.
    fn b_on_fine_grid(&self, j: usize) -> f64 {
        let ratio = (self.w_path.grid().n() / self.b_path.grid().n()) as usize;
        self.b_path.values()[j / ratio]
    }

    fn check_time(&self, t: f64) -> Result<usize> {
        self.w_path.grid().index_of(t)
    }

    /// `int_0^t f(B) d[[B]] = kappa * sum f(B(t_{k-1})) dW_k`.
    pub fn cubic_integral(&self, f: &SmoothMap, t: f64) -> Result<f64> {
        let steps = self.check_time(t)?;
        let w = self.w_path.values();
        let mut acc = CompensatedSum::default();
        for k in 1..=steps {
            acc.add(f.eval(self.b_on_fine_grid(k - 1)) * (w[k] - w[k - 1]));
        }
        Ok(self.kappa * acc.value())
    }

    /// `B(t)` by the step rule on the fBm grid.
    pub fn b_at(&self, t: f64) -> Result<f64> {
        self.b_path.value_at(t)
    }

    /// `kappa W(t)`.
    pub fn signed_cubic_at(&self, t: f64) -> Result<f64> {
        Ok(self.kappa * self.w_path.value_at(t)?)
    }
}

/// The weak Stratonovich integral `int_0^t g(B) dB` on one limit sample.
pub fn weak_strat_integral(g: &SmoothMap, sample: &LimitSample, t: f64) -> Result<f64> {
    let big_g = g.antiderivative();
    let b_t = sample.b_at(t)?;
    let b_0 = sample.b_path.values()[0];
    // G''' = g''
    let correction = sample.cubic_integral(&g.derivative(2), t)?;
    Ok(big_g.eval(b_t) - big_g.eval(b_0) + correction / 12.0)
}

/// `g(B(t)) - g(B(0)) - int g'(B) dB + (1/12) int g'''(B) d[[B]]`, which is
/// zero up to round-off.
pub fn change_of_variable_residual(g: &SmoothMap, sample: &LimitSample, t: f64) -> Result<f64> {
    let b_t = sample.b_at(t)?;
    let b_0 = sample.b_path.values()[0];
    let strat = weak_strat_integral(&g.derivative(1), sample, t)?;
    let ito = sample.cubic_integral(&g.derivative(3), t)?;
    Ok(g.eval(b_t) - g.eval(b_0) - strat + ito / 12.0)
}
