use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform partition `t_j = j/n` of `[0, T]` with `m = nT` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: u64,
    horizon: f64,
    m: usize,
}

impl Grid {
    /// Rejects horizons for which `n * T` is not an integer.
    pub fn new(n: u64, horizon: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("grid size n must be positive"));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::domain(format!("horizon must be positive and finite, got {horizon}")));
        }
        let steps = n as f64 * horizon;
        let m = steps.round();
        if (steps - m).abs() > 1e-9 * steps.max(1.0) || m < 1.0 {
            return Err(Error::domain(format!(
                "n * T = {steps} is not a positive integer (n = {n}, T = {horizon})"
            )));
        }
        Ok(Self { n, horizon, m: m as usize })
    }

    /// Grid on `[0, 1]`.
    pub fn unit(n: u64) -> Result<Self> {
        Self::new(n, 1.0)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of steps.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 / self.n as f64
    }

    /// `floor(n t)`, clamped to the grid, for `0 <= t <= T`.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        if !(t >= 0.0) || t > self.horizon * (1.0 + 1e-12) {
            return Err(Error::domain(format!("time {t} outside [0, {}]", self.horizon)));
        }
        let j = (t * self.n as f64 + 1e-9).floor() as usize;
        Ok(j.min(self.m))
    }
}
