//! Exact stationary Gaussian sampling by circulant embedding.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Relative tolerance for negative embedding eigenvalues; anything smaller
/// in magnitude is round-off and is clamped to zero.
pub const NEGATIVE_EIGEN_TOLERANCE: f64 = 1e-8;

/// Precomputed spectral square roots for a fixed autocovariance sequence.
pub struct CirculantEmbedding {
    len: usize,
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl CirculantEmbedding {
    /// Embeds `autocov[0..=m]` in a circulant of size `2m`.
    pub fn new(autocov: &[f64]) -> Result<Self> {
        if autocov.len() < 2 {
            return Err(Error::domain("circulant embedding needs at least one lag"));
        }
        let m = autocov.len() - 1;
        let size = 2 * m;
        let mut row: Vec<Complex64> = (0..size)
            .map(|k| {
                let lag = if k <= m { k } else { size - k };
                Complex64::new(autocov[lag], 0.0)
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(size);
        fft.process(&mut row);

        let max = row.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
        let min = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if min < -NEGATIVE_EIGEN_TOLERANCE * max {
            return Err(Error::Embedding { eigenvalue: min, max });
        }
        let scale = row
            .iter()
            .map(|c| (c.re.max(0.0) / size as f64).sqrt())
            .collect();
        Ok(Self { len: m, scale, fft })
    }

    /// Length of the synthesized sequence.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of standard normals consumed per sample.
    pub fn normals_per_sample(&self) -> usize {
        2 * self.len
    }

    /// Synthesizes one sample into `out` from `2m` standard normals.
    ///
    /// Uses the real Hermitian construction: modes `0` and `m` get one real
    /// normal each, interior modes a complex normal with conjugate mirror.
    pub fn synthesize(&self, normals: &[f64], buf: &mut Vec<Complex64>, out: &mut [f64]) {
        let size = 2 * self.len;
        let m = self.len;
        debug_assert_eq!(normals.len(), size);
        debug_assert_eq!(out.len(), m);
        buf.clear();
        buf.resize(size, Complex64::new(0.0, 0.0));
        buf[0] = Complex64::new(self.scale[0] * normals[0], 0.0);
        buf[m] = Complex64::new(self.scale[m] * normals[1], 0.0);
        let half = std::f64::consts::FRAC_1_SQRT_2;
        for k in 1..m {
            let a = self.scale[k] * half;
            let v = Complex64::new(a * normals[2 * k], a * normals[2 * k + 1]);
            buf[k] = v;
            buf[size - k] = v.conj();
        }
        self.fft.process(buf);
        for (o, c) in out.iter_mut().zip(buf.iter()) {
            *o = c.re;
        }
    }
}
