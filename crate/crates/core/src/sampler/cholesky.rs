use crate::error::{Error, Result};

/// Dense lower-triangular Cholesky factor, rows packed contiguously.
pub struct CholeskyFactor {
    dim: usize,
    packed: Vec<f64>,
}

#[inline]
fn row_start(i: usize) -> usize {
    i * (i + 1) / 2
}

impl CholeskyFactor {
    /// Factors the symmetric matrix given by `entry(i, j)` (read for `j <= i`).
    pub fn factor(dim: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut packed = vec![0.0; row_start(dim)];
        for i in 0..dim {
            let ri = row_start(i);
            for j in 0..=i {
                let rj = row_start(j);
                let dot: f64 = packed[ri..ri + j]
                    .iter()
                    .zip(&packed[rj..rj + j])
                    .map(|(a, b)| a * b)
                    .sum();
                let v = entry(i, j) - dot;
                if i == j {
                    if !(v > 0.0) {
                        return Err(Error::NotPositiveDefinite(i));
                    }
                    packed[ri + i] = v.sqrt();
                } else {
                    packed[ri + j] = v / packed[rj + j];
                }
            }
        }
        Ok(Self { dim, packed })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `out = L z`.
    pub fn mul_lower(&self, z: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.dim) {
            let ri = row_start(i);
            *o = self.packed[ri..=ri + i].iter().zip(z).map(|(a, b)| a * b).sum();
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.packed[row_start(i) + j]
        }
    }
}
