//! Exact sampling of fractional Brownian motion (H = 1/6) and independent
//! standard Brownian motion on uniform grids.

mod cholesky;
mod circulant;
mod export;
mod grid;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cholesky::CholeskyFactor;
pub use circulant::{CirculantEmbedding, NEGATIVE_EIGEN_TOLERANCE};
pub use export::{read_binary, write_binary, write_csv};
pub use grid::Grid;

use crate::error::{Error, Result};
use crate::kernel::rho;
use crate::rng::{NormalStream, SeedPolicy, Substream};

/// Largest step count accepted by the Cholesky sampler.
pub const CHOLESKY_MAX_STEPS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PathKind {
    /// Fractional Brownian motion with H = 1/6.
    Fbm,
    /// Standard Brownian motion.
    Bm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SamplingMethod {
    Cholesky,
    Circulant,
    /// Independent Gaussian increments (Brownian paths only).
    Independent,
}

impl fmt::Display for SamplingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingMethod::Cholesky => "cholesky",
            SamplingMethod::Circulant => "circulant",
            SamplingMethod::Independent => "independent",
        })
    }
}

impl FromStr for SamplingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cholesky" => Ok(SamplingMethod::Cholesky),
            "circulant" => Ok(SamplingMethod::Circulant),
            "independent" => Ok(SamplingMethod::Independent),
            other => Err(Error::Parse(format!("unknown sampling method '{other}'"))),
        }
    }
}

/// A sampled path on a grid. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    grid: Grid,
    values: Vec<f64>,
    kind: PathKind,
    seeds: SeedPolicy,
    method: SamplingMethod,
}

impl Path {
    /// Wraps externally produced values; `values[0]` must be zero.
    pub fn from_values(
        grid: Grid,
        values: Vec<f64>,
        kind: PathKind,
        seeds: SeedPolicy,
        method: SamplingMethod,
    ) -> Result<Self> {
        if values.len() != grid.m() + 1 {
            return Err(Error::domain(format!(
                "path has {} values, grid needs {}",
                values.len(),
                grid.m() + 1
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::domain("path must start at 0"));
        }
        Ok(Self { grid, values, kind, seeds, method })
    }

    fn from_increments(
        grid: Grid,
        increments: &[f64],
        kind: PathKind,
        seeds: SeedPolicy,
        method: SamplingMethod,
    ) -> Self {
        let mut values = Vec::with_capacity(increments.len() + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for d in increments {
            acc += d;
            values.push(acc);
        }
        Self { grid, values, kind, seeds, method }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn seeds(&self) -> SeedPolicy {
        self.seeds
    }

    pub fn method(&self) -> SamplingMethod {
        self.method
    }

    /// `X(t_j) - X(t_{j-1})` for `j = 1..=m`.
    pub fn increments(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    /// Step approximation `X(floor(nt)/n)`.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        Ok(self.values[self.grid.index_of(t)?])
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("path has at least two values")
    }
}

enum Engine {
    Cholesky(CholeskyFactor),
    Circulant(CirculantEmbedding),
}

/// Reusable fBm sampler for one grid; the factorization or spectral
/// embedding is computed once and shared across replications.
pub struct FbmSampler {
    grid: Grid,
    method: SamplingMethod,
    engine: Engine,
}

impl FbmSampler {
    pub fn new(grid: Grid, method: SamplingMethod) -> Result<Self> {
        let m = grid.m();
        let var = grid.dt().cbrt();
        let engine = match method {
            SamplingMethod::Cholesky => {
                if m > CHOLESKY_MAX_STEPS {
                    return Err(Error::capability(format!(
                        "Cholesky sampler limited to {CHOLESKY_MAX_STEPS} steps, grid has {m}"
                    )));
                }
                let acov: Vec<f64> = (0..m).map(|r| var * rho(r as i64)).collect();
                Engine::Cholesky(CholeskyFactor::factor(m, |i, j| acov[i - j])?)
            }
            SamplingMethod::Circulant => {
                let acov: Vec<f64> = (0..=m).map(|r| var * rho(r as i64)).collect();
                Engine::Circulant(CirculantEmbedding::new(&acov)?)
            }
            SamplingMethod::Independent => {
                return Err(Error::domain("independent increments do not produce fBm"));
            }
        };
        Ok(Self { grid, method, engine })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn method(&self) -> SamplingMethod {
        self.method
    }

    pub fn sample(&self, seeds: SeedPolicy) -> Path {
        let m = self.grid.m();
        let mut stream = NormalStream::new(seeds, Substream::Fbm);
        let mut increments = vec![0.0; m];
        match &self.engine {
            Engine::Cholesky(factor) => {
                let mut z = vec![0.0; m];
                stream.fill_normal(&mut z);
                factor.mul_lower(&z, &mut increments);
            }
            Engine::Circulant(embedding) => {
                let mut z = vec![0.0; embedding.normals_per_sample()];
                stream.fill_normal(&mut z);
                let mut buf = Vec::new();
                embedding.synthesize(&z, &mut buf, &mut increments);
            }
        }
        Path::from_increments(self.grid, &increments, PathKind::Fbm, seeds, self.method)
    }
}

/// Samples one fBm path. Prefer [`FbmSampler`] when drawing many.
pub fn sample_fbm(grid: Grid, seeds: SeedPolicy, method: SamplingMethod) -> Result<Path> {
    Ok(FbmSampler::new(grid, method)?.sample(seeds))
}

/// Samples a standard Brownian path. Its stream is disjoint from every fBm
/// stream, so a `(B, W)` pair drawn with the same seeds is independent.
pub fn sample_bm(grid: Grid, seeds: SeedPolicy) -> Path {
    let mut stream = NormalStream::new(seeds, Substream::Bm);
    let sd = grid.dt().sqrt();
    let increments: Vec<f64> = (0..grid.m()).map(|_| sd * stream.next_normal()).collect();
    Path::from_increments(grid, &increments, PathKind::Bm, seeds, SamplingMethod::Independent)
}

/// Exact subsampling onto the grid `j / coarse_n`.
pub fn restrict(path: &Path, coarse_n: u64) -> Result<Path> {
    let n = path.grid.n();
    if coarse_n == 0 || n % coarse_n != 0 {
        return Err(Error::domain(format!("{coarse_n} does not divide grid size {n}")));
    }
    let grid = Grid::new(coarse_n, path.grid.horizon())?;
    let stride = (n / coarse_n) as usize;
    let values: Vec<f64> = path.values.iter().step_by(stride).copied().collect();
    debug_assert_eq!(values.len(), grid.m() + 1);
    Ok(Path { grid, values, kind: path.kind, seeds: path.seeds, method: path.method })
}
