//! Replication drivers. Replication `r` always draws from stream
//! `seeds.stream_id + r` (oracle draws from `ORACLE_STREAM_BASE + r` on top
//! of that), so results do not depend on how rayon schedules the work, and
//! outputs are collected in replication order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel;
use crate::oracle::{weak_strat_integral, LimitSample};
use crate::rng::SeedPolicy;
use crate::sampler::{FbmSampler, Grid, Path, SamplingMethod};
use crate::smooth::SmoothMap;
use crate::variations::{riemann_strat, sextic, signed_cubic, weighted_hermite, Endpoint};

/// Offset separating oracle streams from estimator streams.
pub const ORACLE_STREAM_BASE: u64 = 1 << 32;

pub const DEFAULT_ORACLE_REFINEMENT: u64 = 1 << 14;

pub const DEFAULT_GRID_LADDER: [u64; 5] = [1 << 8, 1 << 9, 1 << 10, 1 << 11, 1 << 12];

/// Runs `f` for replications `0..count` in parallel and returns the results
/// in replication order.
pub fn replicate<T, F>(count: usize, seeds: SeedPolicy, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(SeedPolicy) -> T + Sync,
{
    (0..count as u64)
        .into_par_iter()
        .map(|r| f(seeds.with_stream(seeds.stream_id.wrapping_add(r))))
        .collect()
}

/// Fallible variant of [`replicate`]; the first error in replication order wins.
pub fn try_replicate<T, F>(count: usize, seeds: SeedPolicy, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(SeedPolicy) -> Result<T> + Sync,
{
    replicate(count, seeds, f).into_iter().collect()
}

fn oracle_seeds(seeds: SeedPolicy) -> SeedPolicy {
    seeds.with_stream(seeds.stream_id.wrapping_add(ORACLE_STREAM_BASE))
}

/// Terminal values `(B(T), V_n(B,T), I_n(g,B,T) for each g)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeSamples {
    pub terminal: Vec<f64>,
    pub cubic: Vec<f64>,
    /// One column per integrand.
    pub integrals: Vec<Vec<f64>>,
}

fn transpose(rows: Vec<(f64, f64, Vec<f64>)>, width: usize) -> ConvergeSamples {
    let mut out = ConvergeSamples {
        terminal: Vec::with_capacity(rows.len()),
        cubic: Vec::with_capacity(rows.len()),
        integrals: vec![Vec::with_capacity(rows.len()); width],
    };
    for (b, v, ints) in rows {
        out.terminal.push(b);
        out.cubic.push(v);
        for (col, x) in out.integrals.iter_mut().zip(ints) {
            col.push(x);
        }
    }
    out
}

/// Riemann-sum side of the convergence experiment on the grid of size `n`.
pub fn estimator_samples(
    integrands: &[SmoothMap],
    grid: Grid,
    replications: usize,
    seeds: SeedPolicy,
    method: SamplingMethod,
) -> Result<ConvergeSamples> {
    let sampler = FbmSampler::new(grid, method)?;
    let rows = replicate(replications, seeds, |s| {
        let path = sampler.sample(s);
        let ints = integrands.iter().map(|g| riemann_strat(g, &path).terminal()).collect();
        (path.terminal(), signed_cubic(&path).terminal(), ints)
    });
    Ok(transpose(rows, integrands.len()))
}

/// Limit-law side: `(B(T), kappa W(T), int_0^T g(B) dB for each g)` on a
/// grid of size `refinement`.
pub fn oracle_samples(
    integrands: &[SmoothMap],
    refinement: u64,
    horizon: f64,
    replications: usize,
    seeds: SeedPolicy,
) -> Result<ConvergeSamples> {
    let grid = Grid::new(refinement, horizon)?;
    let sampler = FbmSampler::new(grid, SamplingMethod::Circulant)?;
    let kappa = kernel::kappa();
    let rows = try_replicate(replications, oracle_seeds(seeds), |s| {
        let sample = LimitSample::draw(&sampler, s, kappa);
        let ints = integrands
            .iter()
            .map(|g| weak_strat_integral(g, &sample, horizon))
            .collect::<Result<Vec<f64>>>()?;
        Ok((sample.b_at(horizon)?, sample.signed_cubic_at(horizon)?, ints))
    })?;
    Ok(transpose(rows, integrands.len()))
}

/// Per-replication sextic variation summary on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SexticRow {
    pub terminal: f64,
    /// `sup_t |V_n^6(B,t) - 15 t|`.
    pub sup_deviation: f64,
}

pub fn sextic_samples(grid: Grid, replications: usize, seeds: SeedPolicy, method: SamplingMethod) -> Result<Vec<SexticRow>> {
    let sampler = FbmSampler::new(grid, method)?;
    Ok(replicate(replications, seeds, |s| {
        let v6 = sextic(&sampler.sample(s));
        SexticRow { terminal: v6.terminal(), sup_deviation: v6.sup_deviation_from_line(15.0) }
    }))
}

/// Per-replication signed cubic variation with the companions used to
/// judge its independence from the path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicRow {
    pub cubic: f64,
    pub terminal: f64,
    /// `G_n^-(1, B, T)`, the cubic variation with the `3 n^(-1/3) B` drift removed.
    pub hermite_left: f64,
}

pub fn signed_cubic_samples(grid: Grid, replications: usize, seeds: SeedPolicy, method: SamplingMethod) -> Result<Vec<CubicRow>> {
    let sampler = FbmSampler::new(grid, method)?;
    let one = SmoothMap::constant(1.0);
    Ok(replicate(replications, seeds, |s| {
        let path = sampler.sample(s);
        CubicRow {
            cubic: signed_cubic(&path).terminal(),
            terminal: path.terminal(),
            hermite_left: weighted_hermite(&one, &path, Endpoint::Left).terminal(),
        }
    }))
}

/// Left and right weighted Hermite variations at `T`, from the same path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteRow {
    pub left: f64,
    pub right: f64,
}

pub fn hermite_samples(
    g: &SmoothMap,
    grid: Grid,
    replications: usize,
    seeds: SeedPolicy,
    method: SamplingMethod,
) -> Result<Vec<HermiteRow>> {
    let sampler = FbmSampler::new(grid, method)?;
    Ok(replicate(replications, seeds, |s| {
        let path = sampler.sample(s);
        HermiteRow {
            left: weighted_hermite(g, &path, Endpoint::Left).terminal(),
            right: weighted_hermite(g, &path, Endpoint::Right).terminal(),
        }
    }))
}

/// Full paths, for Gram-matrix and distributional checks of the sampler.
pub fn path_samples(grid: Grid, replications: usize, seeds: SeedPolicy, method: SamplingMethod) -> Result<Vec<Path>> {
    let sampler = FbmSampler::new(grid, method)?;
    Ok(replicate(replications, seeds, |s| sampler.sample(s)))
}

/// Entrywise comparison of the empirical path Gram matrix with `R(t_i, t_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramCheck {
    /// Largest `|empirical - exact| / SE` over `1 <= i <= j <= m`.
    pub max_z: f64,
    pub worst: (usize, usize),
    pub entries: usize,
}

/// The SE of each entry is estimated from the spread of the products
/// `X_i X_j` across paths.
pub fn gram_check(paths: &[Path]) -> Result<GramCheck> {
    let first = paths.first().ok_or_else(|| Error::domain("no paths to check"))?;
    let grid = *first.grid();
    if paths.iter().any(|p| p.grid() != &grid) {
        return Err(Error::domain("paths must share a grid"));
    }
    let m = grid.m();
    let count = paths.len() as f64;
    let rows: Vec<(f64, (usize, usize), usize)> = (1..=m)
        .into_par_iter()
        .map(|i| {
            let mut best = (0.0f64, (i, i));
            for j in i..=m {
                let (mut s, mut s2) = (0.0, 0.0);
                for p in paths {
                    let v = p.values();
                    let x = v[i] * v[j];
                    s += x;
                    s2 += x * x;
                }
                let mean = s / count;
                let var = (s2 / count - mean * mean) * count / (count - 1.0);
                let se = (var / count).sqrt();
                let exact = kernel::cov_r_unchecked(grid.time(i), grid.time(j));
                let z = (mean - exact).abs() / se;
                if z > best.0 {
                    best = (z, (i, j));
                }
            }
            (best.0, best.1, m - i + 1)
        })
        .collect();
    let mut out = GramCheck { max_z: 0.0, worst: (1, 1), entries: 0 };
    for (z, at, k) in rows {
        if z > out.max_z {
            out.max_z = z;
            out.worst = at;
        }
        out.entries += k;
    }
    Ok(out)
}
