//! Fractional Brownian motion with Hurst index 1/6: exact path sampling,
//! power and weighted Hermite variations, symmetric Riemann sums, samples of
//! their limit laws, and the Monte Carlo and quadrature machinery used to
//! compare the two.

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod kernel;
pub mod oracle;
pub mod rng;
pub mod sampler;
pub mod smooth;
pub mod variations;

pub use error::{Error, Result};
pub use rng::SeedPolicy;
pub use sampler::{FbmSampler, Grid, Path, SamplingMethod};
pub use smooth::SmoothMap;
