//! Closed-form covariance machinery for fractional Brownian motion with
//! Hurst index 1/6.
//!
//! Everything here is a pure function of its arguments. Fractional powers
//! `|x|^(1/3)` are evaluated with [`f64::cbrt`] on the absolute value, so no
//! complex branch is ever touched.

use crate::error::{Error, Result};

/// Hurst index of the process.
pub const HURST: f64 = 1.0 / 6.0;

/// Exponent `2H` appearing in the covariance `|t - s|^(2H)`.
pub const TWO_H: f64 = 2.0 * HURST;

/// Default number of lags summed for `kappa`.
pub const DEFAULT_TRUNCATION: u64 = 10_000;

/// Highest Hermite order evaluated by [`hermite`].
pub const MAX_HERMITE_ORDER: usize = 12;

/// `|x|^(1/3)`.
#[inline]
pub fn abs_pow_two_h(x: f64) -> f64 {
    x.abs().cbrt()
}

fn check_time(name: &str, t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("{name} must be a finite nonnegative time, got {t}")));
    }
    Ok(())
}

/// Covariance `E[B(s)B(t)] = (t^(1/3) + s^(1/3) - |t-s|^(1/3)) / 2`.
pub fn cov_r(s: f64, t: f64) -> Result<f64> {
    check_time("s", s)?;
    check_time("t", t)?;
    Ok(cov_r_unchecked(s, t))
}

#[inline]
pub(crate) fn cov_r_unchecked(s: f64, t: f64) -> f64 {
    0.5 * (abs_pow_two_h(t) + abs_pow_two_h(s) - abs_pow_two_h(t - s))
}

/// `E|B(t) - B(s)|^2 = |t - s|^(1/3)`.
pub fn increment_var(s: f64, t: f64) -> Result<f64> {
    check_time("s", s)?;
    check_time("t", t)?;
    Ok(abs_pow_two_h(t - s))
}

/// Correlation of unit-grid fractional Gaussian noise at lag `r`.
pub fn rho(r: i64) -> f64 {
    let r = r as f64;
    0.5 * (abs_pow_two_h(r + 1.0) + abs_pow_two_h(r - 1.0) - 2.0 * abs_pow_two_h(r))
}

/// The constant `kappa^2 = 6 * sum_r rho(r)^3`, truncated to `|r| <= R`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KernelConstants {
    pub kappa_sq: f64,
    pub kappa: f64,
    pub truncation_radius: u64,
    /// Upper bound on `sum_{|r| > R} 6 |rho(r)|^3`.
    pub tail_bound: f64,
}

/// Sums `6 * rho(r)^3` over `|r| <= truncation_radius`.
///
/// The sum is accumulated from the largest lag down so the small tail terms
/// are added before the `O(1)` ones.
pub fn kappa_constant(truncation_radius: u64) -> KernelConstants {
    let mut sum = 0.0;
    for r in (1..=truncation_radius).rev() {
        sum += 2.0 * rho(r as i64).powi(3);
    }
    sum += 1.0;
    let kappa_sq = 6.0 * sum;
    KernelConstants {
        kappa_sq,
        kappa: kappa_sq.sqrt(),
        truncation_radius,
        tail_bound: kappa_tail_bound(truncation_radius),
    }
}

/// `kappa` at the default truncation.
pub fn kappa() -> f64 {
    kappa_constant(DEFAULT_TRUNCATION).kappa
}

/// Bound on `sum_{|r| > R} 6|rho(r)|^3`.
///
/// For `r >= 2` the second difference gives `|rho(r)| <= (r-1)^(-5/3) / 9`,
/// hence `|rho(r)|^3 <= (r-1)^(-5) / 729`; the remaining series is bounded by
/// its first term plus the integral tail.
pub fn kappa_tail_bound(truncation_radius: u64) -> f64 {
    let mut bound = 0.0;
    let mut start = truncation_radius + 1;
    if start == 1 {
        bound += 12.0 * rho(1).abs().powi(3);
        start = 2;
    }
    let k = (start - 1) as f64;
    let series = k.powi(-5) + k.powi(-4) / 4.0;
    bound + 12.0 / 729.0 * series
}

/// Probabilists' Hermite polynomial stored in the monomial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitePoly {
    order: usize,
    coefficients: Vec<f64>,
}

impl HermitePoly {
    pub fn new(order: usize) -> Result<Self> {
        if order > MAX_HERMITE_ORDER {
            return Err(Error::capability(format!(
                "Hermite order {order} exceeds supported maximum {MAX_HERMITE_ORDER}"
            )));
        }
        let mut prev = vec![1.0];
        if order == 0 {
            return Ok(Self { order, coefficients: prev });
        }
        let mut cur = vec![0.0, 1.0];
        for k in 1..order {
            // h_{k+1} = x h_k - k h_{k-1}
            let mut next = vec![0.0; k + 2];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += c;
            }
            for (i, c) in prev.iter().enumerate() {
                next[i] -= k as f64 * c;
            }
            prev = std::mem::replace(&mut cur, next);
        }
        Ok(Self { order, coefficients: cur })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficients in ascending powers of `x`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// `h_n(x)` via the three-term recurrence.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    if n > MAX_HERMITE_ORDER {
        return Err(Error::capability(format!(
            "Hermite order {n} exceeds supported maximum {MAX_HERMITE_ORDER}"
        )));
    }
    Ok(hermite_unchecked(n, x))
}

#[inline]
pub(crate) fn hermite_unchecked(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for k in 1..n {
                let next = x * cur - k as f64 * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `h_3(x) = x^3 - 3x`.
#[inline]
pub fn h3(x: f64) -> f64 {
    x * (x * x - 3.0)
}

fn check_grid_size(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("grid size n must be positive"));
    }
    Ok(())
}

/// `E[dB_i dB_j] = n^(-1/3) rho(i - j)` for the grid `t_j = j/n`.
pub fn increment_cov(n: u64, i: u64, j: u64) -> Result<f64> {
    check_grid_size(n)?;
    if i == 0 || j == 0 {
        return Err(Error::domain("increment indices start at 1"));
    }
    Ok((n as f64).cbrt().recip() * rho(i as i64 - j as i64))
}

/// `E[B(s) dB_k]` where `dB_k = B(k/n) - B((k-1)/n)`.
pub fn endpoint_increment_cov(n: u64, s: f64, k: u64) -> Result<f64> {
    check_grid_size(n)?;
    check_time("s", s)?;
    if k == 0 {
        return Err(Error::domain("increment index k starts at 1"));
    }
    Ok(endpoint_increment_cov_unchecked(n, s, k))
}

#[inline]
pub(crate) fn endpoint_increment_cov_unchecked(n: u64, s: f64, k: u64) -> f64 {
    let nf = n as f64;
    let kf = k as f64;
    let ns = nf * s;
    (kf.cbrt() - (kf - 1.0).cbrt() - abs_pow_two_h(kf - ns) + abs_pow_two_h(kf - ns - 1.0))
        / (2.0 * nf.cbrt())
}

/// `sum_{k <= floor(nt)} |E[B(t_{k-1}) dB_k]^3 + 1/(8n)|`.
pub fn left_endpoint_cube_defect(n: u64, t: f64) -> Result<f64> {
    endpoint_cube_defect(n, t, false)
}

/// `sum_{k <= floor(nt)} |E[B(t_k) dB_k]^3 - 1/(8n)|`.
pub fn right_endpoint_cube_defect(n: u64, t: f64) -> Result<f64> {
    endpoint_cube_defect(n, t, true)
}

fn endpoint_cube_defect(n: u64, t: f64, right: bool) -> Result<f64> {
    check_grid_size(n)?;
    check_time("t", t)?;
    let nf = n as f64;
    let steps = (nf * t + 1e-9).floor() as u64;
    let shift = 1.0 / (8.0 * nf);
    let mut total = 0.0;
    for k in 1..=steps {
        let s = if right { k as f64 / nf } else { (k - 1) as f64 / nf };
        let e = endpoint_increment_cov_unchecked(n, s, k);
        total += if right { (e.powi(3) - shift).abs() } else { (e.powi(3) + shift).abs() };
    }
    Ok(total)
}
