//! Gaussian expectations and time integrals by Gauss quadrature.
//!
//! Node generation is delegated to `gauss-quad`; this module converts the
//! physicists' Hermite rule to the standard normal weight and adds the
//! substitutions needed for integrands in `s^(1/3)`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::{GaussHermite, GaussLegendre};

use crate::kernel::cov_r_unchecked;
use crate::smooth::SmoothMap;

/// Probabilists' Gauss-Hermite rule: `E f(Z) ~ sum w_i f(x_i)`, `Z ~ N(0, 1)`.
#[derive(Debug, Clone)]
pub struct NormalRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl NormalRule {
    pub fn new(degree: usize) -> Self {
        let rule = GaussHermite::new(NonZeroUsize::new(degree.max(1)).unwrap());
        let (nodes, weights) = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (x * 2f64.sqrt(), w / PI.sqrt()))
            .unzip();
        Self { nodes, weights }
    }

    pub fn degree(&self) -> usize {
        self.nodes.len()
    }

    /// `E f(X)` for `X ~ N(0, var)`.
    pub fn expect(&self, var: f64, f: impl Fn(f64) -> f64) -> f64 {
        let sd = var.max(0.0).sqrt();
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(sd * x)).sum()
    }

    /// `E f(X, Y)` for a centred Gaussian pair with the given covariance.
    pub fn expect_pair(&self, var_x: f64, var_y: f64, cov: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
        let sx = var_x.max(0.0).sqrt();
        let (load, resid) = if sx > 0.0 {
            let load = cov / sx;
            (load, (var_y - load * load).max(0.0).sqrt())
        } else {
            (0.0, var_y.max(0.0).sqrt())
        };
        let mut total = 0.0;
        for (z1, w1) in self.nodes.iter().zip(&self.weights) {
            let x = sx * z1;
            let mut inner = 0.0;
            for (z2, w2) in self.nodes.iter().zip(&self.weights) {
                inner += w2 * f(x, load * z1 + resid * z2);
            }
            total += w1 * inner;
        }
        total
    }
}

/// `int_0^t f(s) ds` with `s = t u^3`, which removes the `s^(1/3)` cusp at 0.
pub fn integrate_time(t: f64, degree: usize, f: impl Fn(f64) -> f64) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(degree.max(1)).unwrap());
    rule.integrate(0.0, 1.0, |u| 3.0 * t * u * u * f(t * u * u * u))
}

/// `int_0^t int_0^t k(s, u) ds du` for symmetric `k`, computed as twice the
/// lower triangle with `u = t a^3`, `s = u b^3`.
pub fn integrate_time_square(t: f64, degree: usize, k: impl Fn(f64, f64) -> f64) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(degree.max(1)).unwrap());
    let pairs = rule.as_node_weight_pairs();
    let mut total = 0.0;
    for &(xa, wa) in pairs {
        let a = 0.5 * (xa + 1.0);
        let u = t * a * a * a;
        let du = 3.0 * t * a * a * 0.5 * wa;
        let mut inner = 0.0;
        for &(xb, wb) in pairs {
            let b = 0.5 * (xb + 1.0);
            let s = u * b * b * b;
            inner += 3.0 * u * b * b * 0.5 * wb * k(s, u);
        }
        total += du * inner;
    }
    2.0 * total
}

/// Time and Hermite resolutions used by the limit formulas below.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResolution {
    pub time_nodes: usize,
    pub hermite_nodes: usize,
}

impl Default for QuadratureResolution {
    fn default() -> Self {
        Self { time_nodes: 96, hermite_nodes: 32 }
    }
}

/// `-(1/8) int_0^t E g'''(B_s) ds`, the limiting mean of the left-point
/// weighted Hermite variation. The right-point variation has the opposite sign.
pub fn hermite_mean_limit(g: &SmoothMap, t: f64, res: QuadratureResolution) -> f64 {
    let g3 = g.derivative(3);
    let rule = NormalRule::new(res.hermite_nodes);
    let integral = integrate_time(t, res.time_nodes, |s| rule.expect(s.cbrt(), |x| g3.eval(x)));
    -integral / 8.0
}

/// `kappa^2 int_0^t E g^2(B_s) ds + (1/64) E(int_0^t g'''(B_s) ds)^2`, the
/// limiting second moment of the weighted Hermite variation.
pub fn hermite_second_moment_limit(g: &SmoothMap, kappa_sq: f64, t: f64, res: QuadratureResolution) -> f64 {
    let rule = NormalRule::new(res.hermite_nodes);
    let g3 = g.derivative(3);
    let first = integrate_time(t, res.time_nodes, |s| rule.expect(s.cbrt(), |x| g.eval(x).powi(2)));
    let second = integrate_time_square(t, res.time_nodes, |s, u| {
        rule.expect_pair(s.cbrt(), u.cbrt(), cov_r_unchecked(s, u), |x, y| g3.eval(x) * g3.eval(y))
    });
    kappa_sq * first + second / 64.0
}

/// Limiting variance: the second moment limit minus the squared mean limit.
pub fn hermite_variance_limit(g: &SmoothMap, kappa_sq: f64, t: f64, res: QuadratureResolution) -> f64 {
    let mean = hermite_mean_limit(g, t, res);
    hermite_second_moment_limit(g, kappa_sq, t, res) - mean * mean
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments() {
        let rule = NormalRule::new(20);
        assert!((rule.expect(1.0, |x| x * x) - 1.0).abs() < 1e-13);
        assert!((rule.expect(2.0, |x| x.powi(4)) - 12.0).abs() < 1e-11);
        assert!((rule.expect(1.0, |x| x.powi(6)) - 15.0).abs() < 1e-11);
        // E cos(X) = exp(-var/2)
        assert!((rule.expect(0.7, f64::cos) - (-0.35f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn correlated_pair() {
        let rule = NormalRule::new(24);
        let v = rule.expect_pair(1.0, 2.0, 0.6, |x, y| x * y);
        assert!((v - 0.6).abs() < 1e-12);
        let v = rule.expect_pair(0.0, 1.0, 0.0, |x, y| x + y * y);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn time_integrals() {
        // int_0^1 s^(1/3) ds = 3/4
        assert!((integrate_time(1.0, 20, f64::cbrt) - 0.75).abs() < 1e-13);
        // int int |s-u|^(1/3) over the unit square = 9/14
        let v = integrate_time_square(1.0, 80, |s, u| (s - u).abs().cbrt());
        assert!((v - 9.0 / 14.0).abs() < 1e-5, "{v}");
    }

    // Reference values from 30-digit adaptive quadrature of the closed forms
    // E cos(B_s) = exp(-s^(1/3)/2), E sin^2(B_s) = (1 - exp(-2 s^(1/3)))/2.
    const MEAN_LIMIT_SIN: f64 = 0.086_326_067_801_824_12;
    const SECOND_MOMENT_LIMIT_SIN: f64 = 2.050_128_225_556_05;

    #[test]
    fn sin_limits_match_closed_forms() {
        let res = QuadratureResolution::default();
        let mean = hermite_mean_limit(&SmoothMap::sin(), 1.0, res);
        assert!((mean - MEAN_LIMIT_SIN).abs() < 1e-10, "{mean}");
        let kappa_sq = crate::kernel::kappa_constant(10_000).kappa_sq;
        let m2 = hermite_second_moment_limit(&SmoothMap::sin(), kappa_sq, 1.0, res);
        assert!((m2 - SECOND_MOMENT_LIMIT_SIN).abs() < 1e-5, "{m2}");
    }
}
