//! Symmetric Taylor expansion about the midpoint:
//!
//! `g(b) - g(a) = (g'(a) + g'(b))(b - a)/2 - g'''(x)(b - a)^3/12
//!               + gamma g^(5)(x)(b - a)^5 + R6(a, b)`
//!
//! with `x = (a + b)/2`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::smooth::SmoothMap;

/// `1/(5! 2^4) - 1/(4! 2^4)`.
pub const GAMMA: f64 = -1.0 / 480.0;

/// `GAMMA` in exact arithmetic, built from its factorial definition.
pub fn gamma_exact() -> Ratio<i64> {
    let fact = |k: i64| (1..=k).product::<i64>();
    Ratio::new(1, fact(5) * 16) - Ratio::new(1, fact(4) * 16)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorResidual {
    /// `g(b) - g(a) - (g'(a) + g'(b))(b - a)/2`.
    pub trapezoid_defect: f64,
    /// `gamma g^(5)(x)(b - a)^5`.
    pub gamma_term: f64,
    pub r6: f64,
}

pub fn taylor_residual(g: &SmoothMap, a: f64, b: f64) -> TaylorResidual {
    let h = b - a;
    let x = 0.5 * (a + b);
    let g1 = g.derivative(1);
    let trapezoid_defect = g.eval(b) - g.eval(a) - 0.5 * (g1.eval(a) + g1.eval(b)) * h;
    let cubic_term = g.derivative(3).eval(x) * h.powi(3) / 12.0;
    let gamma_term = GAMMA * g.derivative(5).eval(x) * h.powi(5);
    TaylorResidual {
        trapezoid_defect,
        gamma_term,
        r6: trapezoid_defect + cubic_term - gamma_term,
    }
}

type Q = Ratio<i128>;

fn poly_eval(coeffs: &[Q], x: Q) -> Q {
    coeffs.iter().rev().fold(Q::from_integer(0), |acc, &c| acc * x + c)
}

fn poly_derivative(coeffs: &[Q]) -> Vec<Q> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * Q::from_integer(k as i128))
        .collect()
}

/// `R6` for a polynomial with rational coefficients at rational endpoints,
/// computed without rounding.
pub fn exact_polynomial_r6(coeffs: &[Q], a: Q, b: Q) -> Q {
    let mut derivs = vec![coeffs.to_vec()];
    for k in 0..5 {
        let next = poly_derivative(&derivs[k]);
        derivs.push(next);
    }
    let h = b - a;
    let x = (a + b) / Q::from_integer(2);
    let gamma = {
        let g = gamma_exact();
        Q::new(*g.numer() as i128, *g.denom() as i128)
    };
    let defect = poly_eval(coeffs, b)
        - poly_eval(coeffs, a)
        - (poly_eval(&derivs[1], a) + poly_eval(&derivs[1], b)) * h / Q::from_integer(2);
    defect + poly_eval(&derivs[3], x) * h * h * h / Q::from_integer(12)
        - gamma * poly_eval(&derivs[5], x) * h * h * h * h * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_is_minus_one_over_480() {
        assert_eq!(gamma_exact(), Ratio::new(-1, 480));
        assert_eq!(GAMMA, -1.0 / 480.0);
    }

    #[test]
    fn cubic_closes_exactly() {
        let g = SmoothMap::monomial(3);
        for (a, b) in [(0.0, 1.0), (-2.0, 0.5), (1.25, 3.5)] {
            let r = taylor_residual(&g, a, b);
            assert_eq!(r.gamma_term, 0.0);
            assert!(r.r6.abs() < 1e-12);
            // trapezoid minus (1/12) 6 (b - a)^3 equals b^3 - a^3
            let trap = 0.5 * (3.0 * a * a + 3.0 * b * b) * (b - a);
            assert!((trap - 0.5 * (b - a).powi(3) - (b.powi(3) - a.powi(3))).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_r6_vanishes_for_quintics() {
        let q = |n: i128, d: i128| Q::new(n, d);
        let coeffs = [q(3, 1), q(-1, 2), q(2, 3), q(5, 1), q(-7, 4), q(1, 5)];
        for (a, b) in [(q(0, 1), q(1, 1)), (q(-3, 2), q(7, 3)), (q(5, 7), q(-2, 9))] {
            assert_eq!(exact_polynomial_r6(&coeffs, a, b), q(0, 1));
        }
        // the remainder only sees differences of g^(6), so a sextic term is
        // still invisible and x^7 is the first to leave a trace
        let mut seven = coeffs.to_vec();
        seven.push(q(4, 1));
        assert_eq!(exact_polynomial_r6(&seven, q(0, 1), q(1, 1)), q(0, 1));
        seven.push(q(1, 1));
        assert_eq!(exact_polynomial_r6(&seven, q(0, 1), q(1, 1)), q(-3, 32));
    }

    #[test]
    fn sin_remainder_is_tiny() {
        let (a, b) = (0.0, 0.1);
        let r = taylor_residual(&SmoothMap::sin(), a, b);
        assert!(r.r6.abs() <= 1e-7, "{}", r.r6);
        // direct evaluation of both sides
        let lhs = b.sin() - a.sin();
        let x: f64 = 0.05;
        let rhs = 0.5 * (a.cos() + b.cos()) * 0.1 + x.cos() * 1e-3 / 12.0 + GAMMA * x.cos() * 1e-5;
        assert!((lhs - rhs - r.r6).abs() < 1e-15);
    }
}
