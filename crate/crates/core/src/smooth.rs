//! Integrands with closed-form derivatives of every order and a closed-form
//! antiderivative.
//!
//! Three families are supported:
//!
//! * `poly(c0, c1, ..., ck)`: `c0 + c1 x + ... + ck x^k`
//! * `trig(a, b, c)`: `a sin(b x + c)`
//! * `exp(a, b)`: `a e^(b x)`
//!
//! The text grammar also accepts the shorthands `1` (any number), `x`,
//! `x^k`, `sin`, `cos` and `exp`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Polynomial,
    Trig,
    Exp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SmoothMap {
    /// Coefficients in ascending powers; trailing zeros are trimmed.
    Polynomial(Vec<f64>),
    Trig { amplitude: f64, frequency: f64, phase: f64 },
    Exp { amplitude: f64, rate: f64 },
}

fn trim(mut coeffs: Vec<f64>) -> Vec<f64> {
    while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
        coeffs.pop();
    }
    if coeffs.is_empty() {
        coeffs.push(0.0);
    }
    coeffs
}

impl SmoothMap {
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        SmoothMap::Polynomial(trim(coeffs))
    }

    pub fn constant(c: f64) -> Self {
        SmoothMap::Polynomial(vec![c])
    }

    pub fn identity() -> Self {
        SmoothMap::Polynomial(vec![0.0, 1.0])
    }

    pub fn monomial(degree: usize) -> Self {
        let mut c = vec![0.0; degree + 1];
        c[degree] = 1.0;
        SmoothMap::Polynomial(c)
    }

    pub fn sin() -> Self {
        SmoothMap::Trig { amplitude: 1.0, frequency: 1.0, phase: 0.0 }
    }

    pub fn cos() -> Self {
        SmoothMap::Trig { amplitude: 1.0, frequency: 1.0, phase: FRAC_PI_2 }
    }

    pub fn exp() -> Self {
        SmoothMap::Exp { amplitude: 1.0, rate: 1.0 }
    }

    pub fn family(&self) -> Family {
        match self {
            SmoothMap::Polynomial(_) => Family::Polynomial,
            SmoothMap::Trig { .. } => Family::Trig,
            SmoothMap::Exp { .. } => Family::Exp,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SmoothMap::Polynomial(c) => c.iter().rev().fold(0.0, |acc, a| acc * x + a),
            SmoothMap::Trig { amplitude, frequency, phase } => {
                amplitude * (frequency * x + phase).sin()
            }
            SmoothMap::Exp { amplitude, rate } => amplitude * (rate * x).exp(),
        }
    }

    /// The `k`-th derivative as a map of the same family.
    pub fn derivative(&self, k: usize) -> SmoothMap {
        match self {
            SmoothMap::Polynomial(c) => {
                if k >= c.len() {
                    return SmoothMap::constant(0.0);
                }
                let out = (k..c.len())
                    .map(|i| {
                        let falling: f64 = ((i - k + 1)..=i).map(|f| f as f64).product();
                        c[i] * falling
                    })
                    .collect();
                SmoothMap::polynomial(out)
            }
            SmoothMap::Trig { amplitude, frequency, phase } => SmoothMap::Trig {
                amplitude: amplitude * frequency.powi(k as i32),
                frequency: *frequency,
                phase: phase + k as f64 * FRAC_PI_2,
            },
            SmoothMap::Exp { amplitude, rate } => SmoothMap::Exp {
                amplitude: amplitude * rate.powi(k as i32),
                rate: *rate,
            },
        }
    }

    /// An antiderivative (zero constant of integration for polynomials).
    pub fn antiderivative(&self) -> SmoothMap {
        match self {
            SmoothMap::Polynomial(c) => {
                let mut out = vec![0.0];
                out.extend(c.iter().enumerate().map(|(i, a)| a / (i + 1) as f64));
                SmoothMap::polynomial(out)
            }
            SmoothMap::Trig { amplitude, frequency, phase } => {
                if *frequency == 0.0 {
                    SmoothMap::polynomial(vec![0.0, amplitude * phase.sin()])
                } else {
                    SmoothMap::Trig {
                        amplitude: amplitude / frequency,
                        frequency: *frequency,
                        phase: phase - FRAC_PI_2,
                    }
                }
            }
            SmoothMap::Exp { amplitude, rate } => {
                if *rate == 0.0 {
                    SmoothMap::polynomial(vec![0.0, *amplitude])
                } else {
                    SmoothMap::Exp { amplitude: amplitude / rate, rate: *rate }
                }
            }
        }
    }

    /// `a * g`.
    pub fn scaled(&self, a: f64) -> SmoothMap {
        match self {
            SmoothMap::Polynomial(c) => SmoothMap::polynomial(c.iter().map(|v| a * v).collect()),
            SmoothMap::Trig { amplitude, frequency, phase } => {
                SmoothMap::Trig { amplitude: a * amplitude, frequency: *frequency, phase: *phase }
            }
            SmoothMap::Exp { amplitude, rate } => SmoothMap::Exp { amplitude: a * amplitude, rate: *rate },
        }
    }

    /// True when the map and all its derivatives are bounded on the line.
    pub fn is_bounded(&self) -> bool {
        match self {
            SmoothMap::Polynomial(c) => c.len() == 1,
            SmoothMap::Trig { .. } => true,
            SmoothMap::Exp { amplitude, rate } => *rate == 0.0 || *amplitude == 0.0,
        }
    }

    /// Uniform bound on `|g^(k)|` for `k <= order`, when one exists.
    pub fn sup_norm(&self, order: usize) -> Option<f64> {
        if !self.is_bounded() {
            return None;
        }
        Some(match self {
            // bounded polynomials are constants
            SmoothMap::Polynomial(c) => c[0].abs(),
            SmoothMap::Trig { amplitude, frequency, .. } => {
                (0..=order).map(|k| (amplitude * frequency.powi(k as i32)).abs()).fold(0.0, f64::max)
            }
            SmoothMap::Exp { amplitude, .. } => amplitude.abs(),
        })
    }

    /// Constants `(K, r)` with `|g^(k)(x)| <= K (1 + |x|^r)` for all `k <= 6`.
    /// Only defined for polynomials.
    pub fn polynomial_growth(&self) -> Option<(f64, u32)> {
        match self {
            SmoothMap::Polynomial(c) => {
                let degree = (c.len() - 1) as u32;
                let k = (0..=6)
                    .map(|order| match self.derivative(order) {
                        SmoothMap::Polynomial(d) => d.iter().map(|v| v.abs()).sum::<f64>(),
                        _ => unreachable!(),
                    })
                    .fold(0.0, f64::max);
                Some((k, degree))
            }
            _ => None,
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            SmoothMap::Polynomial(c) => Some(c.len() - 1),
            _ => None,
        }
    }
}

impl fmt::Display for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothMap::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|v| format!("{v:?}")).collect();
                write!(f, "poly({})", parts.join(","))
            }
            SmoothMap::Trig { amplitude, frequency, phase } => {
                write!(f, "trig({amplitude:?},{frequency:?},{phase:?})")
            }
            SmoothMap::Exp { amplitude, rate } => write!(f, "exp({amplitude:?},{rate:?})"),
        }
    }
}

fn parse_args(body: &str, expected: Option<usize>) -> Result<Vec<f64>> {
    let args: Vec<f64> = body
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{}'", s.trim())))
        })
        .collect::<Result<_>>()?;
    if args.iter().any(|a| !a.is_finite()) {
        return Err(Error::Parse("integrand parameters must be finite".into()));
    }
    if let Some(k) = expected {
        if args.len() != k {
            return Err(Error::Parse(format!("expected {k} parameters, got {}", args.len())));
        }
    }
    Ok(args)
}

impl FromStr for SmoothMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let s = s.to_ascii_lowercase();
        match s.as_str() {
            "x" => return Ok(SmoothMap::identity()),
            "sin" => return Ok(SmoothMap::sin()),
            "cos" => return Ok(SmoothMap::cos()),
            "exp" => return Ok(SmoothMap::exp()),
            _ => {}
        }
        if let Some(deg) = s.strip_prefix("x^") {
            let d: usize = deg.parse().map_err(|_| Error::Parse(format!("bad exponent '{deg}'")))?;
            return Ok(SmoothMap::monomial(d));
        }
        if let Ok(c) = s.parse::<f64>() {
            if c.is_finite() {
                return Ok(SmoothMap::constant(c));
            }
        }
        let (name, rest) = s
            .split_once('(')
            .ok_or_else(|| Error::Parse(format!("unrecognized integrand '{s}'")))?;
        let body = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("missing ')' in '{s}'")))?;
        match name {
            "poly" => Ok(SmoothMap::polynomial(parse_args(body, None)?)),
            "trig" => {
                let a = parse_args(body, Some(3))?;
                Ok(SmoothMap::Trig { amplitude: a[0], frequency: a[1], phase: a[2] })
            }
            "exp" => {
                let a = parse_args(body, Some(2))?;
                Ok(SmoothMap::Exp { amplitude: a[0], rate: a[1] })
            }
            other => Err(Error::Parse(format!("unknown integrand family '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn corpus() -> Vec<SmoothMap> {
        vec![
            SmoothMap::constant(2.5),
            SmoothMap::identity(),
            SmoothMap::polynomial(vec![1.0, -2.0, 0.5, 0.25, -0.1, 0.03]),
            SmoothMap::sin(),
            SmoothMap::cos(),
            SmoothMap::Trig { amplitude: 0.7, frequency: 2.0, phase: 0.3 },
            SmoothMap::exp(),
            SmoothMap::Exp { amplitude: -1.5, rate: 0.4 },
        ]
    }

    #[test]
    fn derivative_zero_is_identity() {
        for g in corpus() {
            for x in [-1.3, 0.0, 0.8] {
                assert_abs_diff_eq!(g.derivative(0).eval(x), g.eval(x), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn antiderivative_differentiates_back() {
        for g in corpus() {
            let back = g.antiderivative().derivative(1);
            for i in 0..100 {
                let x = -3.0 + 6.0 * i as f64 / 99.0;
                let (a, b) = (back.eval(x), g.eval(x));
                assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{g}: {a} vs {b} at {x}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-4;
        for g in corpus() {
            for k in 0..6 {
                let dk = g.derivative(k);
                let dk1 = g.derivative(k + 1);
                for x in [-0.9, 0.2, 1.1] {
                    let fd = (dk.eval(x + h) - dk.eval(x - h)) / (2.0 * h);
                    let exact = dk1.eval(x);
                    assert!((fd - exact).abs() < 1e-5 * (1.0 + exact.abs()), "{g} k={k}");
                }
            }
        }
    }

    #[test]
    fn known_derivatives() {
        let sin = SmoothMap::sin();
        for x in [0.0, 0.5, 2.0] {
            assert_abs_diff_eq!(sin.derivative(1).eval(x), x.cos(), epsilon = 1e-14);
            assert_abs_diff_eq!(sin.derivative(3).eval(x), -x.cos(), epsilon = 1e-14);
            assert_abs_diff_eq!(sin.derivative(6).eval(x), -x.sin(), epsilon = 1e-14);
        }
        let cube = SmoothMap::monomial(3);
        assert_eq!(cube.derivative(3), SmoothMap::constant(6.0));
        assert_eq!(cube.derivative(4), SmoothMap::constant(0.0));
    }

    #[test]
    fn boundedness() {
        assert!(SmoothMap::sin().is_bounded());
        assert!(SmoothMap::constant(1.0).is_bounded());
        assert!(!SmoothMap::identity().is_bounded());
        assert!(!SmoothMap::exp().is_bounded());
        assert_eq!(SmoothMap::Trig { amplitude: 2.0, frequency: 3.0, phase: 0.0 }.sup_norm(2), Some(18.0));
        assert_eq!(SmoothMap::exp().sup_norm(1), None);
        let (k, r) = SmoothMap::polynomial(vec![1.0, 0.0, 3.0]).polynomial_growth().unwrap();
        assert_eq!(r, 2);
        assert_eq!(k, 6.0);
        assert!(SmoothMap::sin().polynomial_growth().is_none());
    }

    #[test]
    fn parsing() {
        assert_eq!("1".parse::<SmoothMap>().unwrap(), SmoothMap::constant(1.0));
        assert_eq!("x".parse::<SmoothMap>().unwrap(), SmoothMap::identity());
        assert_eq!("x^2".parse::<SmoothMap>().unwrap(), SmoothMap::monomial(2));
        assert_eq!(" sin ".parse::<SmoothMap>().unwrap(), SmoothMap::sin());
        assert_eq!("poly(1, 0, 2, 0)".parse::<SmoothMap>().unwrap(), SmoothMap::Polynomial(vec![1.0, 0.0, 2.0]));
        assert_eq!(
            "trig(2,0.5,1)".parse::<SmoothMap>().unwrap(),
            SmoothMap::Trig { amplitude: 2.0, frequency: 0.5, phase: 1.0 }
        );
        assert_eq!("exp(1,-2)".parse::<SmoothMap>().unwrap(), SmoothMap::Exp { amplitude: 1.0, rate: -2.0 });
        for bad in ["", "tan", "trig(1,2)", "poly(1,a)", "exp(1,2", "x^q", "poly(inf)"] {
            assert!(bad.parse::<SmoothMap>().is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(
            family in 0usize..3,
            params in proptest::collection::vec(-1e3f64..1e3, 1..6),
        ) {
            let g = match family {
                0 => SmoothMap::polynomial(params.clone()),
                1 => SmoothMap::Trig {
                    amplitude: params[0],
                    frequency: *params.get(1).unwrap_or(&1.0),
                    phase: *params.get(2).unwrap_or(&0.0),
                },
                _ => SmoothMap::Exp { amplitude: params[0], rate: *params.get(1).unwrap_or(&0.5) },
            };
            let parsed: SmoothMap = g.to_string().parse().unwrap();
            prop_assert_eq!(parsed, g);
        }
    }
}
