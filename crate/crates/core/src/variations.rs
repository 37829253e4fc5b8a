//! Discrete functionals of a sampled path.
//!
//! Every functional is a prefix sum over grid steps, accumulated in
//! ascending order with Neumaier compensation, and returned as a
//! [`StepProcess`] evaluated by the step rule `t -> partials[floor(nt)]`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::h3;
use crate::sampler::{Grid, Path};
use crate::smooth::SmoothMap;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Sum of a slice with compensation.
pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Cadlag step function on a grid with `partials[0] = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepProcess {
    grid: Grid,
    partials: Vec<f64>,
    label: String,
}

impl StepProcess {
    /// Builds the prefix sums of `summands` (one per grid step).
    pub fn from_summands(grid: Grid, summands: impl IntoIterator<Item = f64>, label: impl Into<String>) -> Self {
        let mut partials = Vec::with_capacity(grid.m() + 1);
        partials.push(0.0);
        let mut acc = CompensatedSum::default();
        for s in summands {
            acc.add(s);
            partials.push(acc.value());
        }
        debug_assert_eq!(partials.len(), grid.m() + 1);
        Self { grid, partials, label: label.into() }
    }

    /// Wraps precomputed partial sums.
    pub fn from_partials(grid: Grid, partials: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if partials.len() != grid.m() + 1 || partials.first() != Some(&0.0) {
            return Err(Error::domain("partials must have m + 1 entries starting at 0"));
        }
        Ok(Self { grid, partials, label: label.into() })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn partials(&self) -> &[f64] {
        &self.partials
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Value at time `t` by the step rule.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.partials[self.grid.index_of(t)?])
    }

    pub fn terminal(&self) -> f64 {
        *self.partials.last().expect("nonempty")
    }

    /// `partials[d] - partials[c]`.
    pub fn window(&self, c: usize, d: usize) -> f64 {
        self.partials[d] - self.partials[c]
    }

    pub fn summands(&self) -> impl Iterator<Item = f64> + '_ {
        self.partials.windows(2).map(|w| w[1] - w[0])
    }

    /// `sup_{0 <= t <= T} |X(t) - slope * t|`, accounting for the flat
    /// stretch of each step before the next jump.
    pub fn sup_deviation_from_line(&self, slope: f64) -> f64 {
        let m = self.grid.m();
        let mut sup = 0.0f64;
        for (j, v) in self.partials.iter().enumerate() {
            sup = sup.max((v - slope * self.grid.time(j)).abs());
            if j < m {
                sup = sup.max((v - slope * self.grid.time(j + 1)).abs());
            }
        }
        sup
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "j,t_j,value")?;
        for (j, v) in self.partials.iter().enumerate() {
            writeln!(out, "{j},{},{v}", self.grid.time(j))?;
        }
        Ok(())
    }
}

#[inline]
fn int_power(x: f64, p: i32) -> f64 {
    x.abs().powi(p)
}

/// `sum_{k <= j} |dX_k|^p`, times `sgn(dX_k)` when `signed`.
pub fn power_variation(path: &Path, p: f64, signed: bool) -> Result<StepProcess> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::domain(format!("power must be positive, got {p}")));
    }
    let integral = p.fract() == 0.0 && p <= 64.0;
    let term = move |d: f64| {
        let mag = if integral { int_power(d, p as i32) } else { d.abs().powf(p) };
        if signed {
            if d < 0.0 {
                -mag
            } else {
                mag
            }
        } else {
            mag
        }
    };
    let label = if signed { format!("V_n^{{{p}+-}}") } else { format!("V_n^{p}") };
    Ok(StepProcess::from_summands(*path.grid(), path.increments().map(term), label))
}

/// `V_n(X, t) = sum dX_k^3`.
pub fn signed_cubic(path: &Path) -> StepProcess {
    let mut v = power_variation(path, 3.0, true).expect("p = 3 is valid");
    v.label = "V_n".into();
    v
}

/// `V_n^6(X, t)`.
pub fn sextic(path: &Path) -> StepProcess {
    power_variation(path, 6.0, false).expect("p = 6 is valid")
}

/// `beta_j = (X(t_{j-1}) + X(t_j)) / 2` for `j = 1..=m`.
pub fn midpoints(path: &Path) -> Vec<f64> {
    path.values().windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Symmetric Riemann sum `I_n(g, X, t) = sum (g(X_{k-1}) + g(X_k))/2 dX_k`.
pub fn riemann_strat(g: &SmoothMap, path: &Path) -> StepProcess {
    let v = path.values();
    let mut g_prev = g.eval(v[0]);
    let summands = v.windows(2).map(|w| {
        let g_next = g.eval(w[1]);
        let s = 0.5 * (g_prev + g_next) * (w[1] - w[0]);
        g_prev = g_next;
        s
    });
    StepProcess::from_summands(*path.grid(), summands, format!("I_n({g})"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Endpoint {
    Left,
    Right,
    Average,
}

/// `n^(-1/2) sum w_k h_3(n^(1/6) dX_k)` with the weight `w_k` taken as
/// `g` at the left end, right end, or the average of the two.
pub fn weighted_hermite(g: &SmoothMap, path: &Path, endpoint: Endpoint) -> StepProcess {
    let n = path.grid().n() as f64;
    let scale = n.powf(1.0 / 6.0);
    let norm = n.sqrt().recip();
    let v = path.values();
    let mut g_prev = g.eval(v[0]);
    let summands = v.windows(2).map(|w| {
        let g_next = g.eval(w[1]);
        let weight = match endpoint {
            Endpoint::Left => g_prev,
            Endpoint::Right => g_next,
            Endpoint::Average => 0.5 * (g_prev + g_next),
        };
        g_prev = g_next;
        norm * weight * h3(scale * (w[1] - w[0]))
    });
    let tag = match endpoint {
        Endpoint::Left => "-",
        Endpoint::Right => "+",
        Endpoint::Average => "avg",
    };
    StepProcess::from_summands(*path.grid(), summands, format!("G_n^{tag}({g})"))
}

/// `sum g(beta_k) dX_k^p` for integer `p`.
pub fn midpoint_weighted_power(g: &SmoothMap, path: &Path, p: i32) -> StepProcess {
    let summands = path.values().windows(2).map(|w| {
        let beta = 0.5 * (w[0] + w[1]);
        g.eval(beta) * (w[1] - w[0]).powi(p)
    });
    StepProcess::from_summands(*path.grid(), summands, format!("sum {g}(beta) dX^{p}"))
}
