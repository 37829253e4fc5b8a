//! Exact Gaussian covariance audits on a grid, and a quadrature check of the
//! Hermite orthogonality relation.

use serde::{Deserialize, Serialize};

use super::quadrature::NormalRule;
use crate::error::{Error, Result};
use crate::kernel::{hermite_unchecked, rho};
use crate::sampler::Grid;

pub const AUDIT_MAX_STEPS: usize = 4096;

/// Ratios of an exact left-hand side to its envelope over the audited
/// index pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditItem {
    pub item: String,
    pub description: String,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub pairs: usize,
}

impl AuditItem {
    fn new(item: &str, description: &str) -> Self {
        Self {
            item: item.into(),
            description: description.into(),
            max_ratio: 0.0,
            min_ratio: f64::INFINITY,
            pairs: 0,
        }
    }

    fn push(&mut self, ratio: f64) {
        self.max_ratio = self.max_ratio.max(ratio);
        self.min_ratio = self.min_ratio.min(ratio);
        self.pairs += 1;
    }

    pub fn is_finite(&self) -> bool {
        self.max_ratio.is_finite() && self.min_ratio.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarAudit {
    pub n: u64,
    pub horizon: f64,
    pub items: Vec<AuditItem>,
    /// `max E|beta_j - beta_i|^2 / |t_j - t_i|^(1/3)` and the maximum of its
    /// reciprocal, i.e. fitted two-sided constants for item (v).
    pub beta_upper_constant: f64,
    pub beta_lower_reciprocal: f64,
}

impl CovarAudit {
    pub fn item(&self, name: &str) -> Option<&AuditItem> {
        self.items.iter().find(|i| i.item == name)
    }
}

#[inline]
fn plus(r: usize) -> f64 {
    r.max(1) as f64
}

/// Evaluates the five covariance estimates on the grid `t_j = j/n`,
/// `j <= nT`, from the exact covariance.
pub fn covar_bound_audit(n: u64, horizon: f64) -> Result<CovarAudit> {
    let grid = Grid::new(n, horizon)?;
    let m = grid.m();
    if m > AUDIT_MAX_STEPS {
        return Err(Error::capability(format!(
            "covariance audit limited to {AUDIT_MAX_STEPS} steps, requested {m}"
        )));
    }
    let scale = (n as f64).cbrt().recip();
    // t_k^(1/3) = k^(1/3) n^(-1/3); R(t_i, t_j) = (c_i + c_j - c_|i-j|) / 2
    let c: Vec<f64> = (0..=m).map(|k| scale * (k as f64).cbrt()).collect();
    // E[B(t_i) dB_j]
    let b_inc = |i: usize, j: usize| 0.5 * (c[j] - c[j - 1] - c[i.abs_diff(j)] + c[i.abs_diff(j - 1)]);

    let mut i1 = AuditItem::new("i", "|E[dB_i dB_j]| / (dt^(1/3) |j-i|_+^(-5/3))");
    for lag in 0..m {
        let cov = scale * rho(lag as i64);
        i1.push(cov.abs() / (scale * plus(lag).powf(-5.0 / 3.0)));
    }

    let mut i2 = AuditItem::new("ii", "|E[B(t_i) dB_j]| / (dt^(1/3) (j^(-2/3) + |j-i|_+^(-2/3)))");
    let mut i3 = AuditItem::new("iii", "|E[beta_i dB_j]| / (dt^(1/3) (j^(-2/3) + |j-i|_+^(-2/3)))");
    for j in 1..=m {
        let jf = (j as f64).powf(-2.0 / 3.0);
        let mut prev = b_inc(0, j);
        for i in 0..=m {
            let cur = if i == 0 { prev } else { b_inc(i, j) };
            let env = scale * (jf + plus(i.abs_diff(j)).powf(-2.0 / 3.0));
            i2.push(cur.abs() / env);
            if i >= 1 {
                i3.push((0.5 * (prev + cur)).abs() / env);
            }
            prev = cur;
        }
    }

    let mut i4 = AuditItem::new("iv", "|E[beta_j dB_j]| / (dt^(1/3) j^(-2/3))");
    for j in 1..=m {
        // 2 beta_j dB_j = B(t_j)^2 - B(t_{j-1})^2
        let v = 0.5 * (c[j] - c[j - 1]);
        i4.push(v.abs() / (scale * (j as f64).powf(-2.0 / 3.0)));
    }

    // By stationarity beta_j - beta_i depends only on d = j - i, and
    // E|beta_j - beta_i|^2 = (t_d^(1/3) + E[(B(t_{d+1}) - B(t_1))(B(t_d) - B(0))]) / 2.
    let r = |a: usize, b: usize| 0.5 * (c[a] + c[b] - c[a.abs_diff(b)]);
    let mut i5 = AuditItem::new("v", "E|beta_j - beta_i|^2 / |t_j - t_i|^(1/3)");
    for d in 1..m {
        let cov = r(d + 1, d) - r(1, d);
        let msq = 0.5 * (c[d] + cov);
        i5.push(msq / c[d]);
    }
    let beta_upper_constant = i5.max_ratio;
    let beta_lower_reciprocal = i5.min_ratio.recip();

    Ok(CovarAudit {
        n,
        horizon,
        items: vec![i1, i2, i3, i4, i5],
        beta_upper_constant,
        beta_lower_reciprocal,
    })
}

pub const ORTHOGONALITY_NODES: usize = 48;
pub const MAX_ORTHOGONALITY_ORDER: usize = 4;

/// `E[h_p(U) h_q(V)] - q! c^q [p = q]` for standard normals with correlation `c`.
pub fn orthogonality_audit(p: usize, q: usize, correlation: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&correlation) {
        return Err(Error::domain(format!("correlation {correlation} outside [-1, 1]")));
    }
    if p > MAX_ORTHOGONALITY_ORDER || q > MAX_ORTHOGONALITY_ORDER {
        return Err(Error::capability(format!(
            "orthogonality audit supports orders up to {MAX_ORTHOGONALITY_ORDER}"
        )));
    }
    let rule = NormalRule::new(ORTHOGONALITY_NODES);
    let value = rule.expect_pair(1.0, 1.0, correlation, |u, v| {
        hermite_unchecked(p, u) * hermite_unchecked(q, v)
    });
    let exact = if p == q {
        (1..=q).product::<usize>() as f64 * correlation.powi(q as i32)
    } else {
        0.0
    };
    Ok(value - exact)
}
