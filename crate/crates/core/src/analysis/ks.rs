use serde::{Deserialize, Serialize};

use super::stats::SampleSet;
use crate::error::{Error, Result};

/// Asymptotic two-sample coefficient at alpha = 0.01.
pub const KS_COEFF_001: f64 = 1.628;

pub const MIN_KS_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical_001: f64,
    pub sample_sizes: (usize, usize),
}

impl KsResult {
    pub fn passes(&self) -> bool {
        self.statistic < self.critical_001
    }
}

/// `1.628 sqrt((m1 + m2) / (m1 m2))`.
pub fn ks_critical_001(m1: usize, m2: usize) -> f64 {
    let (a, b) = (m1 as f64, m2 as f64);
    KS_COEFF_001 * ((a + b) / (a * b)).sqrt()
}

/// Exact sup distance between the two empirical CDFs, by a merge over the
/// sorted samples. Ties across samples are consumed together.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(|p, q| p.total_cmp(q));
    y.sort_by(|p, q| p.total_cmp(q));
    let (na, nb) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup = 0.0f64;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    // once one sample is exhausted the remaining gap only shrinks
    sup.max((i as f64 / na - j as f64 / nb).abs())
}

/// Two-sample Kolmogorov-Smirnov test at the asymptotic 1% level.
pub fn ks_two_sample(a: &SampleSet, b: &SampleSet) -> Result<KsResult> {
    if a.len() < MIN_KS_SAMPLES || b.len() < MIN_KS_SAMPLES {
        return Err(Error::domain(format!(
            "KS needs at least {MIN_KS_SAMPLES} samples per side, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(KsResult {
        statistic: ks_statistic(a.values(), b.values()),
        critical_001: ks_critical_001(a.len(), b.len()),
        sample_sizes: (a.len(), b.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute force: evaluate both ECDFs at every observed point.
    fn brute_force(a: &[f64], b: &[f64]) -> f64 {
        let ecdf = |s: &[f64], t: f64| s.iter().filter(|&&v| v <= t).count() as f64 / s.len() as f64;
        a.iter()
            .chain(b)
            .map(|&t| (ecdf(a, t) - ecdf(b, t)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn examples() {
        let a = [0.3, -1.0, 2.0];
        assert_eq!(ks_statistic(&a, &a), 0.0);
        assert_eq!(ks_statistic(&[0.0, 1.0], &[10.0, 11.0]), 1.0);
        let d = ks_statistic(&[1.0, 2.0, 3.0], &[1.5, 2.5]);
        assert!((d - 1.0 / 3.0).abs() < 1e-15);
        assert!((brute_force(&[1.0, 2.0, 3.0], &[1.5, 2.5]) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn critical_value() {
        assert!((ks_critical_001(2000, 2000) - 0.051_482).abs() < 1e-5);
    }

    #[test]
    fn size_precondition() {
        let small = SampleSet::new(vec![0.0; 49], "s").unwrap();
        let big = SampleSet::new((0..60).map(f64::from).collect(), "b").unwrap();
        assert!(ks_two_sample(&small, &big).is_err());
        let r = ks_two_sample(&big, &big).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.passes());
        assert_eq!(r.sample_sizes, (60, 60));
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            a in proptest::collection::vec(-5i32..5, 1..40),
            b in proptest::collection::vec(-5i32..5, 1..40),
        ) {
            // small integer support forces plenty of ties
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            prop_assert!((ks_statistic(&a, &b) - brute_force(&a, &b)).abs() < 1e-12);
        }

        #[test]
        fn invariant_under_increasing_transform(
            a in proptest::collection::vec(-3.0f64..3.0, 1..50),
            b in proptest::collection::vec(-3.0f64..3.0, 1..50),
        ) {
            let f = |x: f64| x.exp() * 2.0 + x.powi(3);
            let fa: Vec<f64> = a.iter().map(|&x| f(x)).collect();
            let fb: Vec<f64> = b.iter().map(|&x| f(x)).collect();
            prop_assert_eq!(ks_statistic(&a, &b), ks_statistic(&fa, &fb));
        }
    }
}
