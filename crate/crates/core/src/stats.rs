//! Small statistics helpers shared by the Monte Carlo reports.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n: usize,
}

/// Sample mean and its standard error. Sums in slice order.
pub fn mean_and_se(values: &[f64]) -> MeanEstimate {
    let n = values.len();
    if n == 0 {
        return MeanEstimate {
            mean: f64::NAN,
            std_err: f64::NAN,
            n,
        };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let std_err = if n > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    MeanEstimate { mean, std_err, n }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Smallest observed cell mass in either sample.
    pub min_cell: f64,
}

/// Two-sample chi-square test of homogeneity over the union of categories.
///
/// Inputs are (possibly weighted) cell masses. Categories missing from one
/// side count as zero.
pub fn chi_square_homogeneity<K: Ord + Clone>(
    a: &BTreeMap<K, f64>,
    b: &BTreeMap<K, f64>,
) -> ChiSquare {
    let mut keys: Vec<&K> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    let na: f64 = a.values().sum();
    let nb: f64 = b.values().sum();
    let total = na + nb;
    let mut statistic = 0.0;
    let mut min_cell = f64::INFINITY;
    for k in &keys {
        let oa = a.get(*k).copied().unwrap_or(0.0);
        let ob = b.get(*k).copied().unwrap_or(0.0);
        min_cell = min_cell.min(oa).min(ob);
        let col = oa + ob;
        let ea = na * col / total;
        let eb = nb * col / total;
        if ea > 0.0 {
            statistic += (oa - ea).powi(2) / ea;
        }
        if eb > 0.0 {
            statistic += (ob - eb).powi(2) / eb;
        }
    }
    let dof = keys.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        1.0 - dist.cdf(statistic)
    };
    ChiSquare {
        statistic,
        dof,
        p_value,
        min_cell: if keys.is_empty() { 0.0 } else { min_cell },
    }
}

/// Total-variation distance between two normalized empirical distributions.
pub fn total_variation<K: Ord>(a: &BTreeMap<K, f64>, b: &BTreeMap<K, f64>) -> f64 {
    let na: f64 = a.values().sum();
    let nb: f64 = b.values().sum();
    let mut tv = 0.0;
    for (k, &va) in a {
        let vb = b.get(k).copied().unwrap_or(0.0);
        tv += (va / na - vb / nb).abs();
    }
    for (k, &vb) in b {
        if !a.contains_key(k) {
            tv += vb / nb;
        }
    }
    tv / 2.0
}
