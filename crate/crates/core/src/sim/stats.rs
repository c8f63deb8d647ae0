use serde::{Deserialize, Serialize};

/// A point estimate with its standard error and the number of batches (or
/// replications) behind the error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub se: f64,
    pub n: u32,
}

impl Stat {
    pub fn exact(mean: f64) -> Self {
        Stat { mean, se: 0.0, n: 0 }
    }

    /// `(x - mean) / se`; zero when both agree exactly and the error is zero.
    pub fn z_score(&self, expected: f64) -> f64 {
        let d = self.mean - expected;
        if d == 0.0 {
            0.0
        } else {
            d / self.se
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Stat {
            mean: self.mean * factor,
            se: self.se * factor.abs(),
            n: self.n,
        }
    }

    /// Mean and standard error of independent samples.
    pub fn from_samples(values: &[f64]) -> Self {
        let k = values.len();
        if k == 0 {
            return Stat::exact(0.0);
        }
        let mean = values.iter().sum::<f64>() / k as f64;
        Stat {
            mean,
            se: standard_error(values, mean),
            n: k as u32,
        }
    }
}

fn standard_error(values: &[f64], mean: f64) -> f64 {
    let k = values.len();
    if k < 2 {
        return 0.0;
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (var / k as f64).sqrt()
}

/// Batch-means estimate of a ratio `sum(num) / sum(den)`.
///
/// The point estimate pools all batches; the standard error comes from the
/// spread of the per-batch ratios, skipping batches with a zero denominator.
pub(crate) fn ratio_stat(num: &[f64], den: &[f64]) -> Stat {
    let total_den: f64 = den.iter().sum();
    let mean = if total_den > 0.0 {
        num.iter().sum::<f64>() / total_den
    } else {
        0.0
    };
    let per_batch: Vec<f64> = num
        .iter()
        .zip(den)
        .filter(|(_, d)| **d > 0.0)
        .map(|(n, d)| n / d)
        .collect();
    Stat {
        mean,
        se: standard_error(&per_batch, per_batch.iter().sum::<f64>() / per_batch.len().max(1) as f64),
        n: per_batch.len() as u32,
    }
}

/// Empirical quantile by the nearest-rank rule; `values` must be sorted.
pub(crate) fn sorted_quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let rank = (q * values.len() as f64).ceil() as usize;
    values[rank.clamp(1, values.len()) - 1]
}
