//! Monte Carlo summaries.

use alloc::vec::Vec;

use crate::math::sqrt;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { mean: value, stderr: 0.0, n_samples: 0 }
    }

    /// Lower and upper ends of `mean ± z·stderr`.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        (self.mean - z * self.stderr, self.mean + z * self.stderr)
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

/// Mean with a batch-means standard error. Falls back to the naive standard
/// error when there are fewer samples than batches.
pub fn batch_means(xs: &[f64], n_batches: usize) -> Estimate {
    let n = xs.len();
    let m = mean(xs);
    let b = n_batches.max(2);
    let stderr = if n < 2 * b {
        sqrt(variance(xs) / n.max(1) as f64)
    } else {
        let size = n / b;
        let means: Vec<f64> = (0..b).map(|k| mean(&xs[k * size..(k + 1) * size])).collect();
        sqrt(variance(&means) / b as f64)
    };
    Estimate { mean: m, stderr, n_samples: n }
}

/// Combines independent estimates of the same quantity by inverse variance.
pub fn pool(estimates: &[Estimate]) -> Estimate {
    let n: usize = estimates.iter().map(|e| e.n_samples).sum();
    if estimates.iter().any(|e| e.stderr == 0.0) {
        let m = mean(&estimates.iter().map(|e| e.mean).collect::<Vec<_>>());
        let k = estimates.len().max(1) as f64;
        let se = sqrt(estimates.iter().map(|e| e.stderr * e.stderr).sum::<f64>()) / k;
        return Estimate { mean: m, stderr: se, n_samples: n };
    }
    let w: Vec<f64> = estimates.iter().map(|e| 1.0 / (e.stderr * e.stderr)).collect();
    let ws: f64 = w.iter().sum();
    let m = estimates.iter().zip(&w).map(|(e, w)| e.mean * w).sum::<f64>() / ws;
    Estimate { mean: m, stderr: sqrt(1.0 / ws), n_samples: n }
}

/// Total variation distance between two probability vectors.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    0.5 * a.iter().zip(b).map(|(x, y)| crate::math::abs(x - y)).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batch_means_of_constant() {
        let e = batch_means(&[1.0; 100], 10);
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn tv_of_disjoint() {
        assert_eq!(total_variation(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
    }

    #[test]
    fn pooled_mean_weights_precise_estimates() {
        let a = Estimate { mean: 1.0, stderr: 0.1, n_samples: 10 };
        let b = Estimate { mean: 2.0, stderr: 1.0, n_samples: 10 };
        let p = pool(&[a, b]);
        assert!(p.mean < 1.05 && p.stderr < 0.1);
    }
}
