//! Empirical distributions and the agreement statistics used against them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::secrecy::NodeKind;

/// Sorted sample set; its CDF is the right-continuous step function.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
    kind: Option<NodeKind>,
}

impl EmpiricalDistribution {
    pub fn from_samples(mut samples: Vec<f64>, kind: Option<NodeKind>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::param("samples", "must be non-empty"));
        }
        if samples.iter().any(|s| s.is_nan()) {
            return Err(Error::param("samples", "contain NaN"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution { samples, kind })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn kind(&self) -> Option<NodeKind> {
        self.kind
    }

    /// `#{xᵢ ≤ x} / n`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s <= x) as f64 / self.len() as f64
    }

    /// `#{xᵢ < x} / n`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s < x) as f64 / self.len() as f64
    }

    /// Smallest sample `x` with `F_n(x) ≥ p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.len();
        let k = (p.clamp(0.0, 1.0) * n as f64).ceil() as usize;
        self.samples[k.clamp(1, n) - 1]
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.len() as f64
    }

    /// Exact KS distance to a continuous CDF, evaluating `f` at every sample.
    pub fn ks_exact<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let n = self.len() as f64;
        self.samples
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let v = f(x);
                ((i + 1) as f64 / n - v).max(v - i as f64 / n)
            })
            .fold(0.0, f64::max)
    }

    /// Upper bound on the KS distance to a monotone CDF `f` from `f`
    /// evaluated at `grid_points + 1` empirical quantiles.
    ///
    /// Between consecutive grid nodes both CDFs are monotone, so the gap is
    /// bounded by the cross differences at the nodes. The bound exceeds the
    /// true distance by at most the empirical mass between nodes.
    pub fn ks_bound<F: FnMut(f64) -> Result<f64>>(&self, grid_points: usize, mut f: F) -> Result<f64> {
        if grid_points == 0 {
            return Err(Error::param("grid_points", "must be >= 1"));
        }
        let mut grid: Vec<f64> = (0..=grid_points)
            .map(|k| self.quantile(k as f64 / grid_points as f64))
            .collect();
        grid.dedup();
        let values = grid.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        let mut d = values[0].max(1.0 - values[values.len() - 1]);
        for k in 0..grid.len() {
            let fk = values[k];
            d = d.max((self.cdf(grid[k]) - fk).abs()).max((fk - self.cdf_left(grid[k])).abs());
            if k + 1 < grid.len() {
                d = d
                    .max(self.cdf_left(grid[k + 1]) - fk)
                    .max(values[k + 1] - self.cdf(grid[k]));
            }
        }
        Ok(d)
    }

    /// Two-sample KS distance.
    pub fn ks_two_sample(&self, other: &EmpiricalDistribution) -> f64 {
        let (a, b) = (&self.samples, &other.samples);
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let (mut i, mut j) = (0, 0);
        let mut d: f64 = 0.0;
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            d = d.max((i as f64 / na - j as f64 / nb).abs());
        }
        d
    }

    /// Percentile bootstrap interval for the mean.
    pub fn bootstrap_mean_ci(&self, resamples: usize, level: f64, seed: u64) -> Result<(f64, f64)> {
        if resamples < 10 {
            return Err(Error::param("resamples", "must be >= 10"));
        }
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::param("level", "must lie in (0, 1)"));
        }
        let n = self.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut means: Vec<f64> = (0..resamples)
            .map(|_| (0..n).map(|_| self.samples[rng.random_range(0..n)]).sum::<f64>() / n as f64)
            .collect();
        means.sort_by(f64::total_cmp);
        let boot = EmpiricalDistribution {
            samples: means,
            kind: None,
        };
        let alpha = 0.5 * (1.0 - level);
        Ok((boot.quantile(alpha), boot.quantile(1.0 - alpha)))
    }
}

/// Wilson score interval for a binomial proportion at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution::from_samples(v.to_vec(), None).unwrap()
    }

    #[test]
    fn step_cdf_and_quantiles() {
        let d = dist(&[3.0, 1.0, 2.0, 2.0]);
        assert_eq!(d.samples(), &[1.0, 2.0, 2.0, 3.0]);
        assert_eq!(d.cdf(0.5), 0.0);
        assert_eq!(d.cdf(2.0), 0.75);
        assert_eq!(d.cdf_left(2.0), 0.25);
        assert_eq!(d.cdf(3.0), 1.0);
        assert_eq!(d.quantile(0.0), 1.0);
        assert_eq!(d.quantile(0.5), 2.0);
        assert_eq!(d.quantile(1.0), 3.0);
        assert_eq!(d.mean(), 2.0);
        assert!(EmpiricalDistribution::from_samples(vec![], None).is_err());
        assert!(EmpiricalDistribution::from_samples(vec![f64::NAN], None).is_err());
    }

    #[test]
    fn ks_statistics() {
        let d = dist(&[0.1, 0.4, 0.6, 0.9]);
        let uniform = |x: f64| x.clamp(0.0, 1.0);
        let exact = d.ks_exact(uniform);
        assert!((exact - 0.15).abs() < 1e-12);
        let bound = d.ks_bound(4, |x| Ok(uniform(x))).unwrap();
        assert!(bound >= exact - 1e-15);
        assert_eq!(d.ks_two_sample(&d), 0.0);
        assert_eq!(d.ks_two_sample(&dist(&[5.0, 6.0])), 1.0);
    }

    #[test]
    fn wilson_values() {
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4);
        let (lo0, hi0) = wilson_interval(0, 100, 1.96);
        assert_eq!(lo0, 0.0);
        assert!(hi0 > 0.0 && hi0 < 0.04);
    }
}
