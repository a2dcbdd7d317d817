//! Multivariate normal orthant-type CDF `P(Z ≤ b)`, `Z ~ N(0, R)`.
//!
//! Genz's separation-of-variables transform turns the probability into an
//! integral over the unit cube of a product of univariate normal CDFs. The
//! cube integral is evaluated by randomly shifted rank-1 (Richtmyer) lattice
//! rules with the tent periodization and antithetic pairs; the spread of the
//! independent shifts gives the error estimate. Lattice sizes double until
//! the estimate meets both the absolute and the relative target or the
//! evaluation budget runs out.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::special::{ppnd16, std_normal_cdf};
use crate::error::{Error, Result};

const SHIFTS: usize = 8;
const BASE_POINTS: usize = 32;
const ERROR_MULTIPLIER: f64 = 3.0;

const PRIMES: [u32; 64] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293,
    307, 311,
];

/// Accuracy controls for [`mvn_cdf`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MvnAccuracy {
    /// Target absolute error, in `(0, 0.1]`.
    pub abs_target: f64,
    /// Target error relative to the estimate; both targets must be met.
    pub rel_target: f64,
    /// Maximum number of integrand evaluations, at least 1000.
    pub max_evals: u64,
    pub seed: u64,
}

impl Default for MvnAccuracy {
    fn default() -> Self {
        MvnAccuracy {
            abs_target: 1e-6,
            rel_target: 1e-3,
            max_evals: 1_000_000,
            seed: 0x5EED_0F_C0FA,
        }
    }
}

impl MvnAccuracy {
    pub fn new(abs_target: f64, max_evals: u64, seed: u64) -> Result<Self> {
        let acc = MvnAccuracy {
            abs_target,
            max_evals,
            seed,
            ..Default::default()
        };
        acc.validate()?;
        Ok(acc)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_target > 0.0 && self.abs_target <= 0.1) {
            return Err(Error::param("mvn.abs_target", "must lie in (0, 0.1]"));
        }
        if !(self.rel_target > 0.0 && self.rel_target <= 1.0) {
            return Err(Error::param("mvn.rel_target", "must lie in (0, 1]"));
        }
        if self.max_evals < 1000 {
            return Err(Error::param("mvn.max_evals", "must be at least 1000"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvnEstimate {
    pub value: f64,
    /// Absolute error estimate (three standard errors across shifts).
    pub error: f64,
    pub evals: u64,
    /// Lattice size of the final round (0 when evaluated in closed form).
    pub lattice_points: usize,
    /// False when the budget ran out before the targets were met.
    pub converged: bool,
}

impl MvnEstimate {
    pub fn exact(value: f64) -> Self {
        MvnEstimate {
            value,
            error: 0.0,
            evals: 0,
            lattice_points: 0,
            converged: true,
        }
    }
}

/// Lower Cholesky factor of a correlation matrix, packed by rows.
#[derive(Debug, Clone)]
pub struct MvnIntegrator {
    dim: usize,
    rows: Vec<f64>,
}

impl MvnIntegrator {
    /// Validates `r` (square, symmetric, unit diagonal) and factors it.
    pub fn from_correlation(r: &DMatrix<f64>) -> Result<Self> {
        let n = r.nrows();
        if n == 0 || r.ncols() != n {
            return Err(Error::InvalidCorrelation(format!(
                "expected a non-empty square matrix, got {}x{}",
                r.nrows(),
                r.ncols()
            )));
        }
        for i in 0..n {
            if (r[(i, i)] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidCorrelation(format!("diagonal entry {i} is {}", r[(i, i)])));
            }
            for j in 0..i {
                if (r[(i, j)] - r[(j, i)]).abs() > 1e-12 {
                    return Err(Error::InvalidCorrelation(format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        let chol = r.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
        Ok(Self::from_lower(&chol.l()))
    }

    pub(crate) fn from_lower(l: &DMatrix<f64>) -> Self {
        let dim = l.nrows();
        let mut rows = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in 0..=i {
                rows.push(l[(i, j)]);
            }
        }
        MvnIntegrator { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.rows[start..start + i + 1]
    }

    /// Separation-of-variables integrand at cube point `w` (length `dim-1`).
    #[inline]
    fn integrand(&self, upper: &[f64], w: &[f64], y: &mut [f64]) -> f64 {
        let mut e = std_normal_cdf(upper[0] / self.rows[0]);
        let mut prod = e;
        for i in 1..self.dim {
            if prod == 0.0 {
                return 0.0;
            }
            let t = (w[i - 1] * e).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
            y[i - 1] = ppnd16(t);
            let row = self.row(i);
            let mut s = 0.0;
            for j in 0..i {
                s += row[j] * y[j];
            }
            e = std_normal_cdf((upper[i] - s) / row[i]);
            prod *= e;
        }
        prod
    }

    fn check_upper(&self, upper: &[f64]) -> Result<Option<MvnEstimate>> {
        if upper.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: upper.len(),
            });
        }
        if upper.iter().any(|b| b.is_nan()) {
            return Err(Error::domain("mvn_cdf", "upper limit is NaN"));
        }
        if upper.iter().any(|&b| b == f64::NEG_INFINITY) {
            return Ok(Some(MvnEstimate::exact(0.0)));
        }
        if self.dim == 1 {
            return Ok(Some(MvnEstimate::exact(std_normal_cdf(upper[0] / self.rows[0]))));
        }
        Ok(None)
    }

    /// Mean integrand value for each of the `SHIFTS` random shifts of a
    /// `points`-point lattice.
    fn lattice_round(&self, upper: &[f64], points: usize, rng: &mut ChaCha8Rng) -> [f64; SHIFTS] {
        let m = self.dim - 1;
        let generator: Vec<f64> = PRIMES[..m].iter().map(|&p| (p as f64).sqrt().fract()).collect();
        let mut y = vec![0.0; m];
        let mut w = vec![0.0; m];
        let mut w_anti = vec![0.0; m];
        let mut shift = vec![0.0; m];
        let mut shift_means = [0.0; SHIFTS];
        for mean in shift_means.iter_mut() {
            for s in shift.iter_mut() {
                *s = rng.random::<f64>();
            }
            let mut sum = 0.0;
            for k in 1..=points {
                let kf = k as f64;
                for j in 0..m {
                    let x = (kf * generator[j] + shift[j]).fract();
                    let t = (2.0 * x - 1.0).abs();
                    w[j] = t;
                    w_anti[j] = 1.0 - t;
                }
                sum += 0.5 * (self.integrand(upper, &w, &mut y) + self.integrand(upper, &w_anti, &mut y));
            }
            *mean = sum / points as f64;
        }
        shift_means
    }

    pub fn cdf(&self, upper: &[f64], acc: &MvnAccuracy) -> Result<MvnEstimate> {
        if let Some(est) = self.check_upper(upper)? {
            return Ok(est);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(acc.seed);
        let mut total_evals = 0u64;
        let mut value = 0.0;
        let mut variance = f64::INFINITY;
        let mut points = BASE_POINTS;
        let mut converged = false;

        loop {
            let shift_means = self.lattice_round(upper, points, &mut rng);
            total_evals += (2 * points * SHIFTS) as u64;
            let (round_mean, round_var) = mean_and_variance(&shift_means);

            if round_var == 0.0 || variance == 0.0 {
                if round_var == 0.0 {
                    value = round_mean;
                    variance = 0.0;
                }
            } else if variance.is_infinite() {
                value = round_mean;
                variance = round_var;
            } else {
                let combined = 1.0 / (1.0 / variance + 1.0 / round_var);
                value = combined * (value / variance + round_mean / round_var);
                variance = combined;
            }

            let error = self.error_from(value, variance);
            let rel_ok = error <= acc.rel_target * value.abs() || value.abs() < f64::MIN_POSITIVE;
            if error <= acc.abs_target && rel_ok {
                converged = true;
                break;
            }
            let next_cost = (4 * points * SHIFTS) as u64;
            if total_evals + next_cost > acc.max_evals {
                break;
            }
            points *= 2;
        }

        let error = self.error_from(value, variance);
        if !converged {
            log::debug!(
                "mvn_cdf: budget of {} evaluations exhausted (d={}, value={value:e}, error={error:e})",
                acc.max_evals,
                self.dim
            );
        }
        Ok(MvnEstimate {
            value: value.clamp(0.0, 1.0),
            error,
            evals: total_evals,
            lattice_points: points,
            converged,
        })
    }

    /// Single non-adaptive round on a `points`-point lattice.
    ///
    /// For a fixed `(points, seed)` the estimate is a smooth function of
    /// `upper`, which keeps differences between nearby limits free of the
    /// jumps an adaptive stopping rule would introduce. `converged` reports
    /// whether `acc` would have been met.
    pub fn cdf_fixed(&self, upper: &[f64], points: usize, acc: &MvnAccuracy) -> Result<MvnEstimate> {
        if points == 0 {
            return Err(Error::param("points", "must be >= 1"));
        }
        if let Some(est) = self.check_upper(upper)? {
            return Ok(est);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(acc.seed);
        let (value, variance) = mean_and_variance(&self.lattice_round(upper, points, &mut rng));
        let error = self.error_from(value, variance);
        Ok(MvnEstimate {
            value: value.clamp(0.0, 1.0),
            error,
            evals: (2 * points * SHIFTS) as u64,
            lattice_points: points,
            converged: error <= acc.abs_target && error <= acc.rel_target * value.abs(),
        })
    }

    fn error_from(&self, value: f64, variance: f64) -> f64 {
        // Product of `dim` rounded factors carries a few ulps per factor.
        let roundoff = 4.0 * f64::EPSILON * self.dim as f64 * value.abs();
        (ERROR_MULTIPLIER * variance.sqrt()).max(roundoff)
    }
}

fn mean_and_variance(shift_means: &[f64; SHIFTS]) -> (f64, f64) {
    let mean = shift_means.iter().sum::<f64>() / SHIFTS as f64;
    let var = shift_means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / ((SHIFTS - 1) * SHIFTS) as f64;
    (mean, var)
}

/// `P(Z ≤ upper)` for `Z ~ N(0, r)` with `r` a correlation matrix.
pub fn mvn_cdf(upper: &[f64], r: &DMatrix<f64>, acc: &MvnAccuracy) -> Result<MvnEstimate> {
    acc.validate()?;
    MvnIntegrator::from_correlation(r)?.cdf(upper, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn corr2(rho: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0])
    }

    #[test]
    fn univariate_median() {
        let r = DMatrix::identity(1, 1);
        let est = mvn_cdf(&[0.0], &r, &MvnAccuracy::default()).unwrap();
        assert_eq!(est.value, 0.5);
    }

    #[test]
    fn independent_orthant() {
        let est = mvn_cdf(&[0.0, 0.0], &DMatrix::identity(2, 2), &MvnAccuracy::default()).unwrap();
        assert!((est.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn bivariate_orthant() {
        let est = mvn_cdf(&[0.0, 0.0], &corr2(0.5), &MvnAccuracy::default()).unwrap();
        let expected = 0.25 + 0.5f64.asin() / (2.0 * PI);
        assert!((est.value - expected).abs() < 1e-4);
        assert!((est.value - 1.0 / 3.0).abs() < 1e-4);
        assert!(est.converged);
    }

    #[test]
    fn deterministic_for_seed() {
        let r = DMatrix::from_row_slice(3, 3, &[1.0, 0.3, 0.1, 0.3, 1.0, 0.6, 0.1, 0.6, 1.0]);
        let acc = MvnAccuracy::default();
        let a = mvn_cdf(&[0.1, -0.2, 0.5], &r, &acc).unwrap();
        let b = mvn_cdf(&[0.1, -0.2, 0.5], &r, &acc).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_inputs() {
        let acc = MvnAccuracy::default();
        assert!(matches!(
            mvn_cdf(&[0.0], &DMatrix::identity(2, 2), &acc),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(mvn_cdf(&[0.0, 0.0], &corr2(1.0), &acc).is_err());
        let bad = MvnAccuracy {
            abs_target: 0.5,
            ..acc
        };
        assert!(mvn_cdf(&[0.0, 0.0], &corr2(0.2), &bad).is_err());
        assert!(MvnAccuracy::new(1e-6, 10, 1).is_err());
    }

    #[test]
    fn infinite_limits() {
        let acc = MvnAccuracy::default();
        let r = corr2(0.4);
        assert_eq!(mvn_cdf(&[f64::NEG_INFINITY, 1.0], &r, &acc).unwrap().value, 0.0);
        let v = mvn_cdf(&[f64::INFINITY, 0.3], &r, &acc).unwrap().value;
        assert!((v - std_normal_cdf(0.3)).abs() < 1e-5);
    }
}
