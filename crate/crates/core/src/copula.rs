//! Gaussian copula evaluated on the diagonal `(u, …, u)`.
//!
//! For exchangeable use in the max-over-ports construction the copula CDF
//! `C(u,…,u; R) = Φ_R(z,…,z)` with `z = Φ⁻¹(u)` is the CDF of the largest
//! port gain expressed on the probability scale.

use crate::error::{Error, Result};
use crate::geometry::CorrelationMatrix;
use crate::numerics::{std_normal_cdf, std_normal_quantile, MvnAccuracy, MvnEstimate};

/// Beyond this `|z|` the diagonal CDF is returned as 0 or 1 with a bound.
pub const Z_SHORT_CIRCUIT: f64 = 8.0;

#[derive(Debug, Clone, Copy)]
pub struct DiagonalCopulaQuery<'a> {
    pub u: f64,
    pub corr: &'a CorrelationMatrix,
    pub acc: MvnAccuracy,
}

impl<'a> DiagonalCopulaQuery<'a> {
    pub fn new(u: f64, corr: &'a CorrelationMatrix, acc: MvnAccuracy) -> Self {
        DiagonalCopulaQuery { u, corr, acc }
    }
}

/// `C(u,…,u; R)`. Exact at `u ∈ {0, 1}` and for a single port.
pub fn copula_diag_cdf(q: &DiagonalCopulaQuery<'_>) -> Result<MvnEstimate> {
    let u = q.u;
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::domain("copula_diag_cdf", format!("u must lie in [0, 1], got {u}")));
    }
    if u == 0.0 {
        return Ok(MvnEstimate::exact(0.0));
    }
    if u == 1.0 {
        return Ok(MvnEstimate::exact(1.0));
    }
    if q.corr.dim() == 1 {
        return Ok(MvnEstimate::exact(u));
    }
    let z = std_normal_quantile(u)?;
    copula_diag_cdf_at_z(z, q.corr, &q.acc)
}

/// `Φ_R(z,…,z)` for a scalar normal score `z`.
///
/// Callers that can form `z` without cancellation (for example from a tail
/// probability) should use this entry point directly.
pub fn copula_diag_cdf_at_z(
    z: f64,
    corr: &CorrelationMatrix,
    acc: &MvnAccuracy,
) -> Result<MvnEstimate> {
    diag_cdf_at_z(z, corr, acc, None)
}

/// As [`copula_diag_cdf_at_z`] on a fixed `points`-point lattice, so that
/// the result is smooth in `z` for a given seed.
pub fn copula_diag_cdf_at_z_fixed(
    z: f64,
    corr: &CorrelationMatrix,
    acc: &MvnAccuracy,
    points: usize,
) -> Result<MvnEstimate> {
    diag_cdf_at_z(z, corr, acc, Some(points))
}

fn diag_cdf_at_z(
    z: f64,
    corr: &CorrelationMatrix,
    acc: &MvnAccuracy,
    points: Option<usize>,
) -> Result<MvnEstimate> {
    if z.is_nan() {
        return Err(Error::domain("copula_diag_cdf", "normal score is NaN"));
    }
    let n = corr.dim();
    if z == f64::NEG_INFINITY {
        return Ok(MvnEstimate::exact(0.0));
    }
    if z == f64::INFINITY {
        return Ok(MvnEstimate::exact(1.0));
    }
    if n == 1 {
        return Ok(MvnEstimate::exact(std_normal_cdf(z)));
    }
    if z < -Z_SHORT_CIRCUIT {
        // 0 ≤ C ≤ u
        return Ok(MvnEstimate {
            value: 0.0,
            error: std_normal_cdf(z),
            evals: 0,
            lattice_points: 0,
            converged: true,
        });
    }
    if z > Z_SHORT_CIRCUIT {
        // 1 − N(1−u) ≤ C ≤ 1
        return Ok(MvnEstimate {
            value: 1.0,
            error: n as f64 * std_normal_cdf(-z),
            evals: 0,
            lattice_points: 0,
            converged: true,
        });
    }
    let upper = vec![z; n];
    let est = match points {
        None => corr.integrator().cdf(&upper, acc)?,
        Some(p) => corr.integrator().cdf_fixed(&upper, p, acc)?,
    };
    if !est.converged && points.is_none() {
        log::warn!(
            "copula_diag_cdf: MVN accuracy target missed at z={z} (value {:e} ± {:e}); Fréchet bounds [{:e}, {:e}]",
            est.value,
            est.error,
            (n as f64 * std_normal_cdf(z) - (n as f64 - 1.0)).max(0.0),
            std_normal_cdf(z)
        );
    }
    Ok(est)
}

/// `ln c(u,…,u; R) = −½ z² (1ᵀR⁻¹1 − N) − ½ ln det R` at a normal score.
pub fn ln_copula_diag_density_at_z(z: f64, corr: &CorrelationMatrix) -> f64 {
    let n = corr.dim() as f64;
    -0.5 * z * z * (corr.ones_quadratic() - n) - 0.5 * corr.log_det()
}

/// Gaussian copula density on the diagonal; equals 1 when `R = I`.
pub fn copula_diag_density(q: &DiagonalCopulaQuery<'_>) -> Result<f64> {
    let u = q.u;
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::domain("copula_diag_density", format!("u must lie in (0, 1), got {u}")));
    }
    if q.corr.dim() == 1 {
        return Ok(1.0);
    }
    let z = std_normal_quantile(u)?;
    Ok(ln_copula_diag_density_at_z(z, q.corr).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn corr2(rho: f64) -> CorrelationMatrix {
        CorrelationMatrix::from_matrix(DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]), 0.0)
            .unwrap()
    }

    #[test]
    fn independence_cdf() {
        let r = CorrelationMatrix::identity(4).unwrap();
        let est = copula_diag_cdf(&DiagonalCopulaQuery::new(0.5, &r, MvnAccuracy::default())).unwrap();
        assert!((est.value - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn boundaries_are_exact() {
        let r = corr2(0.7);
        let acc = MvnAccuracy::default();
        assert_eq!(copula_diag_cdf(&DiagonalCopulaQuery::new(0.0, &r, acc)).unwrap().value, 0.0);
        assert_eq!(copula_diag_cdf(&DiagonalCopulaQuery::new(1.0, &r, acc)).unwrap().value, 1.0);
        assert!(copula_diag_cdf(&DiagonalCopulaQuery::new(1.5, &r, acc)).is_err());
        let single = CorrelationMatrix::identity(1).unwrap();
        assert_eq!(copula_diag_cdf(&DiagonalCopulaQuery::new(0.3, &single, acc)).unwrap().value, 0.3);
    }

    #[test]
    fn bivariate_orthant() {
        let r = corr2(0.5);
        let est = copula_diag_cdf(&DiagonalCopulaQuery::new(0.5, &r, MvnAccuracy::default())).unwrap();
        assert!((est.value - 1.0 / 3.0).abs() < 1e-4, "{est:?}");
    }

    #[test]
    fn short_circuit_bounds() {
        let r = corr2(0.3);
        let acc = MvnAccuracy::default();
        let lo = copula_diag_cdf_at_z(-9.0, &r, &acc).unwrap();
        assert_eq!(lo.value, 0.0);
        assert!(lo.error > 0.0 && lo.error < 1e-18);
        let hi = copula_diag_cdf_at_z(9.0, &r, &acc).unwrap();
        assert_eq!(hi.value, 1.0);
        assert!(hi.error < 1e-18);
    }

    #[test]
    fn density_values() {
        let acc = MvnAccuracy::default();
        let id = CorrelationMatrix::identity(3).unwrap();
        for u in [0.01, 0.5, 0.99] {
            let c = copula_diag_density(&DiagonalCopulaQuery::new(u, &id, acc)).unwrap();
            assert!((c - 1.0).abs() < 1e-14);
        }
        let r = corr2(0.5);
        let c = copula_diag_density(&DiagonalCopulaQuery::new(0.5, &r, acc)).unwrap();
        assert!((c - 1.0 / 0.75f64.sqrt()).abs() < 1e-12);
        assert!(copula_diag_density(&DiagonalCopulaQuery::new(0.0, &r, acc)).is_err());
        assert!(copula_diag_density(&DiagonalCopulaQuery::new(1.0, &r, acc)).is_err());
    }
}
