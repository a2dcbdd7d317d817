//! Planar fluid-antenna port grid and its spatial correlation matrix.
//!
//! All lengths are in wavelengths. Ports are numbered `1..=N` in row-major
//! order: `n = (i1 − 1)·n2 + i2`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::MvnIntegrator;

/// Largest diagonal loading accepted before a grid is reported as
/// ill-conditioned.
pub const MAX_LOADING: f64 = 1e-3;

/// Default eigenvalue floor enforced by [`correlation_matrix`].
pub const DEFAULT_EIGEN_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortGrid {
    n1: usize,
    n2: usize,
    w1: f64,
    w2: f64,
}

impl PortGrid {
    pub fn new(n1: usize, n2: usize, w1: f64, w2: f64) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::param("grid", format!("port counts must be >= 1, got {n1}x{n2}")));
        }
        for (name, n, w) in [("w1", n1, w1), ("w2", n2, w2)] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::param(name, format!("must be finite and >= 0, got {w}")));
            }
            if n > 1 && w == 0.0 {
                return Err(Error::param(name, "must be > 0 when the axis has more than one port"));
            }
        }
        Ok(PortGrid { n1, n2, w1, w2 })
    }

    /// Square aperture of `area` λ² (`w1 = w2 = √area`).
    pub fn square(n1: usize, n2: usize, area: f64) -> Result<Self> {
        if !(area >= 0.0) {
            return Err(Error::param("area", format!("must be >= 0, got {area}")));
        }
        let side = area.sqrt();
        PortGrid::new(n1, n2, side, side)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn w1(&self) -> f64 {
        self.w1
    }

    pub fn w2(&self) -> f64 {
        self.w2
    }

    pub fn ports(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn area(&self) -> f64 {
        self.w1 * self.w2
    }

    /// 1-based port index → 1-based `(i1, i2)`.
    pub fn index_to_2d(&self, n: usize) -> Result<(usize, usize)> {
        if n == 0 || n > self.ports() {
            return Err(Error::domain(
                "port_index_to_2d",
                format!("port {n} outside 1..={}", self.ports()),
            ));
        }
        Ok(((n - 1) / self.n2 + 1, (n - 1) % self.n2 + 1))
    }

    pub fn index_from_2d(&self, i1: usize, i2: usize) -> Result<usize> {
        if i1 == 0 || i1 > self.n1 || i2 == 0 || i2 > self.n2 {
            return Err(Error::domain(
                "port_index_from_2d",
                format!("({i1}, {i2}) outside {}x{}", self.n1, self.n2),
            ));
        }
        Ok((i1 - 1) * self.n2 + i2)
    }

    fn axis_offset(count: usize, width: f64, steps: usize) -> f64 {
        // a single-port axis cannot move along that direction
        if count <= 1 {
            0.0
        } else {
            steps as f64 / (count - 1) as f64 * width
        }
    }

    /// Distance in wavelengths between ports `n` and `m`.
    pub fn distance(&self, n: usize, m: usize) -> Result<f64> {
        let (a1, a2) = self.index_to_2d(n)?;
        let (b1, b2) = self.index_to_2d(m)?;
        let d1 = Self::axis_offset(self.n1, self.w1, a1.abs_diff(b1));
        let d2 = Self::axis_offset(self.n2, self.w2, a2.abs_diff(b2));
        Ok(d1.hypot(d2))
    }
}

pub fn port_index_to_2d(grid: &PortGrid, n: usize) -> Result<(usize, usize)> {
    grid.index_to_2d(n)
}

/// `sin(πt)/(πt)` with `sinc(0) = 1`.
pub fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        let x = std::f64::consts::PI * t;
        x.sin() / x
    }
}

/// Jakes-model correlation between ports `n` and `m`: `sinc(2·d/λ)`.
pub fn spatial_correlation(grid: &PortGrid, n: usize, m: usize) -> Result<f64> {
    Ok(sinc(2.0 * grid.distance(n, m)?))
}

/// Symmetric unit-diagonal port correlation matrix, diagonally loaded when
/// needed so that its smallest eigenvalue stays above a floor.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    matrix: DMatrix<f64>,
    loading: f64,
    min_eigenvalue_raw: f64,
    integrator: MvnIntegrator,
    lower: DMatrix<f64>,
    log_det: f64,
    ones_quad: f64,
}

impl CorrelationMatrix {
    pub fn identity(dim: usize) -> Result<Self> {
        CorrelationMatrix::from_matrix(DMatrix::identity(dim, dim), DEFAULT_EIGEN_FLOOR)
    }

    /// Validates `m` (square, symmetric, unit diagonal, entries in `[-1, 1]`)
    /// and applies `R' = (R + δI)/(1 + δ)` with the smallest `δ` that lifts
    /// the minimum eigenvalue to `eps_floor`.
    pub fn from_matrix(m: DMatrix<f64>, eps_floor: f64) -> Result<Self> {
        let n = m.nrows();
        if n == 0 || m.ncols() != n {
            return Err(Error::InvalidCorrelation(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if !(eps_floor >= 0.0 && eps_floor < 1.0) {
            return Err(Error::param("eps_floor", format!("must lie in [0, 1), got {eps_floor}")));
        }
        let mut m = m;
        for i in 0..n {
            if (m[(i, i)] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidCorrelation(format!("diagonal entry {i} is {}", m[(i, i)])));
            }
            m[(i, i)] = 1.0;
            for j in 0..i {
                let (a, b) = (m[(i, j)], m[(j, i)]);
                if (a - b).abs() > 1e-12 || !a.is_finite() {
                    return Err(Error::InvalidCorrelation(format!("not symmetric at ({i}, {j})")));
                }
                if a.abs() > 1.0 + 1e-12 {
                    return Err(Error::InvalidCorrelation(format!("entry ({i}, {j}) = {a} outside [-1, 1]")));
                }
                let v = a.clamp(-1.0, 1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }

        let min_eig = if n == 1 {
            1.0
        } else {
            m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
        };
        let mut loading = 0.0;
        if min_eig < eps_floor {
            // small margin so the eigenvalue clears the floor after rounding
            let target = eps_floor * (1.0 + 1e-3) + 4.0 * f64::EPSILON * n as f64;
            loading = (target - min_eig) / (1.0 - target);
            let scale = 1.0 / (1.0 + loading);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = if i == j { 1.0 } else { m[(i, j)] * scale };
                }
            }
            if loading > MAX_LOADING {
                log::warn!(
                    "correlation matrix ill-conditioned: loading {loading:e} exceeds {MAX_LOADING:e}"
                );
            }
        }

        let chol = m.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
        let l = chol.l();
        let log_det = 2.0 * (0..n).map(|i| l[(i, i)].ln()).sum::<f64>();
        let ones = nalgebra::DVector::from_element(n, 1.0);
        let solved = l.solve_lower_triangular(&ones).ok_or(Error::NotPositiveDefinite)?;
        let ones_quad = solved.norm_squared();

        Ok(CorrelationMatrix {
            integrator: MvnIntegrator::from_lower(&l),
            lower: l,
            matrix: m,
            loading,
            min_eigenvalue_raw: min_eig,
            log_det,
            ones_quad,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    /// Diagonal loading `δ` that was applied (0 when none was needed).
    pub fn loading(&self) -> f64 {
        self.loading
    }

    /// Smallest eigenvalue before loading.
    pub fn min_eigenvalue_raw(&self) -> f64 {
        self.min_eigenvalue_raw
    }

    pub fn is_ill_conditioned(&self) -> bool {
        self.loading > MAX_LOADING
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// `1ᵀ R⁻¹ 1`.
    pub fn ones_quadratic(&self) -> f64 {
        self.ones_quad
    }

    /// Lower Cholesky factor `L` with `L Lᵀ = R`.
    pub fn lower(&self) -> &DMatrix<f64> {
        &self.lower
    }

    pub fn integrator(&self) -> &MvnIntegrator {
        &self.integrator
    }

    pub fn is_identity(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)] == 0.0))
    }
}

/// Assembles the pairwise [`spatial_correlation`] matrix of `grid`.
pub fn correlation_matrix(grid: &PortGrid, eps_floor: f64) -> Result<CorrelationMatrix> {
    let n = grid.ports();
    let mut m = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in 0..i {
            let rho = spatial_correlation(grid, i + 1, j + 1)?;
            m[(i, j)] = rho;
            m[(j, i)] = rho;
        }
    }
    CorrelationMatrix::from_matrix(m, eps_floor)
}
