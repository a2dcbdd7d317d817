//! Gauss–Laguerre quadrature for `∫₀^∞ e^{-x} f(x) dx`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const MAX_LAGUERRE_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `Σ ω_k f(ε_k)`, approximating `∫₀^∞ e^{-x} f(x) dx`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Evaluates `(L_n(x), L_{n-1}(x))` by the three-term recurrence.
fn laguerre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    if n == 0 {
        return (prev, 0.0);
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Builds the `order`-point Gauss–Laguerre rule.
///
/// Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix
/// (Golub–Welsch), then polished with a Newton step on `L_K`. Weights use
/// `ω = x / ((K+1)² L_{K+1}(x)²)`, which keeps the tiny weights of the far
/// nodes relatively accurate where eigenvector components would not be.
pub fn gauss_laguerre(order: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_LAGUERRE_ORDER).contains(&order) {
        return Err(Error::domain(
            "gauss_laguerre",
            format!("order must lie in 1..={MAX_LAGUERRE_ORDER}, got {order}"),
        ));
    }
    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for i in 0..order {
        jacobi[(i, i)] = 2.0 * i as f64 + 1.0;
        if i + 1 < order {
            let b = i as f64 + 1.0;
            jacobi[(i, i + 1)] = b;
            jacobi[(i + 1, i)] = b;
        }
    }
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(|a, b| a.total_cmp(b));

    let kf = order as f64;
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (ln, lnm1) = laguerre_pair(order, *x);
            // x L_n'(x) = n (L_n − L_{n−1})
            let deriv = kf * (ln - lnm1) / *x;
            if deriv == 0.0 || !deriv.is_finite() {
                break;
            }
            let step = ln / deriv;
            *x -= step;
            if step.abs() <= 1e-15 * x.abs() {
                break;
            }
        }
    }

    let weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let (next, _) = laguerre_pair(order + 1, x);
            x / ((kf + 1.0) * (kf + 1.0) * next * next)
        })
        .collect();

    Ok(QuadratureRule { nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule() {
        let rule = gauss_laguerre(2).unwrap();
        let s = std::f64::consts::SQRT_2;
        assert!((rule.nodes()[0] - (2.0 - s)).abs() < 1e-12);
        assert!((rule.nodes()[1] - (2.0 + s)).abs() < 1e-12);
        assert!((rule.weights()[0] - 0.8536).abs() < 1e-4);
        assert!((rule.weights()[1] - 0.1464).abs() < 1e-4);
        assert!((rule.integrate(|x| x.powi(3)) - 6.0).abs() < 1e-10);
    }

    #[test]
    fn weights_sum_to_one() {
        for k in 1..=MAX_LAGUERRE_ORDER {
            let rule = gauss_laguerre(k).unwrap();
            let total: f64 = rule.weights().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "K={k}: {total}");
            assert!(rule.weights().iter().all(|&w| w > 0.0));
            assert!(rule.nodes().windows(2).all(|p| p[0] < p[1]));
            assert!(rule.nodes()[0] > 0.0);
        }
    }

    #[test]
    fn order_out_of_range() {
        assert!(gauss_laguerre(0).is_err());
        assert!(gauss_laguerre(65).is_err());
    }
}
