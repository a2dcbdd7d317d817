//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Regularized lower incomplete gamma by its power series.
pub fn gamma_p_series(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut term = 1.0 / s;
    let mut sum = term;
    let mut n = 1.0;
    while term > sum * 1e-17 {
        term *= x / (s + n);
        sum += term;
        n += 1.0;
    }
    (s * x.ln() - x - ln_gamma(s)).exp() * sum
}

/// `Q_{1/2}(a, b)` as a Poisson mixture of central chi-square tails
/// (non-central chi-square with one degree of freedom).
pub fn marcum_q_half_series(a: f64, b: f64) -> f64 {
    let lambda = 0.5 * a * a;
    let x = 0.5 * b * b;
    let jmax = (lambda + 40.0 * lambda.sqrt() + 60.0) as usize;
    let mut cdf = 0.0;
    for j in 0..=jmax {
        let ln_w = -lambda + if j == 0 { 0.0 } else { j as f64 * lambda.ln() } - ln_gamma(j as f64 + 1.0);
        cdf += ln_w.exp() * gamma_p_series(0.5 + j as f64, x);
    }
    1.0 - cdf
}

/// `I_{-1/2}(z) = Σ (z/2)^{2k−1/2} / (k! Γ(k+1/2))`.
pub fn bessel_i_neg_half_series(z: f64) -> f64 {
    let h = 0.5 * z;
    let mut term = h.powf(-0.5) / PI.sqrt();
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= h * h / (k * (k - 0.5));
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn big_phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

const LOWER: f64 = -10.0;

/// `P(X ≤ h, Y ≤ k)` for standard normals with correlation `rho`, by
/// integrating the conditional CDF.
pub fn bvn_brute(h: f64, k: f64, rho: f64) -> f64 {
    let s = (1.0 - rho * rho).sqrt();
    simpson(|x| phi(x) * big_phi((k - rho * x) / s), LOWER, h, 4000)
}

/// Trivariate orthant probability by nested quadrature.
pub fn tvn_brute(upper: [f64; 3], r: [[f64; 3]; 3]) -> f64 {
    let (r12, r13, r23) = (r[0][1], r[0][2], r[1][2]);
    let s2 = (1.0 - r12 * r12).sqrt();
    let s3 = (1.0 - r13 * r13).sqrt();
    let rho = (r23 - r12 * r13) / (s2 * s3);
    simpson(
        |x| {
            let h = (upper[1] - r12 * x) / s2;
            let k = (upper[2] - r13 * x) / s3;
            phi(x) * bvn_brute(h, k, rho)
        },
        LOWER,
        upper[0],
        800,
    )
}

/// `P(X ≤ 0, Y ≤ 0) = 1/4 + asin(ρ)/(2π)`.
pub fn orthant2(rho: f64) -> f64 {
    0.25 + rho.asin() / (2.0 * PI)
}

/// Random correlation matrix from normalized Gaussian rows.
pub fn random_correlation(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = n + 2;
    let mut a = DMatrix::<f64>::zeros(n, k);
    for i in 0..n {
        for j in 0..k {
            a[(i, j)] = rng.random::<f64>() * 2.0 - 1.0;
        }
        let norm = a.row(i).norm();
        for j in 0..k {
            a[(i, j)] /= norm;
        }
    }
    let mut r = &a * a.transpose();
    for i in 0..n {
        r[(i, i)] = 1.0;
        for j in 0..i {
            let v = 0.5 * (r[(i, j)] + r[(j, i)]);
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    r
}
