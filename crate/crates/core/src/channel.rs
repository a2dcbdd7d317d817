//! Link budget and the CLT surrogates for the per-port RIS-combined gains.
//!
//! With ideal phase alignment the legitimate port gain is `A²`, where
//! `A = Σ gₘhₘ` is approximately Gaussian with mean `Mπ/4` and variance
//! `M(1−π²/16)` (unit-second-moment Rayleigh amplitudes), so `A²` is a
//! scaled one-degree-of-freedom non-central chi-square. The misaligned
//! eavesdropper gain `B²` is approximately exponential with mean `M`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ln_bessel_i_neg_half, marcum_p_half};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub power_dbm: f64,
    pub noise_dbm: f64,
    /// Transmitter–RIS distance in metres.
    pub dist_ar_m: f64,
    /// RIS–receiver distance in metres.
    pub dist_rn_m: f64,
    pub pathloss_exp: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        if !(self.power_dbm.is_finite() && self.noise_dbm.is_finite()) {
            return Err(Error::param("power_dbm/noise_dbm", "must be finite"));
        }
        if !(self.dist_ar_m > 0.0 && self.dist_ar_m.is_finite()) {
            return Err(Error::param("dist_ar_m", format!("must be > 0, got {}", self.dist_ar_m)));
        }
        if !(self.dist_rn_m > 0.0 && self.dist_rn_m.is_finite()) {
            return Err(Error::param("dist_rn_m", format!("must be > 0, got {}", self.dist_rn_m)));
        }
        if !(self.pathloss_exp > 2.0 && self.pathloss_exp.is_finite()) {
            return Err(Error::param(
                "pathloss_exp",
                format!("must be > 2, got {}", self.pathloss_exp),
            ));
        }
        Ok(())
    }

    /// Cascaded path loss `(d_r·d_i)^α` in dB.
    pub fn pathloss_db(&self) -> f64 {
        10.0 * self.pathloss_exp * (self.dist_ar_m * self.dist_rn_m).log10()
    }

    /// Transmit power (dBm) that yields `avg_snr_db` over this link.
    pub fn power_for_avg_snr_db(&self, avg_snr_db: f64) -> f64 {
        avg_snr_db + self.noise_dbm + self.pathloss_db()
    }
}

/// Average SNR `P / (σ² (d_r d_i)^α)` as a linear ratio.
pub fn avg_snr(lb: &LinkBudget) -> Result<f64> {
    lb.validate()?;
    Ok(db_to_linear(lb.power_dbm - lb.noise_dbm - lb.pathloss_db()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltParams {
    pub mean: f64,
    pub variance: f64,
    /// `τ = μ²`; zero for the eavesdropper.
    pub noncentrality: f64,
}

/// Below this many RIS elements the CLT surrogate is a rough approximation.
pub const CLT_MIN_ELEMENTS: u32 = 4;

pub fn bob_clt_params(ris_elements: u32) -> Result<CltParams> {
    if ris_elements == 0 {
        return Err(Error::param("ris_elements", "must be >= 1"));
    }
    if ris_elements < CLT_MIN_ELEMENTS {
        log::warn!("M = {ris_elements} RIS elements: CLT surrogate accuracy is limited below M = {CLT_MIN_ELEMENTS}");
    }
    let m = ris_elements as f64;
    let mean = m * PI / 4.0;
    Ok(CltParams {
        mean,
        variance: m * (1.0 - PI * PI / 16.0),
        noncentrality: mean * mean,
    })
}

pub fn eve_clt_params(ris_elements: u32) -> Result<CltParams> {
    if ris_elements == 0 {
        return Err(Error::param("ris_elements", "must be >= 1"));
    }
    Ok(CltParams {
        mean: 0.0,
        variance: ris_elements as f64,
        noncentrality: 0.0,
    })
}

/// CDF of `A²`: `1 − Q_{1/2}(√(τ/σ²), √(a/σ²))`; zero for `a ≤ 0`.
pub fn cdf_a2(a: f64, p: &CltParams) -> f64 {
    if !(a > 0.0) {
        return 0.0;
    }
    if a == f64::INFINITY {
        return 1.0;
    }
    let lambda = (p.noncentrality / p.variance).sqrt();
    let x = (a / p.variance).sqrt();
    marcum_p_half(lambda, x).expect("arguments are finite and non-negative")
}

/// `ln f_{A²}(a)` for `a > 0`.
pub fn ln_pdf_a2(a: f64, p: &CltParams) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain("pdf_a2", format!("a must be finite and > 0, got {a}")));
    }
    let s2 = p.variance;
    let tau = p.noncentrality;
    if tau == 0.0 {
        // central limit of the same density: chi-square(1) scaled by σ²
        return Ok(-0.5 * (2.0 * PI * s2 * a).ln() - a / (2.0 * s2));
    }
    let bessel_arg = (a * tau).sqrt() / s2;
    Ok(-(2.0 * s2).ln() - 0.25 * (a / tau).ln() - (a + tau) / (2.0 * s2)
        + ln_bessel_i_neg_half(bessel_arg)?)
}

/// Density of `A²`:
/// `1/(2σ²) (a/τ)^{-1/4} exp(−(a+τ)/(2σ²)) I_{-1/2}(√(aτ)/σ²)`.
pub fn pdf_a2(a: f64, p: &CltParams) -> Result<f64> {
    ln_pdf_a2(a, p).map(f64::exp)
}

fn check_elements(m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::param("ris_elements", "must be >= 1"));
    }
    Ok(m as f64)
}

/// Exponential CDF with mean `M`; zero for `b ≤ 0`.
pub fn cdf_b2(b: f64, ris_elements: u32) -> Result<f64> {
    let m = check_elements(ris_elements)?;
    if !(b > 0.0) {
        return Ok(0.0);
    }
    Ok(-(-b / m).exp_m1())
}

pub fn pdf_b2(b: f64, ris_elements: u32) -> Result<f64> {
    let m = check_elements(ris_elements)?;
    if b < 0.0 || b.is_nan() {
        return Err(Error::domain("pdf_b2", format!("b must be >= 0, got {b}")));
    }
    Ok((-b / m).exp() / m)
}
