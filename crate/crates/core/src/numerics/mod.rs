//! Special functions, Gauss–Laguerre quadrature and the multivariate normal
//! CDF.

mod mvn;
mod quadrature;
mod special;

pub use mvn::{mvn_cdf, MvnAccuracy, MvnEstimate, MvnIntegrator};
pub use quadrature::{gauss_laguerre, QuadratureRule, MAX_LAGUERRE_ORDER};
pub use special::{
    bessel_i_neg_half, clamp_probability, erf, erfc, inv_erf, inv_erfc, ln_bessel_i_neg_half,
    marcum_p_half, marcum_q_half, std_normal_cdf, std_normal_quantile,
};
