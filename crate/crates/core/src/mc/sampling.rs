//! Per-port gain samplers.
//!
//! The full sampler draws the physical channel: for every RIS element a
//! Rayleigh amplitude `gₘ` towards the transmitter and a port-correlated
//! complex Gaussian vector `hₘ = L·w` towards the receiver. The surrogate
//! sampler draws the CLT model directly from a correlated normal vector.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::std_normal_cdf;
use crate::secrecy::{NodeKind, NodeModel};

/// Reusable scratch space for one node.
#[derive(Debug, Clone)]
pub struct PortSampler {
    kind: NodeKind,
    n: usize,
    ris_elements: usize,
    /// Row-major dense lower factor.
    lower: Vec<f64>,
    mean: f64,
    sd: f64,
    w_re: Vec<f64>,
    w_im: Vec<f64>,
    acc_re: Vec<f64>,
    acc_im: Vec<f64>,
}

impl PortSampler {
    pub fn new(node: &NodeModel) -> Self {
        let n = node.ports();
        let l = node.corr().lower();
        let mut lower = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                lower[i * n + j] = l[(i, j)];
            }
        }
        PortSampler {
            kind: node.kind(),
            n,
            ris_elements: node.ris_elements() as usize,
            lower,
            mean: node.clt().mean,
            sd: node.clt().variance.sqrt(),
            w_re: vec![0.0; n],
            w_im: vec![0.0; n],
            acc_re: vec![0.0; n],
            acc_im: vec![0.0; n],
        }
    }

    pub fn ports(&self) -> usize {
        self.n
    }

    fn check_out(&self, out: &[f64]) -> Result<()> {
        if out.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: out.len(),
            });
        }
        Ok(())
    }

    /// Physical-channel gains. `ris_phases` fixes the RIS phase vector `ψ`
    /// seen by an eavesdropper; `None` draws it uniformly per call. It is
    /// ignored for the legitimate node, whose phases are ideally aligned.
    pub fn sample_full<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        ris_phases: Option<&[f64]>,
        out: &mut [f64],
    ) -> Result<()> {
        self.check_out(out)?;
        if let Some(p) = ris_phases {
            if p.len() != self.ris_elements {
                return Err(Error::DimensionMismatch {
                    expected: self.ris_elements,
                    got: p.len(),
                });
            }
        }
        let n = self.n;
        self.acc_re.iter_mut().for_each(|v| *v = 0.0);
        self.acc_im.iter_mut().for_each(|v| *v = 0.0);
        for m in 0..self.ris_elements {
            let gx: f64 = rng.sample(StandardNormal);
            let gy: f64 = rng.sample(StandardNormal);
            let g = ((gx * gx + gy * gy) * 0.5).sqrt();
            for k in 0..n {
                self.w_re[k] = FRAC_1_SQRT_2 * rng.sample::<f64, _>(StandardNormal);
                self.w_im[k] = FRAC_1_SQRT_2 * rng.sample::<f64, _>(StandardNormal);
            }
            match self.kind {
                NodeKind::Legitimate => {
                    for i in 0..n {
                        let row = &self.lower[i * n..i * n + i + 1];
                        let (mut re, mut im) = (0.0, 0.0);
                        for (j, &lij) in row.iter().enumerate() {
                            re += lij * self.w_re[j];
                            im += lij * self.w_im[j];
                        }
                        self.acc_re[i] += g * re.hypot(im);
                    }
                }
                NodeKind::Eavesdropper => {
                    let theta = TAU * rng.random::<f64>();
                    let psi = match ris_phases {
                        Some(p) => p[m],
                        None => TAU * rng.random::<f64>(),
                    };
                    let (s, c) = (theta - psi).sin_cos();
                    for i in 0..n {
                        let row = &self.lower[i * n..i * n + i + 1];
                        let (mut re, mut im) = (0.0, 0.0);
                        for (j, &lij) in row.iter().enumerate() {
                            re += lij * self.w_re[j];
                            im += lij * self.w_im[j];
                        }
                        self.acc_re[i] += g * (c * re - s * im);
                        self.acc_im[i] += g * (s * re + c * im);
                    }
                }
            }
        }
        for i in 0..n {
            out[i] = self.acc_re[i] * self.acc_re[i] + self.acc_im[i] * self.acc_im[i];
        }
        Ok(())
    }

    /// CLT-surrogate gains from `z = L·n`, `n ~ N(0, I)`.
    pub fn sample_surrogate<R: Rng + ?Sized>(&mut self, rng: &mut R, out: &mut [f64]) -> Result<()> {
        self.check_out(out)?;
        let n = self.n;
        for k in 0..n {
            self.w_re[k] = rng.sample(StandardNormal);
        }
        let m = self.ris_elements as f64;
        for i in 0..n {
            let row = &self.lower[i * n..i * n + i + 1];
            let z: f64 = row.iter().zip(&self.w_re).map(|(l, w)| l * w).sum();
            out[i] = match self.kind {
                NodeKind::Legitimate => (self.mean + self.sd * z).powi(2),
                NodeKind::Eavesdropper => {
                    // −M ln(1 − Φ(z)), formed from the smaller tail
                    let neg_ln_tail = if z < 0.0 {
                        -(-std_normal_cdf(z)).ln_1p()
                    } else {
                        -std_normal_cdf(-z).ln()
                    };
                    m * neg_ln_tail
                }
            };
        }
        Ok(())
    }
}

/// One draw of the physical per-port gains of `node`.
pub fn sample_port_gains_full<R: Rng + ?Sized>(
    node: &NodeModel,
    rng: &mut R,
    ris_phases: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let mut s = PortSampler::new(node);
    let mut out = vec![0.0; s.ports()];
    s.sample_full(rng, ris_phases, &mut out)?;
    Ok(out)
}

/// One draw of the CLT-surrogate per-port gains of `node`.
pub fn sample_port_gains_surrogate<R: Rng + ?Sized>(node: &NodeModel, rng: &mut R) -> Result<Vec<f64>> {
    let mut s = PortSampler::new(node);
    let mut out = vec![0.0; s.ports()];
    s.sample_surrogate(rng, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PortGrid;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn node(kind: NodeKind, n1: usize, n2: usize, m: u32) -> NodeModel {
        NodeModel::new(kind, PortGrid::square(n1, n2, 1.0).unwrap(), m, 1.0, 1e-10).unwrap()
    }

    #[test]
    fn output_length_is_checked() {
        let mut s = PortSampler::new(&node(NodeKind::Legitimate, 2, 2, 3));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut short = [0.0; 3];
        assert!(s.sample_full(&mut rng, None, &mut short).is_err());
        assert!(s.sample_surrogate(&mut rng, &mut short).is_err());
        let mut e = PortSampler::new(&node(NodeKind::Eavesdropper, 1, 2, 3));
        let mut out = [0.0; 2];
        assert!(e.sample_full(&mut rng, Some(&[0.0, 1.0]), &mut out).is_err());
        assert!(e.sample_full(&mut rng, Some(&[0.0, 1.0, 2.0]), &mut out).is_ok());
    }

    #[test]
    fn eavesdropper_mean_gain() {
        let n = node(NodeKind::Eavesdropper, 1, 2, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 40_000;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..trials {
            let g = sample_port_gains_full(&n, &mut rng, None).unwrap()[1];
            sum += g;
            sum2 += g * g;
        }
        let mean = sum / trials as f64;
        let se = ((sum2 / trials as f64 - mean * mean) / trials as f64).sqrt();
        assert!((mean - 5.0).abs() < 4.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn surrogate_is_nonnegative() {
        for kind in [NodeKind::Legitimate, NodeKind::Eavesdropper] {
            let n = node(kind, 2, 2, 6);
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for _ in 0..1000 {
                assert!(sample_port_gains_surrogate(&n, &mut rng).unwrap().iter().all(|&g| g >= 0.0));
            }
        }
    }
}
