//! Monte Carlo oracle for the SNR distributions and the outage probability.
//!
//! Every trial owns its random stream, so results do not depend on the
//! batch size or on the number of worker threads.

mod empirical;
mod rng;
mod sampling;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::secrecy::{NodeModel, SecrecyScenario};

pub use empirical::{wilson_interval, EmpiricalDistribution};
pub use rng::{derive_seed, mix64, trial_rng, TAG_FIRST, TAG_SECOND};
pub use sampling::{sample_port_gains_full, sample_port_gains_surrogate, PortSampler};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fidelity {
    /// Rayleigh fading per RIS element with explicit phases.
    Full,
    /// Correlated Gaussian CLT model.
    Surrogate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub fidelity: Fidelity,
    pub batch: usize,
    /// Fixed RIS phase vector seen by the eavesdropper (full fidelity only);
    /// drawn uniformly per trial when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eve_ris_phases: Option<Vec<f64>>,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            trials: 100_000,
            seed: 0x5EED_0F_3C,
            fidelity: Fidelity::Surrogate,
            batch: 4096,
            eve_ris_phases: None,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("mc.trials", "must be >= 1"));
        }
        if self.batch == 0 {
            return Err(Error::param("mc.batch", "must be >= 1"));
        }
        if let Some(p) = &self.eve_ris_phases {
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::param("mc.eve_ris_phases", "must be finite"));
            }
        }
        Ok(())
    }

    fn batches(&self) -> impl IndexedParallelIterator<Item = (u64, u64)> + '_ {
        let batch = self.batch as u64;
        let count = usize::try_from(self.trials.div_ceil(batch)).expect("batch count fits in usize");
        (0..count).into_par_iter().map(move |b| {
            let b = b as u64;
            (b * batch, ((b + 1) * batch).min(self.trials))
        })
    }
}

struct NodeDraw<'a> {
    sampler: PortSampler,
    gains: Vec<f64>,
    avg_snr: f64,
    cfg: &'a McConfig,
    tag: u64,
}

impl<'a> NodeDraw<'a> {
    fn new(node: &NodeModel, cfg: &'a McConfig, tag: u64) -> Self {
        let sampler = PortSampler::new(node);
        NodeDraw {
            gains: vec![0.0; sampler.ports()],
            sampler,
            avg_snr: node.avg_snr(),
            cfg,
            tag,
        }
    }

    /// Selected-port SNR `γ̄ · maxₙ gainₙ` of trial `trial`.
    fn snr(&mut self, trial: u64) -> Result<f64> {
        let mut rng = trial_rng(self.cfg.seed, self.tag, trial);
        match self.cfg.fidelity {
            Fidelity::Full => {
                self.sampler
                    .sample_full(&mut rng, self.cfg.eve_ris_phases.as_deref(), &mut self.gains)?
            }
            Fidelity::Surrogate => self.sampler.sample_surrogate(&mut rng, &mut self.gains)?,
        }
        Ok(self.avg_snr * self.gains.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }
}

fn check_phases(node: &NodeModel, cfg: &McConfig) -> Result<()> {
    if let Some(p) = &cfg.eve_ris_phases {
        if p.len() != node.ris_elements() as usize {
            return Err(Error::DimensionMismatch {
                expected: node.ris_elements() as usize,
                got: p.len(),
            });
        }
    }
    Ok(())
}

/// Empirical distribution of the selected-port SNR of `node`.
pub fn empirical_snr_cdf(node: &NodeModel, cfg: &McConfig) -> Result<EmpiricalDistribution> {
    cfg.validate()?;
    check_phases(node, cfg)?;
    let batches: Vec<Vec<f64>> = cfg
        .batches()
        .map(|(start, end)| {
            let mut draw = NodeDraw::new(node, cfg, TAG_FIRST);
            (start..end).map(|t| draw.snr(t)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    EmpiricalDistribution::from_samples(batches.concat(), Some(node.kind()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SopEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub outages: u64,
    pub trials: u64,
    /// True when no outage was seen and `ci_high` is the rule-of-three bound.
    pub zero_outages: bool,
}

/// Frequency of `γ₁ ≤ 2^{R_s} γ₂ + 2^{R_s} − 1` over independent draws of
/// the two nodes, with a Wilson 95% interval.
pub fn empirical_outage(first: &NodeModel, second: &NodeModel, rate_bits: f64, cfg: &McConfig) -> Result<SopEstimate> {
    cfg.validate()?;
    if !(rate_bits >= 0.0 && rate_bits.is_finite()) {
        return Err(Error::param("rate_bits", "must be finite and >= 0"));
    }
    check_phases(second, cfg)?;
    let ro = rate_bits.exp2();
    let rt = ro - 1.0;
    let outages: u64 = cfg
        .batches()
        .map(|(start, end)| {
            let mut bob = NodeDraw::new(first, cfg, TAG_FIRST);
            let mut eve = NodeDraw::new(second, cfg, TAG_SECOND);
            let mut count = 0u64;
            for t in start..end {
                if bob.snr(t)? <= ro * eve.snr(t)? + rt {
                    count += 1;
                }
            }
            Ok(count)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    let n = cfg.trials;
    let estimate = outages as f64 / n as f64;
    let (ci_low, ci_high, zero) = if outages == 0 {
        (0.0, (3.0 / n as f64).min(1.0), true)
    } else {
        let (lo, hi) = wilson_interval(outages, n, Z95);
        (lo, hi, false)
    };
    Ok(SopEstimate {
        estimate,
        ci_low,
        ci_high,
        outages,
        trials: n,
        zero_outages: zero,
    })
}

/// Empirical secrecy outage probability of `s`.
pub fn empirical_sop(s: &SecrecyScenario, cfg: &McConfig) -> Result<SopEstimate> {
    s.validate()?;
    empirical_outage(&s.bob, &s.eve, s.rate_bits, cfg)
}
