//! Post-selection SNR distributions and the secrecy outage probability.
//!
//! Each receiver picks the best of its `N` ports, so its SNR CDF is the
//! diagonal Gaussian copula evaluated at the marginal CDF of one port.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{bob_clt_params, eve_clt_params, ln_pdf_a2, CltParams};
use crate::copula::{copula_diag_cdf_at_z, copula_diag_cdf_at_z_fixed, ln_copula_diag_density_at_z};
use crate::error::{Error, Result};
use crate::geometry::{correlation_matrix, CorrelationMatrix, PortGrid};
use crate::numerics::{
    gauss_laguerre, marcum_p_half, marcum_q_half, std_normal_cdf, std_normal_quantile, MvnAccuracy,
    MvnEstimate, MAX_LAGUERRE_ORDER,
};

/// SOP values below this are checked against the attached error estimate.
pub const NUMERICAL_FLOOR_SOP: f64 = 1e-7;

const REF_Z_LIMIT: f64 = 8.5;
const REF_INITIAL_INTERVALS: usize = 34;
const REF_MAX_INTERVALS: usize = 4000;
const REF_ABS_TOL: f64 = 1e-14;
const REF_REL_TOL: f64 = 1e-3;
const REF_MIN_LATTICE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Legitimate,
    Eavesdropper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdfMode {
    /// Marginal density to the power `N` times the copula density.
    Paper,
    /// Central difference of the CDF.
    Derivative,
}

#[derive(Debug, Clone)]
pub struct NodeModel {
    grid: PortGrid,
    corr: CorrelationMatrix,
    clt: CltParams,
    ris_elements: u32,
    avg_snr: f64,
    kind: NodeKind,
}

impl NodeModel {
    /// Builds the node with the sinc correlation of `grid`.
    pub fn new(kind: NodeKind, grid: PortGrid, ris_elements: u32, avg_snr: f64, eps_floor: f64) -> Result<Self> {
        let corr = correlation_matrix(&grid, eps_floor)?;
        NodeModel::with_correlation(kind, grid, corr, ris_elements, avg_snr)
    }

    /// Builds the node with an explicit port correlation matrix.
    pub fn with_correlation(
        kind: NodeKind,
        grid: PortGrid,
        corr: CorrelationMatrix,
        ris_elements: u32,
        avg_snr: f64,
    ) -> Result<Self> {
        if corr.dim() != grid.ports() {
            return Err(Error::DimensionMismatch {
                expected: grid.ports(),
                got: corr.dim(),
            });
        }
        if !(avg_snr > 0.0 && avg_snr.is_finite()) {
            return Err(Error::param("avg_snr", format!("must be finite and > 0, got {avg_snr}")));
        }
        let clt = match kind {
            NodeKind::Legitimate => bob_clt_params(ris_elements)?,
            NodeKind::Eavesdropper => eve_clt_params(ris_elements)?,
        };
        Ok(NodeModel {
            grid,
            corr,
            clt,
            ris_elements,
            avg_snr,
            kind,
        })
    }

    pub fn grid(&self) -> &PortGrid {
        &self.grid
    }

    pub fn corr(&self) -> &CorrelationMatrix {
        &self.corr
    }

    pub fn clt(&self) -> &CltParams {
        &self.clt
    }

    pub fn ris_elements(&self) -> u32 {
        self.ris_elements
    }

    pub fn avg_snr(&self) -> f64 {
        self.avg_snr
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn ports(&self) -> usize {
        self.grid.ports()
    }

    /// `(F(x), 1 − F(x))` of one port's normalized gain `x = γ/γ̄`.
    pub fn marginal_tails(&self, x: f64) -> (f64, f64) {
        if !(x > 0.0) {
            return (0.0, 1.0);
        }
        if x == f64::INFINITY {
            return (1.0, 0.0);
        }
        match self.kind {
            NodeKind::Legitimate => {
                let a = (self.clt.noncentrality / self.clt.variance).sqrt();
                let b = (x / self.clt.variance).sqrt();
                (
                    marcum_p_half(a, b).expect("finite non-negative arguments"),
                    marcum_q_half(a, b).expect("finite non-negative arguments"),
                )
            }
            NodeKind::Eavesdropper => {
                let t = x / self.ris_elements as f64;
                (-(-t).exp_m1(), (-t).exp())
            }
        }
    }

    fn ln_marginal_pdf(&self, x: f64) -> Result<f64> {
        match self.kind {
            NodeKind::Legitimate => ln_pdf_a2(x, &self.clt),
            NodeKind::Eavesdropper => {
                let m = self.ris_elements as f64;
                Ok(-m.ln() - x / m)
            }
        }
    }

    /// Normal score `Φ⁻¹(F(γ/γ̄))`, formed from whichever tail is smaller.
    pub fn normal_score(&self, gamma: f64) -> f64 {
        let (p, q) = self.marginal_tails(gamma / self.avg_snr);
        tails_to_score(p, q)
    }

    fn check_gamma(gamma: f64, function: &'static str) -> Result<()> {
        if gamma.is_nan() || gamma < 0.0 {
            return Err(Error::domain(function, format!("gamma must be >= 0, got {gamma}")));
        }
        Ok(())
    }

    fn cdf_with(&self, gamma: f64, acc: &MvnAccuracy, points: Option<usize>) -> Result<MvnEstimate> {
        Self::check_gamma(gamma, "cdf_gamma")?;
        if gamma == 0.0 {
            return Ok(MvnEstimate::exact(0.0));
        }
        let (p, q) = self.marginal_tails(gamma / self.avg_snr);
        if self.ports() == 1 {
            return Ok(MvnEstimate::exact(p));
        }
        let z = tails_to_score(p, q);
        match points {
            None => copula_diag_cdf_at_z(z, &self.corr, acc),
            Some(n) => copula_diag_cdf_at_z_fixed(z, &self.corr, acc, n),
        }
    }

    /// CDF of the selected-port SNR.
    pub fn cdf(&self, gamma: f64, acc: &MvnAccuracy) -> Result<MvnEstimate> {
        self.cdf_with(gamma, acc, None)
    }

    /// Density of the selected-port SNR.
    pub fn pdf(&self, gamma: f64, mode: PdfMode, acc: &MvnAccuracy) -> Result<f64> {
        match mode {
            PdfMode::Paper => self.pdf_paper(gamma),
            PdfMode::Derivative => self.pdf_derivative(gamma, acc),
        }
    }

    fn pdf_paper(&self, gamma: f64) -> Result<f64> {
        Self::check_gamma(gamma, "pdf_gamma")?;
        let x = gamma / self.avg_snr;
        let n = self.ports() as f64;
        if gamma == 0.0 {
            if self.kind == NodeKind::Legitimate {
                return Err(Error::domain("pdf_gamma", "gamma must be > 0 for the legitimate node"));
            }
            let ln_marg = n * self.ln_marginal_pdf(0.0)? - self.avg_snr.ln();
            if self.ports() == 1 {
                return Ok(ln_marg.exp());
            }
            // z → −∞: the copula factor tends to 0, a constant, or ∞
            let k = self.corr.ones_quadratic() - n;
            return Ok(if k.abs() <= 1e-12 * n {
                (ln_marg - 0.5 * self.corr.log_det()).exp()
            } else if k > 0.0 {
                0.0
            } else {
                f64::INFINITY
            });
        }
        let mut ln_f = n * self.ln_marginal_pdf(x)? - self.avg_snr.ln();
        if self.ports() > 1 {
            let z = self.normal_score(gamma);
            if !z.is_finite() {
                return Ok(0.0);
            }
            ln_f += ln_copula_diag_density_at_z(z, &self.corr);
        }
        Ok(ln_f.exp())
    }

    fn pdf_derivative(&self, gamma: f64, acc: &MvnAccuracy) -> Result<f64> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::domain("pdf_gamma", format!("gamma must be finite and > 0, got {gamma}")));
        }
        let (rel, points) = if self.ports() == 1 {
            (f64::EPSILON, None)
        } else {
            let pilot = self.cdf(gamma, acc)?;
            let rel = if pilot.value > 0.0 { (pilot.error / pilot.value).min(1.0) } else { 1.0 };
            (rel, Some(pilot.lattice_points.max(REF_MIN_LATTICE)))
        };
        let h = gamma * rel.cbrt().clamp(1e-4, 1e-2);
        let hi = self.cdf_with(gamma + h, acc, points)?.value;
        let lo = self.cdf_with(gamma - h, acc, points)?.value;
        Ok(((hi - lo) / (2.0 * h)).max(0.0))
    }
}

fn tails_to_score(p: f64, q: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if q <= 0.0 {
        f64::INFINITY
    } else if p <= 0.5 {
        std_normal_quantile(p).expect("p in (0, 0.5]")
    } else {
        -std_normal_quantile(q).expect("q in (0, 0.5)")
    }
}

#[derive(Debug, Clone)]
pub struct SecrecyScenario {
    pub ris_elements: u32,
    pub bob: NodeModel,
    pub eve: NodeModel,
    /// Target secrecy rate `R_s` in bits per channel use.
    pub rate_bits: f64,
    pub glq_order: usize,
    pub mvn_acc: MvnAccuracy,
}

impl SecrecyScenario {
    pub fn new(
        ris_elements: u32,
        bob: NodeModel,
        eve: NodeModel,
        rate_bits: f64,
        glq_order: usize,
        mvn_acc: MvnAccuracy,
    ) -> Result<Self> {
        let s = SecrecyScenario {
            ris_elements,
            bob,
            eve,
            rate_bits,
            glq_order,
            mvn_acc,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ris_elements == 0 {
            return Err(Error::param("ris_elements", "must be >= 1"));
        }
        if self.bob.kind != NodeKind::Legitimate || self.eve.kind != NodeKind::Eavesdropper {
            return Err(Error::param("bob/eve", "node kinds must be legitimate and eavesdropper"));
        }
        if self.bob.ris_elements != self.ris_elements || self.eve.ris_elements != self.ris_elements {
            return Err(Error::param("ris_elements", "nodes were built for a different element count"));
        }
        if !(self.rate_bits >= 0.0 && self.rate_bits.is_finite()) {
            return Err(Error::param("rate_bits", format!("must be finite and >= 0, got {}", self.rate_bits)));
        }
        if !(1..=MAX_LAGUERRE_ORDER).contains(&self.glq_order) {
            return Err(Error::param("glq_order", format!("must lie in 1..={MAX_LAGUERRE_ORDER}")));
        }
        self.mvn_acc.validate()
    }

    /// `R_o = 2^{R_s}`.
    pub fn ro(&self) -> f64 {
        self.rate_bits.exp2()
    }

    /// `R_t = R_o − 1`.
    pub fn rt(&self) -> f64 {
        self.rate_bits.exp2() - 1.0
    }

    /// Legitimate SNR below which the secrecy capacity falls short of `R_s`.
    pub fn outage_threshold(&self, gamma_e: f64) -> f64 {
        self.ro() * gamma_e + self.rt()
    }
}

pub fn cdf_gamma_b(gamma: f64, s: &SecrecyScenario) -> Result<MvnEstimate> {
    s.bob.cdf(gamma, &s.mvn_acc)
}

pub fn cdf_gamma_e(gamma: f64, s: &SecrecyScenario) -> Result<MvnEstimate> {
    s.eve.cdf(gamma, &s.mvn_acc)
}

pub fn pdf_gamma_b(gamma: f64, s: &SecrecyScenario, mode: PdfMode) -> Result<f64> {
    s.bob.pdf(gamma, mode, &s.mvn_acc)
}

pub fn pdf_gamma_e(gamma: f64, s: &SecrecyScenario, mode: PdfMode) -> Result<f64> {
    s.eve.pdf(gamma, mode, &s.mvn_acc)
}

/// `max{log₂(1+γ_b) − log₂(1+γ_e), 0}`.
pub fn secrecy_capacity(gamma_b: f64, gamma_e: f64) -> f64 {
    ((gamma_b.ln_1p() - gamma_e.ln_1p()) / LN_2).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SopPath {
    Glq,
    Reference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SopResult {
    pub value: f64,
    /// Absolute error estimate. For the GLQ path this covers only the MVN
    /// error, not the quadrature truncation.
    pub error: f64,
    pub path: SopPath,
    pub below_floor: bool,
    /// MVN evaluations that missed their accuracy target.
    pub mvn_warnings: usize,
    pub evals: u64,
    /// Final interval count of the reference integration.
    pub intervals: usize,
}

fn is_below_floor(value: f64, error: f64) -> bool {
    value < NUMERICAL_FLOOR_SOP && (error >= 0.5 * value || value < 1e-14)
}

pub fn sop(s: &SecrecyScenario, path: SopPath) -> Result<SopResult> {
    s.validate()?;
    match path {
        SopPath::Glq => sop_glq(s),
        SopPath::Reference => sop_reference(s),
    }
}

/// `Σ ω_k e^{ε_k} f_{γ_e}(ε_k) F_{γ_b}(R_o ε_k + R_t)` with the product-form
/// eavesdropper density, evaluated term-wise in log space.
fn sop_glq(s: &SecrecyScenario) -> Result<SopResult> {
    let rule = gauss_laguerre(s.glq_order)?;
    let eve = &s.eve;
    let n_e = eve.ports() as f64;
    let m = s.ris_elements as f64;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut warnings = 0;
    let mut evals = 0;
    for (eps, w) in rule.iter() {
        let mut ln_weight = w.ln() + eps - eve.avg_snr.ln() + n_e * (-m.ln() - eps / (m * eve.avg_snr));
        if eve.ports() > 1 {
            let z = eve.normal_score(eps);
            if !z.is_finite() {
                // the marginal factor decays faster than the copula factor grows
                continue;
            }
            ln_weight += ln_copula_diag_density_at_z(z, &eve.corr);
        }
        let weight = ln_weight.exp();
        if weight == 0.0 {
            continue;
        }
        let fb = s.bob.cdf(s.outage_threshold(eps), &s.mvn_acc)?;
        if !fb.converged {
            warnings += 1;
        }
        evals += fb.evals;
        value += weight * fb.value;
        error += weight * fb.error;
    }
    if !value.is_finite() {
        return Err(Error::NonConvergent(format!("GLQ sum is not finite ({value})")));
    }
    let value = value.clamp(0.0, 1.0);
    Ok(SopResult {
        value,
        error,
        path: SopPath::Glq,
        below_floor: is_below_floor(value, error),
        mvn_warnings: warnings,
        evals,
        intervals: 0,
    })
}

#[derive(Debug, Clone, Copy)]
struct RefPoint {
    h: f64,
    h_err: f64,
    g: f64,
    g_err: f64,
}

#[derive(Debug, Clone, Copy)]
struct Interval {
    a: f64,
    b: f64,
    pa: RefPoint,
    pm: RefPoint,
    pb: RefPoint,
    estimate: f64,
    err: f64,
}

impl Interval {
    fn new(a: f64, b: f64, pa: RefPoint, pm: RefPoint, pb: RefPoint) -> Self {
        let coarse = 0.5 * (pa.h + pb.h) * (pb.g - pa.g);
        let fine = 0.5 * (pa.h + pm.h) * (pm.g - pa.g) + 0.5 * (pm.h + pb.h) * (pb.g - pm.g);
        Interval {
            a,
            b,
            pa,
            pm,
            pb,
            estimate: fine + (fine - coarse) / 3.0,
            err: (fine - coarse).abs() / 3.0,
        }
    }

    /// `∫ e_h dG + ∫ e_G dh` over the interval.
    fn mvn_error(&self) -> f64 {
        let pts = [self.pa, self.pm, self.pb];
        pts.windows(2)
            .map(|p| {
                0.5 * (p[0].h_err + p[1].h_err) * (p[1].g - p[0].g).abs()
                    + 0.5 * (p[0].g_err + p[1].g_err) * (p[1].h - p[0].h).abs()
            })
            .sum()
    }
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Interval {}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.a.total_cmp(&self.a))
    }
}

struct ReferenceIntegrand<'a> {
    s: &'a SecrecyScenario,
    bob_points: usize,
    eve_points: usize,
}

impl ReferenceIntegrand<'_> {
    /// Eavesdropper SNR whose single-port normal score is `z`.
    fn gamma_e(&self, z: f64) -> f64 {
        let eve = &self.s.eve;
        // −ln(1 − Φ(z)) without cancellation on either side
        let neg_ln_tail = if z < 0.0 {
            -(-std_normal_cdf(z)).ln_1p()
        } else {
            -std_normal_cdf(-z).ln()
        };
        eve.ris_elements as f64 * eve.avg_snr * neg_ln_tail
    }

    fn eval(&self, z: f64) -> Result<RefPoint> {
        let s = self.s;
        let fb = s
            .bob
            .cdf_with(s.outage_threshold(self.gamma_e(z)), &s.mvn_acc, Some(self.bob_points))?;
        let fe = if s.eve.ports() == 1 {
            MvnEstimate::exact(std_normal_cdf(z))
        } else {
            copula_diag_cdf_at_z_fixed(z, &s.eve.corr, &s.mvn_acc, self.eve_points)?
        };
        Ok(RefPoint {
            h: fb.value,
            h_err: fb.error,
            g: fe.value,
            g_err: fe.error,
        })
    }
}

/// Picks one lattice size per node from adaptive pilot evaluations; also
/// returns the number of pilots that missed their accuracy targets.
fn pilot_lattice(s: &SecrecyScenario) -> Result<(usize, usize, usize)> {
    let cap = (s.mvn_acc.max_evals / 16).max(REF_MIN_LATTICE as u64) as usize;
    let probe = ReferenceIntegrand {
        s,
        bob_points: REF_MIN_LATTICE,
        eve_points: REF_MIN_LATTICE,
    };
    let n_e = s.eve.ports() as f64;
    let z_mid = std_normal_quantile(0.5f64.powf(1.0 / n_e))?;
    let mut bob_points = REF_MIN_LATTICE;
    let mut eve_points = REF_MIN_LATTICE;
    let mut missed = 0;
    for dz in [-2.0, 0.0, 2.0] {
        let z = z_mid + dz;
        let fb = s.bob.cdf(s.outage_threshold(probe.gamma_e(z)), &s.mvn_acc)?;
        bob_points = bob_points.max(fb.lattice_points);
        missed += usize::from(!fb.converged);
        if s.eve.ports() > 1 {
            let fe = copula_diag_cdf_at_z(z, &s.eve.corr, &s.mvn_acc)?;
            eve_points = eve_points.max(fe.lattice_points);
            missed += usize::from(!fe.converged);
        }
    }
    Ok((bob_points.min(cap), eve_points.min(cap), missed))
}

/// `∫ F_{γ_b}(R_o x + R_t) dF_{γ_e}(x)` computed in the eavesdropper's
/// normal-score coordinate with adaptive trapezoid–Stieltjes refinement.
fn sop_reference(s: &SecrecyScenario) -> Result<SopResult> {
    let (bob_points, eve_points, pilot_missed) = pilot_lattice(s)?;
    let f = ReferenceIntegrand {
        s,
        bob_points,
        eve_points,
    };
    let width = 2.0 * REF_Z_LIMIT / REF_INITIAL_INTERVALS as f64;
    let zs: Vec<f64> = (0..=2 * REF_INITIAL_INTERVALS)
        .map(|i| -REF_Z_LIMIT + 0.5 * width * i as f64)
        .collect();
    let pts = zs.par_iter().map(|&z| f.eval(z)).collect::<Result<Vec<_>>>()?;
    let mut evaluations = pts.len();

    let mut heap: BinaryHeap<Interval> = (0..REF_INITIAL_INTERVALS)
        .map(|i| Interval::new(zs[2 * i], zs[2 * i + 2], pts[2 * i], pts[2 * i + 1], pts[2 * i + 2]))
        .collect();
    let lo = pts[0];
    let hi = pts[pts.len() - 1];
    // tail mass outside the integration window, with h at the window edges
    let tails = lo.g * lo.h + (1.0 - hi.g) * hi.h;

    loop {
        let total: f64 = heap.iter().map(|iv| iv.estimate).sum::<f64>() + tails;
        let err: f64 = heap.iter().map(|iv| iv.err).sum();
        if err <= REF_ABS_TOL.max(REF_REL_TOL * total.abs()) {
            break;
        }
        if heap.len() >= REF_MAX_INTERVALS {
            let worst = heap.peek().expect("non-empty");
            return Err(Error::NonConvergent(format!(
                "reference SOP: {} intervals, estimate {total:e}, error {err:e}, worst interval [{}, {}]",
                heap.len(),
                worst.a,
                worst.b
            )));
        }
        let iv = heap.pop().expect("non-empty");
        let m = 0.5 * (iv.a + iv.b);
        let (ql, qr) = rayon::join(|| f.eval(0.5 * (iv.a + m)), || f.eval(0.5 * (m + iv.b)));
        evaluations += 2;
        heap.push(Interval::new(iv.a, m, iv.pa, ql?, iv.pm));
        heap.push(Interval::new(m, iv.b, iv.pm, qr?, iv.pb));
    }

    let mut intervals = heap.into_vec();
    intervals.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: f64 = intervals.iter().map(|iv| iv.estimate).sum::<f64>() + tails;
    let quad_err: f64 = intervals.iter().map(|iv| iv.err).sum();
    let mvn_err: f64 = intervals.iter().map(Interval::mvn_error).sum::<f64>()
        + hi.h * hi.g_err
        + lo.h * lo.g_err;
    let tail_err = lo.g * lo.h + (1.0 - hi.g) * (1.0 - hi.h);
    let error = quad_err + mvn_err + tail_err;
    let value = value.clamp(0.0, 1.0);
    let per_eval = 16 * (bob_points + if s.eve.ports() > 1 { eve_points } else { 0 }) as u64;
    Ok(SopResult {
        value,
        error,
        path: SopPath::Reference,
        below_floor: is_below_floor(value, error),
        mvn_warnings: pilot_missed + usize::from(mvn_err > 0.1 * value),
        evals: per_eval * evaluations as u64,
        intervals: intervals.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{cdf_a2, pdf_a2};

    fn node(kind: NodeKind, n1: usize, n2: usize, area: f64, m: u32, snr: f64) -> NodeModel {
        NodeModel::new(kind, PortGrid::square(n1, n2, area).unwrap(), m, snr, 1e-10).unwrap()
    }

    fn scenario(nb: (usize, usize), ne: (usize, usize), snr_b: f64, snr_e: f64, rate: f64) -> SecrecyScenario {
        SecrecyScenario::new(
            6,
            node(NodeKind::Legitimate, nb.0, nb.1, 1.0, 6, snr_b),
            node(NodeKind::Eavesdropper, ne.0, ne.1, 1.0, 6, snr_e),
            rate,
            2,
            MvnAccuracy::default(),
        )
        .unwrap()
    }

    #[test]
    fn capacity_values() {
        assert_eq!(secrecy_capacity(2.0, 2.0), 0.0);
        assert!((secrecy_capacity(3.0, 0.0) - 2.0).abs() < 1e-15);
        assert_eq!(secrecy_capacity(1.0, 3.0), 0.0);
    }

    #[test]
    fn rates() {
        let s = scenario((1, 1), (1, 1), 1.0, 1.0, 3.0);
        assert_eq!(s.ro(), 8.0);
        assert_eq!(s.rt(), 7.0);
        assert_eq!(s.outage_threshold(1.0), 15.0);
    }

    #[test]
    fn single_port_reductions() {
        let s = scenario((1, 1), (1, 1), 2.0, 0.5, 1.0);
        for g in [0.0, 0.3, 5.0, 40.0] {
            let fb = cdf_gamma_b(g, &s).unwrap();
            assert_eq!(fb.value, cdf_a2(g / 2.0, s.bob.clt()));
            let fe = cdf_gamma_e(g, &s).unwrap();
            assert!((fe.value - (1.0 - (-g / (6.0 * 0.5)).exp())).abs() < 1e-15);
        }
        let acc = MvnAccuracy::default();
        for g in [0.5, 10.0, 30.0] {
            let exact = pdf_a2(g / 2.0, s.bob.clt()).unwrap() / 2.0;
            for mode in [PdfMode::Paper, PdfMode::Derivative] {
                let v = s.bob.pdf(g, mode, &acc).unwrap();
                assert!((v / exact - 1.0).abs() < 1e-4, "{mode:?} {g}: {v} vs {exact}");
            }
            let exact_e = (-g / 3.0).exp() / 3.0;
            for mode in [PdfMode::Paper, PdfMode::Derivative] {
                let v = s.eve.pdf(g, mode, &acc).unwrap();
                assert!((v / exact_e - 1.0).abs() < 1e-4, "{mode:?} {g}: {v} vs {exact_e}");
            }
        }
        assert!((s.eve.pdf(0.0, PdfMode::Paper, &acc).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(s.bob.pdf(0.0, PdfMode::Paper, &acc).is_err());
        assert!(s.bob.pdf(0.0, PdfMode::Derivative, &acc).is_err());
    }

    #[test]
    fn cdf_is_zero_at_origin() {
        let s = scenario((2, 2), (2, 2), 1.0, 1.0, 1.0);
        assert_eq!(cdf_gamma_b(0.0, &s).unwrap().value, 0.0);
        assert_eq!(cdf_gamma_e(0.0, &s).unwrap().value, 0.0);
        assert!(cdf_gamma_b(-1.0, &s).is_err());
    }

    #[test]
    fn vanishing_eavesdropper() {
        let s = scenario((2, 2), (2, 2), 1.0, 1e-9, 0.0);
        for path in [SopPath::Glq, SopPath::Reference] {
            let r = sop(&s, path).unwrap();
            assert!(r.value < 1e-6, "{path:?}: {r:?}");
        }
    }

    #[test]
    fn paths_agree_single_port() {
        // one port each and a strong eavesdropper: the GLQ weight is benign
        let mut s = scenario((1, 1), (1, 1), 1.0, 1.0, 1.0);
        s.glq_order = 32;
        let glq = sop(&s, SopPath::Glq).unwrap();
        let reference = sop(&s, SopPath::Reference).unwrap();
        assert!((glq.value / reference.value - 1.0).abs() < 1e-3, "{glq:?} {reference:?}");
    }

    #[test]
    fn rejects_invalid_scenario() {
        let mut s = scenario((1, 1), (1, 1), 1.0, 1.0, 1.0);
        s.rate_bits = -1.0;
        assert!(sop(&s, SopPath::Glq).is_err());
        s.rate_bits = 1.0;
        s.glq_order = 0;
        assert!(sop(&s, SopPath::Glq).is_err());
    }
}
