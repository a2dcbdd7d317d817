//! TOML configuration: parsing, defaults and resolution into scenarios.
//!
//! Every field is optional. Unset fields take the reference scenario values
//! and are listed in [`ResolvedConfig::defaulted`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{db_to_linear, linear_to_db, LinkBudget};
use crate::error::{Error, Result};
use crate::geometry::{PortGrid, DEFAULT_EIGEN_FLOOR};
use crate::mc::{Fidelity, McConfig};
use crate::numerics::{MvnAccuracy, MAX_LAGUERRE_ORDER};
use crate::secrecy::{NodeKind, NodeModel, SecrecyScenario};

pub const DEFAULT_SEED: u64 = 0x5EED_0F_C0FA;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub ris_elements: Option<u32>,
    pub rate_bits: Option<f64>,
    pub glq_order: Option<usize>,
    pub eps_floor: Option<f64>,
    pub avg_snr_b_db: Option<f64>,
    pub avg_snr_e_db: Option<f64>,
    pub seed: Option<u64>,
    pub ports_b: Option<usize>,
    pub grid_b: Option<[usize; 2]>,
    pub area_b: Option<f64>,
    pub w_b: Option<[f64; 2]>,
    pub ports_e: Option<usize>,
    pub grid_e: Option<[usize; 2]>,
    pub area_e: Option<f64>,
    pub w_e: Option<[f64; 2]>,
    pub link: Option<RawLink>,
    pub mvn: Option<RawMvn>,
    pub sweep: Option<RawSweep>,
    pub mc: Option<RawMc>,
    pub dist: Option<RawDist>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLink {
    pub dist_ar_m: Option<f64>,
    pub dist_b_m: Option<f64>,
    pub dist_e_m: Option<f64>,
    pub pathloss_exp: Option<f64>,
    pub noise_b_dbm: Option<f64>,
    pub noise_e_dbm: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMvn {
    pub abs_target: Option<f64>,
    pub rel_target: Option<f64>,
    pub max_evals: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    pub axis: Option<SweepAxis>,
    pub values: Option<Vec<f64>>,
    pub outputs: Option<Vec<OutputKind>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMc {
    pub trials: Option<u64>,
    pub fidelity: Option<Fidelity>,
    pub batch: Option<usize>,
    pub eve_ris_phases: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDist {
    pub points: Option<usize>,
    pub gamma_max_b: Option<f64>,
    pub gamma_max_e: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    AvgSnrBDb,
    RisElements,
    PortsB,
    AreaB,
    PortsE,
    AreaE,
    RateBits,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::AvgSnrBDb => "avg_snr_b_db",
            SweepAxis::RisElements => "ris_elements",
            SweepAxis::PortsB => "ports_b",
            SweepAxis::AreaB => "area_b",
            SweepAxis::PortsE => "ports_e",
            SweepAxis::AreaE => "area_e",
            SweepAxis::RateBits => "rate_bits",
        }
    }

    fn is_integer(self) -> bool {
        matches!(self, SweepAxis::RisElements | SweepAxis::PortsB | SweepAxis::PortsE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    SopGlq,
    SopReference,
    SopMc,
    CdfTable,
    PdfTable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkConfig {
    pub dist_ar_m: f64,
    pub dist_b_m: f64,
    pub dist_e_m: f64,
    pub pathloss_exp: f64,
    pub noise_b_dbm: f64,
    pub noise_e_dbm: f64,
}

impl LinkConfig {
    fn budget(&self, kind: NodeKind, power_dbm: f64) -> LinkBudget {
        let (dist, noise) = match kind {
            NodeKind::Legitimate => (self.dist_b_m, self.noise_b_dbm),
            NodeKind::Eavesdropper => (self.dist_e_m, self.noise_e_dbm),
        };
        LinkBudget {
            power_dbm,
            noise_dbm: noise,
            dist_ar_m: self.dist_ar_m,
            dist_rn_m: dist,
            pathloss_exp: self.pathloss_exp,
        }
    }

    /// Eavesdropper average SNR (dB) at the transmit power that gives the
    /// legitimate node `avg_snr_b_db`.
    pub fn derived_eve_snr_db(&self, avg_snr_b_db: f64) -> Result<f64> {
        let power = self.budget(NodeKind::Legitimate, 0.0).power_for_avg_snr_db(avg_snr_b_db);
        let eve = self.budget(NodeKind::Eavesdropper, power);
        Ok(linear_to_db(crate::channel::avg_snr(&eve)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeConfig {
    pub grid: [usize; 2],
    /// Aperture side lengths in wavelengths.
    pub w: [f64; 2],
}

impl NodeConfig {
    pub fn ports(&self) -> usize {
        self.grid[0] * self.grid[1]
    }

    pub fn port_grid(&self) -> Result<PortGrid> {
        PortGrid::new(self.grid[0], self.grid[1], self.w[0], self.w[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSection {
    pub trials: u64,
    pub fidelity: Fidelity,
    pub batch: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eve_ris_phases: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistConfig {
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_max_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_max_e: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<OutputKind>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub ris_elements: u32,
    pub rate_bits: f64,
    pub glq_order: usize,
    pub eps_floor: f64,
    pub avg_snr_b_db: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub avg_snr_e_db: Option<f64>,
    pub seed: u64,
    pub bob: NodeConfig,
    pub eve: NodeConfig,
    pub link: LinkConfig,
    pub mvn: MvnAccuracy,
    pub sweep: SweepConfig,
    pub mc: McSection,
    pub dist: DistConfig,
    /// Dotted names of fields that took their default value.
    #[serde(skip)]
    pub defaulted: Vec<String>,
}

struct Defaults(Vec<String>);

impl Defaults {
    fn pick<T>(&mut self, v: Option<T>, default: T, name: &str) -> T {
        match v {
            Some(v) => v,
            None => {
                self.0.push(name.to_string());
                default
            }
        }
    }
}

/// `(n1, n2)` with `n1 ≤ n2`, `n1·n2 = n` and `n1` as large as possible.
pub fn most_square_grid(n: usize) -> [usize; 2] {
    let mut n1 = (n as f64).sqrt().floor() as usize;
    while n1 > 1 && n % n1 != 0 {
        n1 -= 1;
    }
    let n1 = n1.max(1);
    [n1, n / n1]
}

fn area_to_sides(area: f64, field: &str) -> Result<[f64; 2]> {
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::param(field, format!("must be finite and > 0, got {area}")));
    }
    let side = area.sqrt();
    Ok([side, side])
}

fn resolve_node(
    d: &mut Defaults,
    suffix: &str,
    ports: Option<usize>,
    grid: Option<[usize; 2]>,
    area: Option<f64>,
    w: Option<[f64; 2]>,
) -> Result<NodeConfig> {
    let grid = match (ports, grid) {
        (Some(n), Some(g)) => {
            if g[0] * g[1] != n {
                return Err(Error::param(
                    format!("grid_{suffix}"),
                    format!("{}x{} does not have ports_{suffix} = {n} ports", g[0], g[1]),
                ));
            }
            g
        }
        (None, Some(g)) => {
            d.0.push(format!("ports_{suffix}"));
            g
        }
        (Some(n), None) => {
            if n == 0 {
                return Err(Error::param(format!("ports_{suffix}"), "must be >= 1"));
            }
            d.0.push(format!("grid_{suffix}"));
            most_square_grid(n)
        }
        (None, None) => {
            d.0.push(format!("ports_{suffix}"));
            d.0.push(format!("grid_{suffix}"));
            [2, 2]
        }
    };
    let w = match (area, w) {
        (Some(_), Some(_)) => {
            return Err(Error::param(format!("area_{suffix}"), format!("set either area_{suffix} or w_{suffix}, not both")))
        }
        (Some(a), None) => area_to_sides(a, &format!("area_{suffix}"))?,
        (None, Some(w)) => w,
        (None, None) => {
            d.0.push(format!("area_{suffix}"));
            [1.0, 1.0]
        }
    };
    let node = NodeConfig { grid, w };
    node.port_grid().map_err(|e| Error::param(format!("grid_{suffix}"), e.to_string()))?;
    Ok(node)
}

impl ResolvedConfig {
    pub fn defaults() -> Self {
        ResolvedConfig::resolve(RawConfig::default()).expect("defaults are valid")
    }

    pub fn resolve(raw: RawConfig) -> Result<Self> {
        let mut d = Defaults(Vec::new());
        let ris_elements = d.pick(raw.ris_elements, 6, "ris_elements");
        let rate_bits = d.pick(raw.rate_bits, 3.0, "rate_bits");
        let glq_order = d.pick(raw.glq_order, 2, "glq_order");
        let eps_floor = d.pick(raw.eps_floor, DEFAULT_EIGEN_FLOOR, "eps_floor");
        let avg_snr_b_db = d.pick(raw.avg_snr_b_db, 2.0, "avg_snr_b_db");
        let avg_snr_e_db = raw.avg_snr_e_db;
        let seed = d.pick(raw.seed, DEFAULT_SEED, "seed");
        let bob = resolve_node(&mut d, "b", raw.ports_b, raw.grid_b, raw.area_b, raw.w_b)?;
        let eve = resolve_node(&mut d, "e", raw.ports_e, raw.grid_e, raw.area_e, raw.w_e)?;

        let rl = raw.link.unwrap_or_default();
        let link = LinkConfig {
            dist_ar_m: d.pick(rl.dist_ar_m, 100.0, "link.dist_ar_m"),
            dist_b_m: d.pick(rl.dist_b_m, 500.0, "link.dist_b_m"),
            dist_e_m: d.pick(rl.dist_e_m, 800.0, "link.dist_e_m"),
            pathloss_exp: d.pick(rl.pathloss_exp, 2.1, "link.pathloss_exp"),
            noise_b_dbm: d.pick(rl.noise_b_dbm, -70.0, "link.noise_b_dbm"),
            noise_e_dbm: d.pick(rl.noise_e_dbm, -50.0, "link.noise_e_dbm"),
        };

        let rm = raw.mvn.unwrap_or_default();
        let dm = MvnAccuracy::default();
        let mvn = MvnAccuracy {
            abs_target: d.pick(rm.abs_target, dm.abs_target, "mvn.abs_target"),
            rel_target: d.pick(rm.rel_target, dm.rel_target, "mvn.rel_target"),
            max_evals: d.pick(rm.max_evals, dm.max_evals, "mvn.max_evals"),
            seed,
        };

        let rs = raw.sweep.unwrap_or_default();
        let axis = d.pick(rs.axis, SweepAxis::AvgSnrBDb, "sweep.axis");
        let values = match rs.values {
            Some(v) => v,
            None => {
                d.0.push("sweep.values".into());
                vec![current_axis_value(axis, ris_elements, rate_bits, avg_snr_b_db, &bob, &eve)]
            }
        };
        let sweep = SweepConfig {
            axis,
            values,
            outputs: rs.outputs,
        };

        let rmc = raw.mc.unwrap_or_default();
        let dmc = McConfig::default();
        let mc = McSection {
            trials: d.pick(rmc.trials, dmc.trials, "mc.trials"),
            fidelity: d.pick(rmc.fidelity, dmc.fidelity, "mc.fidelity"),
            batch: d.pick(rmc.batch, dmc.batch, "mc.batch"),
            eve_ris_phases: rmc.eve_ris_phases,
        };

        let rd = raw.dist.unwrap_or_default();
        let dist = DistConfig {
            points: d.pick(rd.points, 50, "dist.points"),
            gamma_max_b: rd.gamma_max_b,
            gamma_max_e: rd.gamma_max_e,
        };

        let cfg = ResolvedConfig {
            ris_elements,
            rate_bits,
            glq_order,
            eps_floor,
            avg_snr_b_db,
            avg_snr_e_db,
            seed,
            bob,
            eve,
            link,
            mvn,
            sweep,
            mc,
            dist,
            defaulted: d.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ris_elements == 0 {
            return Err(Error::param("ris_elements", "must be >= 1"));
        }
        if !(self.rate_bits >= 0.0 && self.rate_bits.is_finite()) {
            return Err(Error::param("rate_bits", "must be finite and >= 0"));
        }
        if !(1..=MAX_LAGUERRE_ORDER).contains(&self.glq_order) {
            return Err(Error::param("glq_order", format!("must lie in 1..={MAX_LAGUERRE_ORDER}")));
        }
        if !(self.eps_floor >= 0.0 && self.eps_floor < 1.0) {
            return Err(Error::param("eps_floor", "must lie in [0, 1)"));
        }
        if !self.avg_snr_b_db.is_finite() || self.avg_snr_e_db.is_some_and(|v| !v.is_finite()) {
            return Err(Error::param("avg_snr_b_db/avg_snr_e_db", "must be finite"));
        }
        self.link.budget(NodeKind::Legitimate, 0.0).validate().map_err(|e| prefix_link(e))?;
        self.link.budget(NodeKind::Eavesdropper, 0.0).validate().map_err(|e| prefix_link(e))?;
        self.mvn.validate()?;
        if self.sweep.values.is_empty() {
            return Err(Error::param("sweep.values", "must be non-empty"));
        }
        let v = &self.sweep.values;
        let increasing = v.windows(2).all(|p| p[0] < p[1]);
        let decreasing = v.windows(2).all(|p| p[0] > p[1]);
        if !(increasing || decreasing) {
            return Err(Error::param("sweep.values", "must be strictly monotone"));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("sweep.values", "must be finite"));
        }
        if self.sweep.axis.is_integer() && v.iter().any(|x| *x < 1.0 || x.fract() != 0.0) {
            return Err(Error::param("sweep.values", format!("{} values must be positive integers", self.sweep.axis.name())));
        }
        self.mc_config(0).validate()?;
        if self.dist.points == 0 {
            return Err(Error::param("dist.points", "must be >= 1"));
        }
        for (name, g) in [("dist.gamma_max_b", self.dist.gamma_max_b), ("dist.gamma_max_e", self.dist.gamma_max_e)] {
            if g.is_some_and(|g| !(g > 0.0 && g.is_finite())) {
                return Err(Error::param(name, "must be finite and > 0"));
            }
        }
        // every axis point must build
        for &x in v {
            self.point(x)?;
        }
        Ok(())
    }

    pub fn eve_snr_mode(&self) -> &'static str {
        if self.avg_snr_e_db.is_some() {
            "explicit"
        } else {
            "derived_link_budget"
        }
    }

    pub fn mc_config(&self, seed: u64) -> McConfig {
        McConfig {
            trials: self.mc.trials,
            seed,
            fidelity: self.mc.fidelity,
            batch: self.mc.batch,
            eve_ris_phases: self.mc.eve_ris_phases.clone(),
        }
    }

    /// Configuration with the swept axis set to `x`.
    pub fn point(&self, x: f64) -> Result<PointConfig> {
        let mut p = PointConfig {
            ris_elements: self.ris_elements,
            rate_bits: self.rate_bits,
            avg_snr_b_db: self.avg_snr_b_db,
            avg_snr_e_db: 0.0,
            bob: self.bob.clone(),
            eve: self.eve.clone(),
        };
        match self.sweep.axis {
            SweepAxis::AvgSnrBDb => p.avg_snr_b_db = x,
            SweepAxis::RisElements => p.ris_elements = x as u32,
            SweepAxis::RateBits => p.rate_bits = x,
            SweepAxis::PortsB => p.bob.grid = most_square_grid(x as usize),
            SweepAxis::PortsE => p.eve.grid = most_square_grid(x as usize),
            SweepAxis::AreaB => p.bob.w = area_to_sides(x, "sweep.values")?,
            SweepAxis::AreaE => p.eve.w = area_to_sides(x, "sweep.values")?,
        }
        if p.rate_bits < 0.0 {
            return Err(Error::param("rate_bits", "must be >= 0"));
        }
        p.avg_snr_e_db = match self.avg_snr_e_db {
            Some(e) => e,
            None => self.link.derived_eve_snr_db(p.avg_snr_b_db)?,
        };
        p.bob.port_grid()?;
        p.eve.port_grid()?;
        Ok(p)
    }

    /// Scenario at axis value `x` with MVN seed `mvn_seed`.
    pub fn scenario(&self, x: f64, mvn_seed: u64) -> Result<SecrecyScenario> {
        self.point(x)?.scenario(self.glq_order, self.eps_floor, self.mvn.with_seed(mvn_seed))
    }
}

fn prefix_link(e: Error) -> Error {
    match e {
        Error::InvalidParameter { field, reason } => Error::InvalidParameter {
            field: format!("link.{field}"),
            reason,
        },
        other => other,
    }
}

fn current_axis_value(axis: SweepAxis, m: u32, rate: f64, snr_b: f64, bob: &NodeConfig, eve: &NodeConfig) -> f64 {
    match axis {
        SweepAxis::AvgSnrBDb => snr_b,
        SweepAxis::RisElements => m as f64,
        SweepAxis::RateBits => rate,
        SweepAxis::PortsB => bob.ports() as f64,
        SweepAxis::PortsE => eve.ports() as f64,
        SweepAxis::AreaB => bob.w[0] * bob.w[1],
        SweepAxis::AreaE => eve.w[0] * eve.w[1],
    }
}

/// Scenario parameters of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    pub ris_elements: u32,
    pub rate_bits: f64,
    pub avg_snr_b_db: f64,
    pub avg_snr_e_db: f64,
    pub bob: NodeConfig,
    pub eve: NodeConfig,
}

impl PointConfig {
    pub fn scenario(&self, glq_order: usize, eps_floor: f64, acc: MvnAccuracy) -> Result<SecrecyScenario> {
        let m = self.ris_elements;
        let bob = NodeModel::new(
            NodeKind::Legitimate,
            self.bob.port_grid()?,
            m,
            db_to_linear(self.avg_snr_b_db),
            eps_floor,
        )?;
        let eve = NodeModel::new(
            NodeKind::Eavesdropper,
            self.eve.port_grid()?,
            m,
            db_to_linear(self.avg_snr_e_db),
            eps_floor,
        )?;
        SecrecyScenario::new(m, bob, eve, self.rate_bits, glq_order, acc)
    }
}

pub fn parse_config(text: &str) -> Result<ResolvedConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    ResolvedConfig::resolve(raw).map_err(|e| match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    })
}

pub fn load_config(path: &Path) -> Result<ResolvedConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_reference_scenario() {
        let c = parse_config("").unwrap();
        assert_eq!(c.ris_elements, 6);
        assert_eq!(c.rate_bits, 3.0);
        assert_eq!(c.glq_order, 2);
        assert_eq!(c.bob.grid, [2, 2]);
        assert_eq!(c.eve.w, [1.0, 1.0]);
        assert_eq!(c.link.pathloss_exp, 2.1);
        assert_eq!(c.link.noise_e_dbm, -50.0);
        assert_eq!(c.sweep.values, vec![2.0]);
        assert_eq!(c.eve_snr_mode(), "derived_link_budget");
        let p = c.point(2.0).unwrap();
        assert!((p.avg_snr_e_db - (2.0 - 20.0 - 21.0 * 1.6f64.log10())).abs() < 1e-9);
        assert!(c.defaulted.contains(&"link.dist_ar_m".to_string()));
    }

    #[test]
    fn ports_and_grid() {
        let c = parse_config("ports_b = 8\ngrid_b = [2, 4]").unwrap();
        assert_eq!(c.bob.ports(), 8);
        assert_eq!(parse_config("ports_b = 8").unwrap().bob.grid, [2, 4]);
        assert!(parse_config("ports_b = 8\ngrid_b = [2, 2]").is_err());
        assert_eq!(most_square_grid(36), [6, 6]);
        assert_eq!(most_square_grid(7), [1, 7]);
        let a = parse_config("area_b = 4.0").unwrap();
        assert_eq!(a.bob.w, [2.0, 2.0]);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(parse_config("[link]\npathloss_exp = 1.5").is_err());
        let err = parse_config("bogus = 1").unwrap_err().to_string();
        assert!(err.contains("bogus") && err.contains("ris_elements"), "{err}");
        assert!(parse_config("[sweep]\nvalues = [1.0, 3.0, 2.0]").is_err());
        assert!(parse_config("[sweep]\naxis = \"ports_b\"\nvalues = [4.5]").is_err());
        assert!(parse_config("[sweep]\nvalues = []").is_err());
    }
}
