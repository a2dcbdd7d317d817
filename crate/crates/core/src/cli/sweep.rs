//! Sweep orchestration for the four subcommands.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{OutputKind, ResolvedConfig};
use super::table::{Cell, Row, Table};
use crate::error::Result;
use crate::mc::{derive_seed, empirical_snr_cdf, empirical_sop, EmpiricalDistribution, SopEstimate};
use crate::secrecy::{sop, NodeKind, NodeModel, PdfMode, SecrecyScenario, SopPath, SopResult};

/// Grid size for the analytic-vs-empirical KS bound.
pub const KS_GRID_POINTS: usize = 500;

/// Order of the high-order GLQ column reported next to the configured one.
pub const GLQ_HIGH_ORDER: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Analyze,
    Simulate,
    Validate,
    Dist,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointSeeds {
    pub axis_value: f64,
    pub mvn: u64,
    pub mc: u64,
}

pub fn point_seeds(cfg: &ResolvedConfig) -> Vec<PointSeeds> {
    cfg.sweep
        .values
        .iter()
        .enumerate()
        .map(|(i, &x)| PointSeeds {
            axis_value: x,
            mvn: derive_seed(cfg.seed, 2 * i as u64),
            mc: derive_seed(cfg.seed, 2 * i as u64 + 1),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta<'a> {
    pub command: Command,
    pub version: &'static str,
    pub timestamp_unix: u64,
    pub eve_snr_mode: &'static str,
    pub axis: &'static str,
    pub axis_values_note: &'static str,
    pub config: &'a ResolvedConfig,
    pub defaulted_fields: &'a [String],
    pub seeds: Vec<PointSeeds>,
}

impl<'a> Meta<'a> {
    pub fn new(command: Command, cfg: &'a ResolvedConfig) -> Self {
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Meta {
            command,
            version: env!("CARGO_PKG_VERSION"),
            timestamp_unix,
            eve_snr_mode: cfg.eve_snr_mode(),
            axis: cfg.sweep.axis.name(),
            axis_values_note: "axis ranges for figure reproduction are read off the published plots and are approximate",
            config: cfg,
            defaulted_fields: &cfg.defaulted,
            seeds: point_seeds(cfg),
        }
    }
}

fn analyze_outputs(cfg: &ResolvedConfig) -> Vec<OutputKind> {
    let mut out = match &cfg.sweep.outputs {
        Some(o) => o
            .iter()
            .copied()
            .filter(|k| matches!(k, OutputKind::SopGlq | OutputKind::SopReference | OutputKind::SopMc))
            .collect(),
        None => vec![OutputKind::SopGlq, OutputKind::SopReference],
    };
    out.sort();
    out.dedup();
    out
}

fn dist_outputs(cfg: &ResolvedConfig) -> (bool, bool, bool) {
    match &cfg.sweep.outputs {
        Some(o) => (
            o.contains(&OutputKind::CdfTable),
            o.contains(&OutputKind::PdfTable),
            o.contains(&OutputKind::SopMc),
        ),
        None => (true, true, false),
    }
}

pub fn columns(cmd: Command, cfg: &ResolvedConfig) -> Vec<String> {
    let mut c = vec![cfg.sweep.axis.name().to_string(), "avg_snr_e_db".to_string()];
    let mut add = |names: &[&str]| c.extend(names.iter().map(|s| s.to_string()));
    match cmd {
        Command::Analyze => {
            for k in analyze_outputs(cfg) {
                match k {
                    OutputKind::SopGlq => add(&["sop_glq", "sop_glq_err", "sop_glq_k16"]),
                    OutputKind::SopReference => add(&["sop_reference", "sop_reference_err"]),
                    OutputKind::SopMc => add(&["sop_mc", "sop_mc_ci_low", "sop_mc_ci_high"]),
                    _ => {}
                }
            }
        }
        Command::Simulate => add(&["sop_mc", "sop_mc_ci_low", "sop_mc_ci_high", "outages", "trials"]),
        Command::Validate => add(&[
            "ks_b",
            "ks_e",
            "sop_reference",
            "sop_reference_err",
            "sop_mc",
            "sop_mc_ci_low",
            "sop_mc_ci_high",
            "rel_err",
        ]),
        Command::Dist => {
            let (cdf, pdf, mc) = dist_outputs(cfg);
            add(&["node", "gamma"]);
            if cdf {
                add(&["cdf", "cdf_err"]);
            }
            if pdf {
                add(&["pdf_paper", "pdf_derivative"]);
            }
            if mc {
                add(&["cdf_mc"]);
            }
        }
    }
    c
}

/// Evaluates every axis point of `cfg` and returns the rows in axis order.
pub fn run_sweep(cmd: Command, cfg: &ResolvedConfig) -> Result<Table> {
    let mut table = Table::new(columns(cmd, cfg));
    let seeds = point_seeds(cfg);
    let per_point: Vec<Vec<Row>> = seeds
        .par_iter()
        .map(|s| {
            log::info!("{:?}: {} = {}", cmd, cfg.sweep.axis.name(), s.axis_value);
            let start = Instant::now();
            let mut rows = match cmd {
                Command::Dist => dist_point(cfg, s),
                _ => vec![sop_point(cmd, cfg, s)],
            };
            let elapsed = start.elapsed().as_secs_f64() / rows.len().max(1) as f64;
            for r in &mut rows {
                r.wall_time_s = elapsed;
            }
            rows
        })
        .collect();
    for row in per_point.into_iter().flatten() {
        table.push(row)?;
    }
    Ok(table)
}

struct RowBuilder {
    cells: Vec<Cell>,
    flags: Vec<String>,
}

impl RowBuilder {
    fn new(axis_value: f64) -> Self {
        RowBuilder {
            cells: vec![Cell::Num(axis_value)],
            flags: Vec::new(),
        }
    }

    fn error(&mut self, what: &str, e: &crate::Error) {
        let msg = e.to_string().replace([';', '\n'], " ");
        log::error!("{what}: {msg}");
        self.flags.push(format!("error={what}: {msg}"));
    }

    fn empty(&mut self, n: usize) {
        self.cells.extend(std::iter::repeat_n(Cell::Empty, n));
    }

    fn sop(&mut self, name: &str, r: &SopResult) {
        self.cells.push(Cell::Prob(r.value));
        self.cells.push(Cell::Prob(r.error));
        if r.below_floor {
            self.flags.push(format!("{name}:below_numerical_floor"));
        }
        if r.mvn_warnings > 0 {
            self.flag("mvn_accuracy_warning");
        }
    }

    fn mc(&mut self, e: &SopEstimate) {
        self.cells.push(Cell::Prob(e.estimate));
        self.cells.push(Cell::Prob(e.ci_low));
        self.cells.push(Cell::Prob(e.ci_high));
        if e.zero_outages {
            self.flag("sop_mc:zero_outages");
        }
    }

    fn flag(&mut self, f: &str) {
        if !self.flags.iter().any(|x| x == f) {
            self.flags.push(f.to_string());
        }
    }

    fn finish(self) -> Row {
        Row {
            cells: self.cells,
            flags: self.flags,
            wall_time_s: 0.0,
        }
    }
}

fn scenario_row(cfg: &ResolvedConfig, seeds: &PointSeeds, b: &mut RowBuilder) -> Option<SecrecyScenario> {
    match cfg.point(seeds.axis_value) {
        Ok(p) => b.cells.push(Cell::Num(p.avg_snr_e_db)),
        Err(e) => {
            b.cells.push(Cell::Empty);
            b.error("scenario", &e);
            return None;
        }
    }
    match cfg.scenario(seeds.axis_value, seeds.mvn) {
        Ok(s) => {
            if s.bob.corr().is_ill_conditioned() || s.eve.corr().is_ill_conditioned() {
                b.flag("ill_conditioned_corr");
            }
            Some(s)
        }
        Err(e) => {
            b.error("scenario", &e);
            None
        }
    }
}

fn sop_point(cmd: Command, cfg: &ResolvedConfig, seeds: &PointSeeds) -> Row {
    let width = columns(cmd, cfg).len();
    let mut b = RowBuilder::new(seeds.axis_value);
    let Some(s) = scenario_row(cfg, seeds, &mut b) else {
        b.empty(width - b.cells.len());
        return b.finish();
    };
    let mc_cfg = cfg.mc_config(seeds.mc);
    match cmd {
        Command::Analyze => {
            for k in analyze_outputs(cfg) {
                match k {
                    OutputKind::SopGlq => glq_cells(&s, &mut b),
                    OutputKind::SopReference => match sop(&s, SopPath::Reference) {
                        Ok(r) => b.sop("sop_reference", &r),
                        Err(e) => {
                            b.error("sop_reference", &e);
                            b.empty(2);
                        }
                    },
                    OutputKind::SopMc => match empirical_sop(&s, &mc_cfg) {
                        Ok(e) => b.mc(&e),
                        Err(e) => {
                            b.error("sop_mc", &e);
                            b.empty(3);
                        }
                    },
                    _ => {}
                }
            }
        }
        Command::Simulate => match empirical_sop(&s, &mc_cfg) {
            Ok(e) => {
                b.mc(&e);
                b.cells.push(Cell::Int(e.outages));
                b.cells.push(Cell::Int(e.trials));
            }
            Err(e) => {
                b.error("sop_mc", &e);
                b.empty(5);
            }
        },
        Command::Validate => validate_cells(&s, cfg, seeds, &mut b),
        Command::Dist => unreachable!("dist rows are built per gamma"),
    }
    b.finish()
}

fn glq_cells(s: &SecrecyScenario, b: &mut RowBuilder) {
    match sop(s, SopPath::Glq) {
        Ok(r) => b.sop("sop_glq", &r),
        Err(e) => {
            b.error("sop_glq", &e);
            b.empty(2);
        }
    }
    let high = SecrecyScenario {
        glq_order: GLQ_HIGH_ORDER,
        ..s.clone()
    };
    match sop(&high, SopPath::Glq) {
        Ok(r) => {
            b.cells.push(Cell::Prob(r.value));
            if r.below_floor {
                b.flag("sop_glq_k16:below_numerical_floor");
            }
        }
        Err(e) => {
            b.error("sop_glq_k16", &e);
            b.empty(1);
        }
    }
}

fn ks_to_model(node: &NodeModel, cfg: &ResolvedConfig, seed: u64, s: &SecrecyScenario) -> Result<f64> {
    let mc = cfg.mc_config(seed);
    let emp = empirical_snr_cdf(node, &mc)?;
    emp.ks_bound(KS_GRID_POINTS, |x| node.cdf(x, &s.mvn_acc).map(|e| e.value))
}

fn validate_cells(s: &SecrecyScenario, cfg: &ResolvedConfig, seeds: &PointSeeds, b: &mut RowBuilder) {
    for (name, node, salt) in [("ks_b", &s.bob, 0), ("ks_e", &s.eve, 1)] {
        match ks_to_model(node, cfg, derive_seed(seeds.mc, salt), s) {
            Ok(d) => b.cells.push(Cell::Prob(d)),
            Err(e) => {
                b.error(name, &e);
                b.empty(1);
            }
        }
    }
    let reference = match sop(s, SopPath::Reference) {
        Ok(r) => {
            b.sop("sop_reference", &r);
            Some(r.value)
        }
        Err(e) => {
            b.error("sop_reference", &e);
            b.empty(2);
            None
        }
    };
    let mc = match empirical_sop(s, &cfg.mc_config(seeds.mc)) {
        Ok(e) => {
            b.mc(&e);
            Some(e.estimate)
        }
        Err(e) => {
            b.error("sop_mc", &e);
            b.empty(3);
            None
        }
    };
    match (reference, mc) {
        (Some(r), Some(m)) if m > 0.0 => b.cells.push(Cell::Prob((r - m).abs() / m)),
        _ => b.empty(1),
    }
}

/// Upper end of the default `dist` grid.
pub fn default_gamma_max(node: &NodeModel) -> f64 {
    let clt = node.clt();
    let gain = match node.kind() {
        NodeKind::Legitimate => (clt.mean + 5.0 * clt.variance.sqrt()).powi(2),
        NodeKind::Eavesdropper => clt.variance * ((node.ports() as f64).ln() + 6.0),
    };
    node.avg_snr() * gain
}

fn dist_point(cfg: &ResolvedConfig, seeds: &PointSeeds) -> Vec<Row> {
    let width = columns(Command::Dist, cfg).len();
    let (want_cdf, want_pdf, want_mc) = dist_outputs(cfg);
    let mut head = RowBuilder::new(seeds.axis_value);
    let Some(s) = scenario_row(cfg, seeds, &mut head) else {
        head.empty(width - head.cells.len());
        return vec![head.finish()];
    };
    let mut rows = Vec::new();
    for (label, node, gmax, salt) in [
        ("b", &s.bob, cfg.dist.gamma_max_b, 0),
        ("e", &s.eve, cfg.dist.gamma_max_e, 1),
    ] {
        let gmax = gmax.unwrap_or_else(|| default_gamma_max(node));
        let emp: Option<std::result::Result<EmpiricalDistribution, crate::Error>> =
            want_mc.then(|| empirical_snr_cdf(node, &cfg.mc_config(derive_seed(seeds.mc, salt))));
        for k in 1..=cfg.dist.points {
            let gamma = gmax * k as f64 / cfg.dist.points as f64;
            let mut b = RowBuilder {
                cells: head.cells.clone(),
                flags: head.flags.clone(),
            };
            b.cells.push(Cell::Text(label.to_string()));
            b.cells.push(Cell::Num(gamma));
            if want_cdf {
                match node.cdf(gamma, &s.mvn_acc) {
                    Ok(e) => {
                        b.cells.push(Cell::Prob(e.value));
                        b.cells.push(Cell::Prob(e.error));
                        if !e.converged {
                            b.flag("mvn_accuracy_warning");
                        }
                    }
                    Err(e) => {
                        b.error("cdf", &e);
                        b.empty(2);
                    }
                }
            }
            if want_pdf {
                for (name, mode) in [("pdf_paper", PdfMode::Paper), ("pdf_derivative", PdfMode::Derivative)] {
                    match node.pdf(gamma, mode, &s.mvn_acc) {
                        Ok(v) => b.cells.push(Cell::Prob(v)),
                        Err(e) => {
                            b.error(name, &e);
                            b.empty(1);
                        }
                    }
                }
            }
            if let Some(emp) = &emp {
                match emp {
                    Ok(d) => b.cells.push(Cell::Prob(d.cdf(gamma))),
                    Err(e) => {
                        b.error("cdf_mc", e);
                        b.empty(1);
                    }
                }
            }
            rows.push(b.finish());
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::parse_config;

    #[test]
    fn two_point_glq_sweep() {
        let cfg = parse_config(
            "avg_snr_b_db = 0.0\navg_snr_e_db = 0.0\nrate_bits = 0.5\n[sweep]\naxis = \"avg_snr_b_db\"\nvalues = [0.0, 5.0]\noutputs = [\"sop_glq\"]",
        )
        .unwrap();
        let t = run_sweep(Command::Analyze, &cfg).unwrap();
        assert_eq!(t.columns, ["avg_snr_b_db", "avg_snr_e_db", "sop_glq", "sop_glq_err", "sop_glq_k16"]);
        assert_eq!(t.rows.len(), 2);
        let sop = |r: &Row| match r.cells[4] {
            Cell::Prob(v) => v,
            _ => panic!("missing value"),
        };
        assert!(sop(&t.rows[0]) > sop(&t.rows[1]));
    }

    #[test]
    fn seeds_differ_per_point() {
        let cfg = parse_config("[sweep]\nvalues = [1.0, 2.0, 3.0]").unwrap();
        let s = point_seeds(&cfg);
        assert_eq!(s.len(), 3);
        assert_ne!(s[0].mvn, s[1].mvn);
        assert_ne!(s[0].mvn, s[0].mc);
    }

    #[test]
    fn dist_rows_per_node() {
        let cfg = parse_config("avg_snr_e_db = 0.0\n[dist]\npoints = 3\n[sweep]\noutputs = [\"cdf_table\"]").unwrap();
        let t = run_sweep(Command::Dist, &cfg).unwrap();
        assert_eq!(t.rows.len(), 6);
        assert_eq!(t.columns.last().unwrap(), "cdf_err");
        assert!(t.rows.iter().all(|r| r.flags.is_empty()));
    }
}
