//! Command-line front end: configuration, sweeps and table output.
//!
//! ```text
//! risfas analyze  --config sweep.toml --out sop.csv
//! risfas validate --config sweep.toml --format json --out -
//! ```

pub mod config;
pub mod sweep;
pub mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use config::{load_config, parse_config, OutputKind, ResolvedConfig, SweepAxis};
pub use sweep::{run_sweep, Command, Meta};
pub use table::{Cell, Format, Row, Table};

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "risfas", version, about = "Secrecy outage of RIS-aided fluid-antenna wiretap channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Analytic SOP sweep (GLQ and reference integration).
    Analyze(RunArgs),
    /// Monte Carlo SOP sweep.
    Simulate(RunArgs),
    /// Analytic versus Monte Carlo comparison with KS distances.
    Validate(RunArgs),
    /// CDF and PDF tables of the selected-port SNRs.
    Dist(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// TOML configuration; the reference scenario when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output path, `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Master seed, overriding the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Gauss–Laguerre order, overriding the configuration.
    #[arg(long)]
    pub glq_order: Option<usize>,
}

impl CliCommand {
    pub fn parts(&self) -> (Command, &RunArgs) {
        match self {
            CliCommand::Analyze(a) => (Command::Analyze, a),
            CliCommand::Simulate(a) => (Command::Simulate, a),
            CliCommand::Validate(a) => (Command::Validate, a),
            CliCommand::Dist(a) => (Command::Dist, a),
        }
    }
}

/// Loads the configuration and applies command-line overrides.
pub fn resolve(args: &RunArgs) -> Result<ResolvedConfig> {
    let mut cfg = match &args.config {
        Some(p) => load_config(p)?,
        None => parse_config("")?,
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
        cfg.mvn.seed = seed;
        cfg.defaulted.retain(|f| f != "seed");
    }
    if let Some(k) = args.glq_order {
        cfg.glq_order = k;
        cfg.defaulted.retain(|f| f != "glq_order");
    }
    cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(cfg)
}

fn emit(table: &Table, format: Format, meta: &Meta<'_>, out: &PathBuf) -> Result<()> {
    if out.as_os_str() == "-" {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        table.write(format, meta, &mut lock)?;
        lock.flush()?;
    } else {
        let f = File::create(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
        let mut w = BufWriter::new(f);
        table.write(format, meta, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let (cmd, args) = cli.command.parts();
    let cfg = match resolve(args) {
        Ok(c) => c,
        Err(e) => {
            log::error!("{e}");
            return EXIT_CONFIG;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            log::error!("thread pool: {e}");
            return EXIT_CONFIG;
        }
    };
    let table = match pool.install(|| run_sweep(cmd, &cfg)) {
        Ok(t) => t,
        Err(e) => {
            log::error!("{e}");
            return EXIT_NUMERICAL;
        }
    };
    let format = match args.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let meta = Meta::new(cmd, &cfg);
    if let Err(e) = emit(&table, format, &meta, &args.out) {
        log::error!("{e}");
        return EXIT_CONFIG;
    }
    if table.has_flag("error=") {
        log::error!("one or more sweep points failed; see the flags column");
        return EXIT_NUMERICAL;
    }
    EXIT_OK
}
