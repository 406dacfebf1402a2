//! `geomgate`: phases, closure times, and full-model validation for a
//! fiber-linked two-cavity geometric entangling gate.
//!
//! Every data command reads one JSON config (`--config`), computes, and
//! emits one machine-readable document (JSON by default, CSV on
//! request) that embeds the fully resolved configuration; re-running
//! from that embedded config reproduces the output byte for byte.
//!
//! Exit codes: 0 success; 1 usage, config, or IO error; 2 numeric
//! failure (parameter singularity, search failure, integrator
//! breakdown); 3 criteria failure in `reproduce-paper`.

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use geomgate_core::fullsim::FullsimError;
use geomgate_core::gatephase::GateError;
use geomgate_core::model::ModelError;

mod commands;
mod config;
mod document;
mod output;
mod sweep;

use config::{OutputFormat, RunConfig};
use output::{emit, sweep_csv, to_flat_csv, to_json};
use sweep::SweepAxis;

#[derive(Debug)]
pub enum CliError {
    /// Usage, configuration, or IO problem; exit code 1.
    Config(String),
    /// The computation itself failed; exit code 2.
    Numeric(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            CliError::Config(msg) | CliError::Numeric(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<GateError> for CliError {
    fn from(e: GateError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<FullsimError> for CliError {
    fn from(e: FullsimError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "geomgate",
    version,
    about = "Geometric entangling-gate phases for two fiber-linked atom-cavity systems"
)]
struct Cli {
    /// JSON run configuration (required by all data commands)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Force JSON output
    #[arg(long, global = true)]
    json: bool,
    /// Force CSV output
    #[arg(long, global = true, conflicts_with = "json")]
    csv: bool,
    /// Write the document to a file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Suppress stdout; exit codes and --out files still apply
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Effective couplings, displacement rates, mode detunings, regime report
    Couplings,
    /// Gate phases, entangling measure, residuals, and photon occupations at time_us
    Gate,
    /// Search for the best common loop-closure time up to t_max_us
    Closure,
    /// Integrate the full truncated model and compare with the effective phases
    Validate {
        /// Also scan the drive detunings at x1, x2, x4
        #[arg(long)]
        scan_delta: bool,
    },
    /// Evaluate the gate over a linear parameter grid
    Sweep {
        /// Grid axis as key=start:stop:count; repeat for a Cartesian product
        #[arg(long = "axis", value_name = "KEY=START:STOP:COUNT", required = true)]
        axis: Vec<String>,
    },
    /// Run the embedded published working point and check it criterion by criterion
    #[command(name = "reproduce-paper")]
    ReproducePaper,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version print to stdout and succeed; anything else
            // is a usage error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    if let Cmd::ReproducePaper = cli.command {
        return run_reproduce(&cli);
    }

    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("missing --config <path>".into()))?;
    let mut cfg = RunConfig::load(path)?;
    cfg.resolve();
    cfg.check()?;

    let format = if cli.csv {
        OutputFormat::Csv
    } else if cli.json {
        OutputFormat::Json
    } else {
        cfg.output_format
    };
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_path.clone().map(PathBuf::from));

    let (text, exit_code) = match &cli.command {
        Cmd::Couplings => {
            let doc = commands::cmd_couplings(&cfg)?;
            (render(&doc, format), 0)
        }
        Cmd::Gate => {
            let doc = commands::cmd_gate(&cfg)?;
            (render(&doc, format), 0)
        }
        Cmd::Closure => {
            let doc = commands::cmd_closure(&cfg)?;
            (render(&doc, format), 0)
        }
        Cmd::Validate { scan_delta } => {
            let doc = commands::cmd_validate(&cfg, *scan_delta)?;
            // A failed scan still emits the completed base comparison.
            let code = match &doc.result.delta_scan_error {
                Some(msg) => {
                    eprintln!("error: delta scan failed: {msg}");
                    2
                }
                None => 0,
            };
            (render(&doc, format), code)
        }
        Cmd::Sweep { axis } => {
            let axes = axis
                .iter()
                .map(|a| SweepAxis::parse(a))
                .collect::<Result<Vec<_>, _>>()?;
            let doc = document::Document {
                command: "sweep",
                resolved_config: cfg.clone(),
                result: sweep::run_sweep(&cfg, &axes)?,
            };
            let text = match format {
                OutputFormat::Json => to_json(&doc),
                OutputFormat::Csv => sweep_csv(&doc.result),
            };
            (text, 0)
        }
        Cmd::ReproducePaper => unreachable!("handled above"),
    };
    emit(&text, out.as_deref(), cli.quiet)?;
    Ok(exit_code)
}

fn run_reproduce(cli: &Cli) -> Result<i32, CliError> {
    if cli.config.is_some() {
        return Err(CliError::Config(
            "reproduce-paper embeds its parameters; --config is not accepted".into(),
        ));
    }
    let rep = commands::cmd_reproduce()?;
    let machine = if cli.csv {
        Some(to_flat_csv(&rep.document))
    } else if cli.json {
        Some(to_json(&rep.document))
    } else {
        None
    };
    match (&machine, &cli.out) {
        // Default format: human summary to stdout, JSON document to --out.
        (None, maybe_out) => {
            if let Some(path) = maybe_out {
                emit(&to_json(&rep.document), Some(path), cli.quiet)?;
            }
            if !cli.quiet {
                print!("{}", rep.human);
            }
        }
        (Some(text), _) => emit(text, cli.out.as_deref(), cli.quiet)?,
    }
    Ok(if rep.document.result.pass { 0 } else { 3 })
}

fn render<T: serde::Serialize>(doc: &document::Document<T>, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_json(doc),
        OutputFormat::Csv => to_flat_csv(doc),
    }
}
