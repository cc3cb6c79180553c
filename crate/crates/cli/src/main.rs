//! `eitcool`: batch front end for tripod-EIT cooling calculations.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure,
//! 3 I/O error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::output::{Format, Manifest};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(eitcool_core::Error),
    Io(String),
}

impl From<eitcool_core::Error> for CliError {
    fn from(e: eitcool_core::Error) -> Self {
        // Bad parameter values are configuration problems, not numerics.
        match e {
            eitcool_core::Error::InvalidParameter { .. } => CliError::Config(e.to_string()),
            e => CliError::Numeric(e),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "configuration error: {s}"),
            CliError::Numeric(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(s) => write!(f, "I/O error: {s}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

pub const COMMANDS: &[&str] = &[
    "spectrum",
    "cooling-limit",
    "dynamics",
    "scan",
    "optimize",
    "chain-modes",
    "thermometry",
    "rabi-fit",
    "cooling-fit",
];

#[derive(Debug, Parser)]
#[command(name = "eitcool", version, about = "Tripod-EIT cooling of trapped-ion chains")]
struct Cli {
    /// Flat `key = value` parameter file; command-line keys override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the table here and a manifest beside it (default: stdout, no manifest).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

macro_rules! commands {
    ($($variant:ident => $doc:literal),* $(,)?) => {
        #[derive(Debug, Subcommand)]
        enum Command {
            $(
                #[doc = $doc]
                $variant {
                    /// Parameters as `--key value` or `--key=value`.
                    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
                    params: Vec<String>,
                },
            )*
        }

        impl Command {
            fn params(&self) -> &[String] {
                match self {
                    $(Command::$variant { params } => params,)*
                }
            }
        }
    };
}

commands! {
    Spectrum => "Excited-state population versus probe detuning",
    CoolingLimit => "Steady-state phonon number versus mode frequency",
    Dynamics => "Cooling of one mode from an initial occupation",
    Scan => "Phonon-number map over pump Rabi frequency and mode frequency",
    Optimize => "Probe detuning that minimises the phonon number of one mode",
    ChainModes => "Transverse normal modes and Lamb-Dicke factors of an ion chain",
    Thermometry => "Mean phonon number from sideband pairs (data file: p_lower p_upper [σ_lower σ_upper])",
    RabiFit => "Fit a thermally dephased carrier flop (data file: t_us p [σ])",
    CoolingFit => "Fit an exponential cooling curve (data file: t_us nbar [σ])",
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::CoolingLimit { .. } => "cooling-limit",
            Command::Dynamics { .. } => "dynamics",
            Command::Scan { .. } => "scan",
            Command::Optimize { .. } => "optimize",
            Command::ChainModes { .. } => "chain-modes",
            Command::Thermometry { .. } => "thermometry",
            Command::RabiFit { .. } => "rabi-fit",
            Command::CoolingFit { .. } => "cooling-fit",
        }
    }
}

/// Pull the global options out of the trailing parameters so they may
/// follow the subcommand as well as precede it.
fn split_globals(cli: &mut Cli) -> Result<Vec<String>, CliError> {
    let raw = cli.command.params().to_vec();
    let mut rest = Vec::new();
    let mut it = raw.into_iter();
    while let Some(a) = it.next() {
        let (flag, inline) = match a.split_once('=') {
            Some((f, v)) => (f.to_string(), Some(v.to_string())),
            None => (a.clone(), None),
        };
        if !matches!(flag.as_str(), "--config" | "--out" | "--format" | "--jobs") {
            rest.push(a);
            continue;
        }
        let value = match inline {
            Some(v) => v,
            None => it.next().ok_or_else(|| CliError::Config(format!("missing value for {flag}")))?,
        };
        match flag.as_str() {
            "--config" => cli.config = Some(value.into()),
            "--out" => cli.out = Some(value.into()),
            "--format" => {
                cli.format = match value.as_str() {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    v => return Err(CliError::Config(format!("unknown format `{v}` (csv, json)"))),
                }
            }
            _ => {
                cli.jobs =
                    Some(value.parse().map_err(|_| CliError::Config(format!("--jobs: `{value}` is not a count")))?)
            }
        }
    }
    Ok(rest)
}

fn run(mut cli: Cli) -> Result<(), CliError> {
    let started = Instant::now();
    let rest = split_globals(&mut cli)?;
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(CliError::Config("--jobs must be ≥ 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    }
    let name = cli.command.name();
    let keys = commands::keys(name);
    let mut layers = Vec::new();
    if let Some(path) = &cli.config {
        layers.push(config::read_file(path)?);
    }
    layers.push(config::parse_overrides(&rest)?);
    let params = config::Params::resolve(&keys, &layers)?;

    let outcome = match &cli.command {
        Command::Spectrum { .. } => commands::spectrum(&params),
        Command::CoolingLimit { .. } => commands::cooling_limit(&params),
        Command::Dynamics { .. } => commands::dynamics(&params),
        Command::Scan { .. } => commands::scan(&params),
        Command::Optimize { .. } => commands::optimize(&params),
        Command::ChainModes { .. } => commands::chain_modes(&params),
        Command::Thermometry { .. } => commands::thermometry(&params),
        Command::RabiFit { .. } => commands::rabi_fit(&params),
        Command::CoolingFit { .. } => commands::cooling_fit(&params),
    }?;

    let body = outcome.table.render(cli.format, name);
    match &cli.out {
        None => {
            print!("{body}");
            for (k, v) in &outcome.summary {
                eprintln!("{k} = {v}");
            }
        }
        Some(path) => {
            output::write_file(path, &body)?;
            let mut resolved: BTreeMap<String, String> = params.resolved().clone();
            for (k, v) in &outcome.effective {
                resolved.entry(k.clone()).or_insert_with(|| v.clone());
            }
            let manifest = Manifest {
                command: name,
                version: output::VERSION,
                resolved_params: &resolved,
                grid_specs: &outcome.grid_specs,
                summary: &outcome.summary,
                wall_time_s: started.elapsed().as_secs_f64(),
            };
            let text = serde_json::to_string_pretty(&manifest).expect("serialisable") + "\n";
            output::write_file(&output::manifest_path(path), &text)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eitcool: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
