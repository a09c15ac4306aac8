//! Command-line front end for the `spinclone` studies.
//!
//! Every run is fully determined by its configuration and seed. Results go
//! to a CSV file with a header row and a JSON sidecar holding the resolved
//! configuration, library versions and a timestamp.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::Parser;

use config::{Params, PartialConfig, RunConfig, Subcommand};

/// Exit status for invalid configurations. Nothing is written.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status when a computation fails.
pub const EXIT_NUMERICAL: i32 = 3;
/// Exit status when output cannot be written.
pub const EXIT_IO: i32 = 1;

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "SPINCLONE_WORKERS";

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Parser)]
#[command(name = "spinclone", version, about = "Spin-network quantum cloning studies")]
pub struct Cli {
    /// TOML run configuration; flags override its keys
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for stochastic subcommands
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// CSV output path (sidecar: same path plus `.json`)
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, clap::Subcommand)]
pub enum Command {
    /// 1 -> M field/time optimization on a star or tree
    Pcc(Params),
    /// N -> M optimization with threshold time
    Nm(Params),
    /// Fidelity against input polar angle, both models
    ThetaSweep(Params),
    /// Fidelity against number of clones, both models
    MSweep(Params),
    /// Coupling disorder ensembles
    Disorder(Params),
    /// Quenched Gaussian offsets on J or B
    ClassicalNoise(Params),
    /// Network against gate circuit under a Redfield bath
    RedfieldCompare(Params),
    /// Three-spin universal cloner family
    Universal(Params),
    /// One-hot qudit cloner
    Qudit(Params),
    /// Randomized search over the tetrahedron family
    Tetrahedron(Params),
    /// Charge-qubit device with parasitic zz coupling
    Josephson(Params),
}

impl Command {
    fn split(&self) -> (Subcommand, &Params) {
        match self {
            Command::Pcc(p) => (Subcommand::Pcc, p),
            Command::Nm(p) => (Subcommand::Nm, p),
            Command::ThetaSweep(p) => (Subcommand::ThetaSweep, p),
            Command::MSweep(p) => (Subcommand::MSweep, p),
            Command::Disorder(p) => (Subcommand::Disorder, p),
            Command::ClassicalNoise(p) => (Subcommand::ClassicalNoise, p),
            Command::RedfieldCompare(p) => (Subcommand::RedfieldCompare, p),
            Command::Universal(p) => (Subcommand::Universal, p),
            Command::Qudit(p) => (Subcommand::Qudit, p),
            Command::Tetrahedron(p) => (Subcommand::Tetrahedron, p),
            Command::Josephson(p) => (Subcommand::Josephson, p),
        }
    }
}

/// Combine the config file (if any) with command-line flags.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => PartialConfig::default(),
    };
    let (subcommand, params) = match &cli.command {
        Some(cmd) => {
            let (sub, flags) = cmd.split();
            if let Some(s) = file.subcommand.filter(|s| *s != sub) {
                return Err(CliError::Config(format!("config file is for `{s}`, not `{sub}`")));
            }
            (sub, flags.over(&file.params)?)
        }
        None => (
            file.subcommand.ok_or_else(|| CliError::Config("no subcommand given on the command line or in the config".into()))?,
            file.params,
        ),
    };
    Ok(RunConfig {
        subcommand,
        seed: cli.seed.or(file.seed),
        output: cli.output.clone().or(file.output),
        params,
    })
}

fn configure_workers() -> Result<(), CliError> {
    let Ok(v) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| CliError::Config(format!("{WORKERS_ENV}={v} is not a count")))?;
    if n == 0 {
        return Err(CliError::Config(format!("{WORKERS_ENV} must be at least 1")));
    }
    spinclone::par::set_workers(n).map_err(CliError::Config)
}

/// Run a parsed command line; returns the CSV path written.
pub fn execute(cli: &Cli) -> Result<PathBuf, CliError> {
    let config = resolve(cli)?;
    configure_workers()?;
    log::info!("running {} (seed {:?})", config.subcommand, config.seed);
    let table = commands::run(&config)?;
    let path = config.output.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", config.subcommand)));
    output::write(&table, &config, &path)?;
    Ok(path)
}
