//! Experiment drivers writing ergotropic-volume data as CSV.

mod config;
mod error;
mod experiments;
mod table;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "ergovolume", version, about = "Ergotropic volume of interacting many-body states", args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// TOML file whose keys supply the long flags; command-line flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination, standard output by default
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Worker threads; falls back to ERGOVOLUME_THREADS, then to all cores
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Volume of Tavis-Cummings dressed states against the excitation number
    TcDressed(TcDressed),
    /// Ground-state volume of the three-level Dicke model on a coupling grid
    Dicke3Phase(Dicke3Phase),
    /// Ground-state volume of the transverse-field Ising ring against coupling
    TfimGround(TfimGround),
    /// Exact and variational volume after a quench of the Ising chain
    TfimDynamics(TfimDynamics),
    /// Interacting and quenched gaps of two-site models
    AppendixA(AppendixA),
    /// Volume against the geometric measure and GME-concurrence
    BenchmarkCompare(BenchmarkCompare),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::TcDressed(_) => "tc-dressed",
            Command::Dicke3Phase(_) => "dicke3-phase",
            Command::TfimGround(_) => "tfim-ground",
            Command::TfimDynamics(_) => "tfim-dynamics",
            Command::AppendixA(_) => "appendix-a",
            Command::BenchmarkCompare(_) => "benchmark-compare",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::TcDressed(a) => &a.common,
            Command::Dicke3Phase(a) => &a.common,
            Command::TfimGround(a) => &a.common,
            Command::TfimDynamics(a) => &a.common,
            Command::AppendixA(a) => &a.common,
            Command::BenchmarkCompare(a) => &a.common,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assignment {
    /// Every level of the spin block
    Full,
    /// Symmetric levels only
    Subspace,
}

#[derive(Args, Debug)]
pub struct TcDressed {
    #[arg(long, default_value_t = 100)]
    spins: usize,
    /// Photon number bound of the dressed state
    #[arg(long, default_value_t = 50)]
    nph: usize,
    #[arg(long, default_value_t = 1.0)]
    omega_c: f64,
    #[arg(long, default_value_t = 1.0)]
    omega_a: f64,
    #[arg(long, value_enum, default_value_t = Assignment::Full)]
    assignment: Assignment,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
pub struct Dicke3Phase {
    #[arg(long, default_value_t = 5)]
    atoms: usize,
    /// Coupling grid `start:stop:step`, used for both couplings
    #[arg(long, default_value = "0:1.3:0.05")]
    grid: String,
    /// Separate grid for the second coupling
    #[arg(long)]
    g2_grid: Option<String>,
    /// Initial photon cutoff
    #[arg(long, default_value_t = 12)]
    nmax: usize,
    /// Fail instead of raising the cutoff when the photon tail is too heavy
    #[arg(long)]
    fixed_cutoff: bool,
    #[arg(long, default_value_t = 1.0)]
    omega_c: f64,
    #[arg(long, default_value_t = 1.0)]
    omega_a: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundBackend {
    /// Contiguous blocks from the free-fermion correlation matrix
    Freefermion,
    /// Free fermions plus exact diagonalization over every cut
    Both,
}

#[derive(Args, Debug)]
pub struct TfimGround {
    #[arg(long, default_value_t = 20)]
    spins: usize,
    #[arg(long, default_value = "0:2:0.05")]
    g_grid: String,
    #[arg(long, value_enum, default_value_t = GroundBackend::Freefermion)]
    backend: GroundBackend,
    /// Block-spectrum populations below this are dropped
    #[arg(long, default_value_t = 1e-12)]
    trunc: f64,
    #[arg(long, default_value_t = 1 << 24)]
    cap: usize,
    #[arg(long, default_value_t = 1e-6)]
    max_discarded: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainBoundary {
    Open,
    Periodic,
}

#[derive(Args, Debug, Clone)]
pub struct Optimizer {
    /// Random restarts per passive-energy search
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 30_000)]
    max_iterations: usize,
    /// Stall window in iterations
    #[arg(long, default_value_t = 300)]
    window: usize,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
pub struct TfimDynamics {
    #[arg(long, default_value_t = 6)]
    spins: usize,
    /// Coupling relative to the field
    #[arg(long, default_value_t = 2.0)]
    g: f64,
    #[arg(long, default_value = "0:2:0.1")]
    t_grid: String,
    #[arg(long, value_enum, default_value_t = ChainBoundary::Open)]
    boundary: ChainBoundary,
    /// Largest ansatz depth; depths 1.. are swept with warm starts
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Largest Trotter step
    #[arg(long, default_value_t = 0.02)]
    trotter_dt: f64,
    #[command(flatten)]
    optimizer: Optimizer,
    /// Single-qubit depolarizing probability for the noisy column
    #[arg(long, default_value_t = 0.0)]
    noise_p1: f64,
    /// Two-qubit depolarizing probability for the noisy column
    #[arg(long, default_value_t = 0.0)]
    noise_p2: f64,
    #[arg(long, default_value_t = 32)]
    trajectories: usize,
    /// Estimate expectations from this many shots instead of exactly
    #[arg(long)]
    shots: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoSiteModel {
    Ising,
    Jc,
    Both,
}

#[derive(Args, Debug)]
pub struct AppendixA {
    #[arg(long, default_value = "0:3:0.1")]
    g_grid: String,
    #[arg(long, value_enum, default_value_t = TwoSiteModel::Both)]
    model: TwoSiteModel,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 20_000)]
    max_iterations: usize,
    #[arg(long, default_value_t = 200)]
    window: usize,
    #[arg(long, default_value_t = 1e-12)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkSystem {
    /// Dressed states of the Tavis-Cummings model
    Dressed,
    /// Quenched Ising chain
    TfimDynamics,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DressedSweep {
    /// Vary the excitation number at fixed photon bound
    Excitations,
    /// Vary the photon bound at fixed excitation number
    Photons,
}

#[derive(Args, Debug)]
pub struct BenchmarkCompare {
    #[arg(long, value_enum, default_value_t = BenchmarkSystem::Dressed)]
    system: BenchmarkSystem,
    #[arg(long, default_value_t = 12)]
    spins: usize,
    #[arg(long, default_value_t = 6)]
    nph: usize,
    #[arg(long, value_enum, default_value_t = DressedSweep::Excitations)]
    sweep: DressedSweep,
    /// Excitation number for the photon sweep
    #[arg(long)]
    excitations: Option<usize>,
    /// Photon bounds for the photon sweep, `start:stop:step`
    #[arg(long, default_value = "2:200:2")]
    nph_grid: String,
    #[arg(long, default_value_t = 2.0)]
    g: f64,
    #[arg(long, default_value = "0:2:0.1")]
    t_grid: String,
    /// Min-max rescale every measure onto [0, 1]
    #[arg(long)]
    rescale: bool,
    #[command(flatten)]
    common: Common,
}

fn parse(args: &[OsString]) -> Result<Cli, CliError> {
    Cli::try_parse_from(args).map_err(|e| {
        if !e.use_stderr() {
            // help and version requests
            let _ = e.print();
            std::process::exit(0);
        }
        let text = e.to_string();
        let first = text.lines().next().unwrap_or_default();
        CliError::Config(first.trim_start_matches("error: ").to_string())
    })
}

fn configure_threads(flag: Option<usize>) -> Result<(), CliError> {
    let requested = match flag {
        Some(n) => Some(n),
        None => match std::env::var("ERGOVOLUME_THREADS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| CliError::Config(format!("ERGOVOLUME_THREADS='{v}' is not a count")))?),
            Err(_) => None,
        },
    };
    if let Some(n) = requested {
        if n == 0 {
            return Err(CliError::Config("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size worker pool: {e}")))?;
    }
    Ok(())
}

fn run() -> Result<(), CliError> {
    let args: Vec<OsString> = std::env::args_os().collect();
    let mut cli = parse(&args)?;
    let mut config_text = None;
    if let Some(path) = cli.command.common().config.clone() {
        let file = config::load(&path)?;
        let name = cli.command.name();
        if let Some(exp) = &file.experiment {
            if exp != name {
                return Err(CliError::Config(format!("config is for '{exp}' but '{name}' was requested")));
            }
        }
        cli = parse(&config::merge(&args, name, &file.flags))?;
        config_text = Some(file.text);
    }
    configure_threads(cli.command.common().threads)?;

    let table = match &cli.command {
        Command::TcDressed(a) => experiments::tc_dressed(a)?,
        Command::Dicke3Phase(a) => experiments::dicke3_phase(a)?,
        Command::TfimGround(a) => experiments::tfim_ground(a)?,
        Command::TfimDynamics(a) => experiments::tfim_dynamics(a)?,
        Command::AppendixA(a) => experiments::appendix_a(a)?,
        Command::BenchmarkCompare(a) => experiments::benchmark_compare(a)?,
    };

    let io_err = |e: io::Error| CliError::Config(format!("cannot write output: {e}"));
    let name = cli.command.name();
    match &cli.command.common().output {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
            let mut out = BufWriter::new(file);
            table.write(&mut out, name, config_text.as_deref()).map_err(io_err)?;
            out.flush().map_err(io_err)
        }
        None => {
            let mut out = io::stdout().lock();
            table.write(&mut out, name, config_text.as_deref()).map_err(io_err)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
