//! `spreadlab`: transport, discrepancy, fields and cube-lemma experiments from
//! the command line.
//!
//! Exit codes: `0` success, `1` a checked property failed, `2` usage or
//! input error.

mod commands;
mod report;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "spreadlab", version, about = "Uniform spreading of measures: transport, discrepancy, fields")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for floating-point checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Grid pitch (a decimal or `p/q`).
    #[arg(long, global = true)]
    pub pitch: Option<String>,
    /// Also write the JSON report here.
    #[arg(long, global = true)]
    pub json_out: Option<PathBuf>,
    /// Write per-instance rows as CSV here.
    #[arg(long, global = true)]
    pub csv_out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance.
    Gen(GenArgs),
    /// Bottleneck distance, or feasibility under a relation.
    Tra {
        a: PathBuf,
        b: PathBuf,
        /// Feasibility at this radius instead of the optimum.
        #[arg(long, conflicts_with = "relation_file")]
        relation: Option<String>,
        /// Feasibility under an explicit boolean matrix `{"allowed": [[...]]}`.
        #[arg(long)]
        relation_file: Option<PathBuf>,
        /// Write the coupling here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Discrepancy distance with its certificate.
    Di {
        a: PathBuf,
        b: PathBuf,
        /// Write the violating set found just below the value here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Compare Tra and Di on one pair.
    DualCheck { a: PathBuf, b: PathBuf },
    /// Discrepancy against Lebesgue measure on the `--pitch` grid.
    Dvl { instance: PathBuf },
    /// Connecting fields.
    #[command(subcommand)]
    Field(FieldCommand),
    /// Cube-union lemma.
    #[command(subcommand)]
    Laczkovich(LaczkovichCommand),
    /// Bounds from potentials.
    #[command(subcommand)]
    Potential(PotentialCommand),
    /// Run a battery of seeded instances.
    Suite(SuiteArgs),
    /// Re-run checks serialized by a failing suite.
    Replay { file: PathBuf },
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value = "8")]
    pub side: String,
    #[arg(long, value_enum, default_value_t = DomainArg::Torus)]
    pub domain: DomainArg,
    /// Perturbation amplitude for `perturbed_lattice`.
    #[arg(long, default_value = "0")]
    pub delta: String,
    /// Intensity for `poisson`; parent intensity for `cluster`.
    #[arg(long, default_value_t = 1.0)]
    pub intensity: f64,
    #[arg(long, default_value_t = 4.0)]
    pub mean_offspring: f64,
    /// Cluster or ball radius.
    #[arg(long, default_value = "1")]
    pub radius: String,
    /// Ball centre, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub center: Vec<String>,
    /// Give atoms equal masses summing to the domain volume.
    #[arg(long)]
    pub normalize: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
#[value(rename_all = "snake_case")]
pub enum GenKind {
    PerturbedLattice,
    Poisson,
    Cluster,
    BallUniform,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainArg {
    Torus,
    Box,
}

#[derive(Subcommand, Debug)]
pub enum FieldCommand {
    /// Spectral field `∇h` with `Δh = ν − m` on the `--pitch` grid.
    Poisson {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the potential `h`.
        #[arg(long)]
        potential: Option<PathBuf>,
    },
    /// `Ra` and `R̃a` of a field.
    Ra { field: PathBuf },
    /// Sum of dipole fields along a coupling.
    Assemble {
        coupling: PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum LaczkovichCommand {
    /// Both boundary inequalities on random test sets.
    Claim {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long = "M", default_value_t = 5)]
        m: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
    /// `D(ν) ≤ C(d) ρ` with the inequality chain replayed on random sets.
    Bound {
        instance: PathBuf,
        #[arg(long)]
        rho: String,
        /// Number of random test sets.
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum PotentialCommand {
    /// `(1 + C) √‖u‖∞`.
    Bound1 { potential: PathBuf },
    /// `K · min_r { r + √‖u * χ_r‖∞ }`.
    Bound2 { potential: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteName {
    Duality,
    Theorem2,
    Laczkovich,
    Potentials,
    All,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    #[arg(value_enum)]
    pub name: SuiteName,
    /// Atom counts, `lo..hi` inclusive.
    #[arg(long, default_value = "4..8")]
    pub sizes: String,
    /// Instances per size (per dimension) in the batch.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Plot-ready `(series, x, y)` rows.
    #[arg(long)]
    pub plot_out: Option<PathBuf>,
    /// Where failing checks are serialized.
    #[arg(long, default_value = "spreadlab-replay.json")]
    pub replay_out: PathBuf,
}

/// Outcome of a command other than a usage error.
pub enum Status {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match commands::run(&cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("SPREADLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .map_err(|_| format!("SPREADLAB_THREADS must be a positive integer, got `{value}`"))?;
    if threads == 0 {
        return Err("SPREADLAB_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}
