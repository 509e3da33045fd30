use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use psdc_core::gen::GeneratorKind;
use psdc_core::SignMethod;

use crate::mm::MmFormat;

#[derive(Debug, Parser)]
#[command(name = "psdc", version, about = "Spectral divide-and-conquer for pseudosymmetric matrices")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "PSDC_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a test matrix and its signature.
    Gen(GenArgs),
    /// Compute all eigenpairs of a matrix from disk.
    Solve(SolveArgs),
    /// Run one spectral division over a sweep of random matrices.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value = "random_definite")]
    pub kind: GeneratorKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1e2)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Matrix Market output; the signature goes next to it as `.sig`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "array")]
    pub format: MmFormat,
}

/// Basis routine for the definite split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DefiniteBasis {
    Chol,
    Ldl,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Matrix Market file.
    pub matrix: PathBuf,
    /// Signature file (default: the matrix path with extension `.sig`).
    #[arg(long)]
    pub sig: Option<PathBuf>,
    #[arg(long, default_value = "zolo", value_parser = parse_method)]
    pub method: SignMethod,
    #[arg(long, value_enum, default_value = "ldl")]
    pub basis: DefiniteBasis,
    /// Full recursion for indefinite matrices with real spectrum.
    #[arg(long)]
    pub recursive: bool,
    /// Eigenvalue output, one per line (default: stdout).
    #[arg(long)]
    pub eigenvalues: Option<PathBuf>,
    /// CSV report with one row.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 250)]
    pub n: usize,
    /// Condition numbers: a comma list (`1e2,1e8`) or a decade range
    /// (`1e1..1e16`).
    #[arg(long, default_value = "1e1..1e8")]
    pub sweep: String,
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    /// Comma-separated sign methods.
    #[arg(long, default_value = "zolo,dwh-ldliqr2,newton")]
    pub methods: String,
    #[arg(long, value_enum, default_value = "ldl")]
    pub basis: DefiniteBasis,
    #[arg(long, default_value = "random_definite")]
    pub kind: GeneratorKind,
    /// Per-run CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-kappa means (default: `<out>_aggregate.csv` next to `--out`).
    #[arg(long)]
    pub aggregate: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<SignMethod, String> {
    s.parse().map_err(|e: psdc_core::Error| e.to_string())
}
