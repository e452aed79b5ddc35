//! `smtkit` command-line front end.
//!
//! Exit status: 0 on success, 1 when a theorem-level check fails, 2 on any
//! error (bad input, parse failure, module error).

mod commands;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "smtkit", version, about = "Resultants, filtrations, truncation bounds and Nevanlinna checks for entire curves and moving hypersurfaces")]
pub struct Cli {
    /// Seed for every randomized step (coordinate changes, sampling).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Resultant of n+1 forms of a system (raised to a common degree).
    Resultant(ResultantArgs),
    /// Decide whether every (n+1)-subset has a non-vanishing resultant.
    Admissible(SystemArgs),
    /// Power certificates x_i^s·R = Σ b_ij Q_j for n+1 forms.
    Certificate(CertificateArgs),
    /// Filtration table (multiplicities, A, checks) for an n-subset.
    Filtration(FiltrationArgs),
    /// Constants N, M, K, p0, t-bounds and truncation levels.
    Bounds(BoundsArgs),
    /// Both sides of Jensen's formula for a function.
    Jensen(JensenArgs),
    /// Wronskians, admissible derivative sets and the divisor bound.
    Wronskian(WronskianArgs),
    /// Defect estimates for every target of a system along a curve.
    Defects(DefectsArgs),
    /// Second Main Theorem harness over a radius grid.
    #[command(name = "smt-verify")]
    SmtVerify(SmtArgs),
    /// Run the acceptance matrix.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
pub struct SchemaFlag {
    /// Print the JSON schema of this subcommand's inputs and exit.
    #[arg(long)]
    pub schema: bool,
}

#[derive(Args, Debug)]
pub struct SystemArgs {
    #[command(flatten)]
    pub schema: SchemaFlag,
    /// System file {"n": n, "forms": [...]}.
    #[arg(long, required_unless_present = "schema")]
    pub system: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ResultantArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    /// 0-based indices of the n+1 forms (default: the first n+1).
    #[arg(long, value_delimiter = ',')]
    pub subset: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
pub struct CertificateArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    #[arg(long, value_delimiter = ',')]
    pub subset: Option<Vec<usize>>,
    /// Only this coordinate index (default: all).
    #[arg(long)]
    pub index: Option<usize>,
}

#[derive(Args, Debug)]
pub struct FiltrationArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    /// 0-based indices of n forms.
    #[arg(long, value_delimiter = ',', required_unless_present = "schema")]
    pub subset: Option<Vec<usize>>,
    /// Total degree N (a multiple of the common degree).
    #[arg(long = "N", required_unless_present = "schema")]
    pub big_n: Option<u32>,
    /// Also build the ψ-basis and compare its exponent sums with A.
    #[arg(long)]
    pub psi: bool,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub schema: SchemaFlag,
    #[arg(long, required_unless_present = "schema")]
    pub n: Option<usize>,
    #[arg(long, required_unless_present = "schema")]
    pub q: Option<usize>,
    /// Exact rational, e.g. 1/2.
    #[arg(long, required_unless_present = "schema")]
    pub eps: Option<String>,
    #[arg(long, value_delimiter = ',', required_unless_present = "schema")]
    pub degrees: Option<Vec<u32>>,
    /// Targets have constant coefficients.
    #[arg(long)]
    pub fixed: bool,
    /// Emit a grid sweep over n' ≤ n, d' ≤ max degree, ε/1, ε/2, ε/4 as CSV.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Args, Debug)]
pub struct JensenArgs {
    #[command(flatten)]
    pub schema: SchemaFlag,
    /// Function file {"numerator": {...}, "denominator": "..."}.
    #[arg(long, required_unless_present = "schema")]
    pub function: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "2,5,10")]
    pub radii: Vec<f64>,
    /// Largest acceptable residual.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct WronskianArgs {
    #[command(flatten)]
    pub schema: SchemaFlag,
    /// Curve file; its components are the functions.
    #[arg(long, required_unless_present_any = ["schema", "functions"], conflicts_with = "functions")]
    pub curve: Option<PathBuf>,
    /// Rational functions in m parameters {"m": m, "functions": [...]}.
    #[arg(long)]
    pub functions: Option<PathBuf>,
    /// Radius for listing zeros in the divisor-bound report.
    #[arg(long, default_value_t = 10.0)]
    pub r: f64,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    #[arg(long, default_value_t = 10.0)]
    pub rmin: f64,
    #[arg(long, default_value_t = 50.0)]
    pub rmax: f64,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
}

#[derive(Args, Debug)]
pub struct DefectsArgs {
    #[command(flatten)]
    pub schema: SchemaFlag,
    #[arg(long, required_unless_present = "schema")]
    pub curve: Option<PathBuf>,
    #[arg(long, required_unless_present = "schema")]
    pub system: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Truncation level (default: none).
    #[arg(long)]
    pub level: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SmtArgs {
    #[command(flatten)]
    pub schema: SchemaFlag,
    #[arg(long, required_unless_present = "schema")]
    pub curve: Option<PathBuf>,
    #[arg(long, required_unless_present = "schema")]
    pub system: Option<PathBuf>,
    #[arg(long, required_unless_present = "schema")]
    pub eps: Option<String>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// SVG of both sides against r.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Override the computed truncation levels.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<u64>>,
    /// Highest monomial degree in the nondegeneracy test.
    #[arg(long, default_value_t = 4)]
    pub nondegeneracy_degree: u32,
    /// Include the logarithmic-derivative diagnostic.
    #[arg(long)]
    pub log_derivative: bool,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[command(flatten)]
    pub schema: SchemaFlag,
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<u32>>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
