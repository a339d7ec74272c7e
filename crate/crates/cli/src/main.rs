//! `saddlebounds` command-line tool.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

/// Exit status when a declared check (containment, convergence, agreement)
/// fails.
pub const EXIT_CHECK_FAILED: u8 = 1;
/// Conflicting or invalid options.
pub const EXIT_USAGE: u8 = 2;
/// Unreadable, malformed or invalid input data.
pub const EXIT_INPUT: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "saddlebounds", version, about = "Eigenvalue bounds for preconditioned multiple saddle-point matrices")]
struct Cli {
    /// JSON file with default options, one object per subcommand
    /// (e.g. {"suite": {"runs": 10}}); command-line flags take precedence.
    #[arg(long, global = true)]
    settings: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Indicators, bounds, exact spectrum and containment for a system.
    Analyze(AnalyzeArgs),
    /// Bounds from an indicator JSON file.
    Bounds(BoundsArgs),
    /// Randomized containment suite over a grid of indicator windows.
    Suite(SuiteArgs),
    /// Preconditioned MINRES on a system.
    Solve(SolveArgs),
    /// Roots of U_k for one parameter assignment.
    PolyRoots(PolyRootsArgs),
    /// Writes a random system as Matrix Market block files.
    Generate(GenerateArgs),
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Where the blocks of a system come from.
#[derive(Args, Debug, Default, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SystemArgs {
    /// Directory holding A0.mtx, A1.mtx, … and B1.mtx, …
    #[arg(long, conflicts_with_all = ["blocks", "offdiag"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<PathBuf>,
    /// Diagonal block files A_0,…,A_N (comma separated).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<PathBuf>>,
    /// Off-diagonal block files B_1,…,B_N (comma separated).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offdiag: Option<Vec<PathBuf>>,
    /// Approximation per level: exact, jacobi, scaled:<c>, window:<lo>:<hi>.
    /// One value applies to every level.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approx: Option<Vec<String>>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct AnalyzeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: SystemArgs,
    /// linear, bruteforce, n2-closed or n2-rect (default: n2-rect for a
    /// rectangular tail, linear otherwise).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// Output JSON file (default: stdout).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct BoundsArgs {
    /// Indicator JSON file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// JSON output (the default).
    #[arg(long, conflicts_with = "csv")]
    #[serde(default, skip_serializing_if = "is_false")]
    pub json: bool,
    /// CSV output: endpoint,value,source,degrees.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub csv: bool,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// With the bruteforce method, write the agreement report against the
    /// linear algorithm here.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SuiteArgs {
    /// Depth N of the generated systems.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// table1 or smoke.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    /// Explicit lower-endpoint candidates (replaces --grid).
    #[arg(long, value_delimiter = ',', requires = "beta")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    /// Explicit upper-endpoint candidates (replaces --grid).
    #[arg(long, value_delimiter = ',', requires = "alpha")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Keep every k-th grid combination.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    /// Block size base (default 50).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_base: Option<f64>,
    /// Block size jitter (default 10).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_jitter: Option<f64>,
    /// Keep random A_k for k >= 1 instead of zeroing them.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub full_tail: bool,
    /// Worker threads (default: SADDLEBOUNDS_THREADS, else all cores).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Results CSV (default: stdout).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
    /// Summary JSON.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: SystemArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maxit: Option<usize>,
    /// Right-hand side: a Matrix Market column file, or `ones` for the
    /// image of the all-ones vector (default).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    /// Residual history CSV.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub history: Option<PathBuf>,
    /// Also compute bounds and check the history against the envelope.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub envelope: bool,
    /// Report JSON (default: stdout).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PolyRootsArgs {
    /// γ_E^(0), …, γ_E^(N) (comma separated).
    #[arg(long = "gammaE", value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(rename = "gammaE", skip_serializing_if = "Option::is_none")]
    pub gamma_e: Option<Vec<f64>>,
    /// γ_R^(1), …, γ_R^(N) (comma separated).
    #[arg(long = "gammaR", value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(rename = "gammaR", skip_serializing_if = "Option::is_none")]
    pub gamma_r: Option<Vec<f64>>,
    /// Degree k (default N + 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    /// Decimal places of the text output (default 4).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
    /// Full-precision JSON instead of text.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub json: bool,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct GenerateArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_base: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_jitter: Option<f64>,
    /// Zero the blocks A_k for k >= 1.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub zero_tail: bool,
    /// Output directory.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// An error together with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, error: anyhow::anyhow!(msg.into()) }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Self { code: EXIT_INPUT, error: e.into() }
    }
}

/// `Ok(true)` when every check passed.
pub type Outcome = std::result::Result<bool, Failure>;

fn run(cli: Cli) -> Outcome {
    let settings = match &cli.settings {
        Some(p) => Some(settings::load(p).map_err(|e| Failure { code: EXIT_USAGE, error: e })?),
        None => None,
    };
    let section = |name: &str| settings.as_ref().and_then(|s| s.get(name).cloned());
    match cli.command {
        Command::Analyze(a) => commands::analyze(settings::merge(a, section("analyze"))?),
        Command::Bounds(a) => commands::bounds(settings::merge(a, section("bounds"))?),
        Command::Suite(a) => commands::suite(settings::merge(a, section("suite"))?),
        Command::Solve(a) => commands::solve(settings::merge(a, section("solve"))?),
        Command::PolyRoots(a) => commands::poly_roots(settings::merge(a, section("poly-roots"))?),
        Command::Generate(a) => commands::generate(settings::merge(a, section("generate"))?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
