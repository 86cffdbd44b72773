//! `wbm`: command-line front end for weighted Brunn–Minkowski computations.
//!
//! Exit codes: 0 on success, 1 on input or computation errors, 2 when a
//! `verify` suite has a failing check.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "wbm",
    version,
    about = "Weighted surface measures, the weighted Minkowski problem, projection bodies and Shephard-type bounds for convex polytopes in 2D and 3D",
    after_help = "Bodies are JSON {\"dim\", \"normals\", \"offsets\"} or {\"zonotope\": {\"generators\"}}.\n\
                  Measures are lebesgue, gaussian, power:<s>, or a JSON file {\"family\": ..., \"s\": ...}.\n\
                  Targets are JSON {\"dim\", \"directions\", \"weights\"}.\n\
                  WBM_THREADS caps the worker threads."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Clone)]
pub struct Global {
    /// Gauss–Legendre order of the radial (cone) integral.
    #[arg(long, global = true, default_value_t = 64)]
    pub radial_order: usize,
    /// Gauss–Legendre order on 2D facets and along 3D facet edges.
    #[arg(long, global = true, default_value_t = 32)]
    pub facet_order: usize,
    /// Triangle rule level on 3D facets.
    #[arg(long, global = true, default_value_t = 5)]
    pub tri_level: usize,
    /// Monte Carlo sample count where sampling is used.
    #[arg(long, global = true, default_value_t = 200_000)]
    pub mc_samples: usize,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
pub struct SolverArgs {
    /// Stop when max |c·S − ν| / max ν falls below this.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Solve c·S^μ_K = ν for a symmetric polytope K by maximizing
    /// (n/β)·μ(K)^{β/n} − Σ h_K(u_i)·ν_i; c = μ(K)^{β/n−1}. With
    /// --homogeneous (power family only) K is rescaled so that S^μ_K = ν.
    Solve(commands::SolveCmd),
    /// L^q variant: solve c·h_K^{1−q}·S^μ_K = ν for q ≥ 1.
    SolveLq(commands::SolveCmd),
    /// Weighted projection body Π_μK: the zonotope with support
    /// ½·Σ S^μ_K(u_i)·|⟨θ, u_i⟩|, plus the surface-area identity
    /// μ⁺(∂K) = (1/κ_{n−1})·∫ h_{Π_μK}.
    Project(commands::BodyCmd),
    /// Mass μ(K) by cone decomposition, boundary mass and facet masses;
    /// optionally a Monte Carlo estimate.
    Mass(commands::MassCmd),
    /// Weighted surface area measure S^μ_K (or S^μ_{K,q} with --q).
    Surface(commands::SurfaceCmd),
    /// Mixed measure μ(K, L) = Σ h_L(u_i)·S^μ_K(u_i), its L^q form, and the
    /// finite-difference derivative of μ(K + εL) as a cross-check.
    Mixed(commands::MixedCmd),
    /// μ-Blaschke body: the symmetric body whose weighted surface measure
    /// is the even part of S^μ_K (power family), or with --beta the
    /// β-μ-Blaschke body of any measure.
    Blaschke(commands::BlaschkeCmd),
    /// Shephard-type volume bounds under h_{Π_μK} ≤ h_{Π_νL}; one pair from
    /// files, or a seeded sweep with --pairs. Gaussian measures are refused:
    /// the comparison is not meaningful for log-concave measures.
    Shephard(commands::ShephardCmd),
    /// Stability form of the Shephard bound when
    /// h_{Π_μK} ≤ h_{Π_νL} − ε on the sphere.
    Stability(commands::StabilityCmd),
    /// Probe μ(rB)^{β/n}/r → 0 as r → ∞ and → ∞ as r → 0 on a log grid.
    LambdaCheck(commands::LambdaCmd),
    /// Run a seeded property suite (or all of them); exit 2 on any failure.
    Verify(commands::VerifyCmd),
    /// Write seeded random body pairs as JSON files.
    Gen(commands::GenCmd),
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("WBM_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("WBM_THREADS must be a positive integer, got '{v}'"))?;
        if n == 0 {
            anyhow::bail!("WBM_THREADS must be a positive integer, got '{v}'");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    init_threads()?;
    let g = &cli.global;
    let (report, ok) = match &cli.command {
        Command::Solve(c) => (commands::solve(c, g, false)?, true),
        Command::SolveLq(c) => (commands::solve(c, g, true)?, true),
        Command::Project(c) => (commands::project(c, g)?, true),
        Command::Mass(c) => (commands::mass(c, g)?, true),
        Command::Surface(c) => (commands::surface(c, g)?, true),
        Command::Mixed(c) => (commands::mixed(c, g)?, true),
        Command::Blaschke(c) => (commands::blaschke(c, g)?, true),
        Command::Shephard(c) => (commands::shephard(c, g)?, true),
        Command::Stability(c) => (commands::stability(c, g)?, true),
        Command::LambdaCheck(c) => (commands::lambda_check(c, g)?, true),
        Command::Verify(c) => commands::verify(c, g)?,
        Command::Gen(c) => (commands::gen(c, g)?, true),
    };
    output::emit(&report, g)?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
