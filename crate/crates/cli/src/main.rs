//! `phasesim`: sweep driver and verification runner for the entanglement-free
//! phase-estimation simulator.
//!
//! Exit codes: 0 success, 2 usage error, 3 verification failure, 4 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phasesim_cli::sweep::{self, OutputFormat, SweepError, SweepSpec, VisibilityArg};
use phasesim_cli::verify::{run_verify, VerifyLevel};
use phasesim_core::AdaptiveObjective;

const EXIT_USAGE: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "phasesim",
    version,
    about = "Monte Carlo simulator for entanglement-free Heisenberg-limited phase estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a (policy, M, K) sweep and emit one CSV/JSON row per grid point.
    Sweep(SweepArgs),
    /// Run the built-in verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Policies to sweep: kitaev, adaptive, nonadaptive (comma-separated).
    #[arg(long, value_delimiter = ',', conflicts_with = "preset")]
    policy: Vec<String>,

    /// Photons per stage, M (comma-separated; default 1).
    #[arg(long, value_delimiter = ',', conflicts_with = "preset")]
    m: Vec<u32>,

    /// K values: integers and/or inclusive ranges, e.g. `--k 0..5` or `--k 1,3,5`.
    #[arg(long, value_delimiter = ',')]
    k: Vec<String>,

    /// Trials per grid point.
    #[arg(long, default_value_t = 1000)]
    trials: u64,

    /// Fringe visibility: a scalar like `0.95`, or per-pass pairs like
    /// `32:0.954,1:0.99` (unlisted pass counts default to 1).
    #[arg(long)]
    visibility: Option<String>,

    /// True phase in radians (the initial feedback phase is randomized per
    /// trial regardless).
    #[arg(long, default_value_t = 0.0)]
    phi: f64,

    /// Master seed; every row derives its own seed from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Bootstrap resamples for confidence intervals; raise (e.g. to 999999)
    /// for publication-grade interval endpoints.
    #[arg(long = "bootstrap-b", default_value_t = phasesim_core::DEFAULT_BOOTSTRAP_B)]
    bootstrap_b: u32,

    /// Output file (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output encoding.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Named preset; `fig3` compares nonadaptive, Kitaev, and six-photon
    /// adaptive over K = 0..5 at 1000 trials per point.
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,

    /// Objective maximized by the adaptive policy.
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Sharpness)]
    objective: ObjectiveArg,

    /// Worker threads (default: available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Verification depth: `fast` (analytic + enumeration oracles) or
    /// `full` (adds scaling fits and bootstrap coverage).
    #[arg(value_enum)]
    level: LevelArg,

    /// Worker threads (default: available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Fig3,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    /// Expected posterior sharpness (default).
    Sharpness,
    /// Expected posterior variance.
    Variance,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

fn configure_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not configure {n} worker threads: {e}");
        }
    }
}

fn sweep_command(args: SweepArgs) -> Result<(), SweepError> {
    configure_jobs(args.jobs);
    let mut spec = match args.preset {
        Some(PresetArg::Fig3) => {
            let mut spec = SweepSpec::fig3();
            if !args.k.is_empty() {
                spec.k_values = sweep::parse_k_items(&args.k).map_err(SweepError::Usage)?;
            }
            spec
        }
        None => SweepSpec::from_flags(&args.policy, &args.m, &args.k)?,
    };
    spec.trials = args.trials;
    if let Some(v) = &args.visibility {
        spec.visibility = VisibilityArg::parse(v).map_err(SweepError::Usage)?;
    }
    spec.phi_true = args.phi;
    spec.seed = args.seed;
    spec.bootstrap_b = args.bootstrap_b;
    spec.objective = match args.objective {
        ObjectiveArg::Sharpness => AdaptiveObjective::ExpectedSharpness,
        ObjectiveArg::Variance => AdaptiveObjective::ExpectedVariance,
    };
    spec.out = args.out;
    spec.format = match args.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    spec.validate()?;
    sweep::run_sweep_to_output(&spec).map(|_| ())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep(args) => match sweep_command(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e @ (SweepError::Usage(_) | SweepError::Sim(_))) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_USAGE)
            }
            Err(e @ SweepError::Io(_)) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_IO)
            }
        },
        Command::Verify(args) => {
            configure_jobs(args.jobs);
            let level = match args.level {
                LevelArg::Fast => VerifyLevel::Fast,
                LevelArg::Full => VerifyLevel::Full,
            };
            let stdout = std::io::stdout();
            match run_verify(level, &mut stdout.lock()) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(EXIT_VERIFY),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_IO)
                }
            }
        }
    }
}
