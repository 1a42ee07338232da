mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orbitlab::Error;
use serde::{Deserialize, Serialize};

use commands::*;

#[derive(Parser, Debug)]
#[command(name = "orbitlab", version, about = "Periodic diagonal orbits, best approximations and p-adic good-function checks")]
struct Cli {
    /// Worker threads (outputs do not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print the run configuration as JSON instead of running.
    #[arg(long, global = true)]
    emit_config: bool,
    /// Run a configuration written by `--emit-config` (JSON or TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Starting interval precision; overrides ORBITLAB_PRECISION_BITS.
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Serialize, Deserialize, Debug, Clone)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Best approximations of an algebraic or random target.
    BestApprox(BestApproxArgs),
    /// Observables along a periodic diagonal orbit.
    OrbitSample(OrbitSampleArgs),
    /// Distance trend of orbit measures along a rescaling schedule.
    EquidistTest(EquidistArgs),
    /// Distance trend of best-approximation measures to the generic baseline.
    NuBestCompare(NuBestArgs),
    /// Exhaustive (C, alpha)-good certificate for a p-adic function.
    PadicGood(PadicGoodArgs),
    /// Haar reference sample for unimodular lattices in R^2.
    HaarRefD2(HaarArgs),
    /// Generic best-approximation baseline measure.
    BaselineGen(BaselineArgs),
}

/// Everything needed to re-run a command.
#[derive(Serialize, Deserialize, Debug, Clone)]
struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    precision_bits: Option<u32>,
    #[serde(flatten)]
    command: Command,
}

impl RunConfig {
    fn load(path: &PathBuf) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        } else {
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::Io(_)
        | Error::NotIrreducible(_)
        | Error::NotTotallyReal { .. }
        | Error::DegenerateInput(_)
        | Error::NotABasis
        | Error::BadScalar(_)
        | Error::NotSquarefree(_)
        | Error::RationalCoordinate(_)
        | Error::NotSpanning
        | Error::SchemaMismatch(_)
        | Error::OutsideConvergenceDomain { .. } => 2,
        Error::ScheduleViolation(_) | Error::Precondition(_) => 3,
        Error::EnumerationTooLarge { .. } | Error::DimensionTooLarge(_) => 4,
        Error::PrecisionExhausted { .. } | Error::PrecisionBelowResolution { .. } | Error::BoundaryUndecidable { .. } | Error::TieUnresolvable(_) | Error::NoWitnessAtResolution(_) => 5,
        Error::NotPrimitive | Error::NotExact => 1,
    }
}

fn run(cfg: &RunConfig) -> Result<(), Error> {
    match &cfg.command {
        Command::BestApprox(a) => cmd_best_approx(a),
        Command::OrbitSample(a) => cmd_orbit_sample(a),
        Command::EquidistTest(a) => cmd_equidist(a),
        Command::NuBestCompare(a) => cmd_nu_best_compare(a),
        Command::PadicGood(a) => cmd_padic_good(a),
        Command::HaarRefD2(a) => cmd_haar_ref(a),
        Command::BaselineGen(a) => cmd_baseline_gen(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match (&cli.config, cli.command) {
        (Some(path), None) => match RunConfig::load(path) {
            Ok(mut c) => {
                c.precision_bits = cli.precision_bits.or(c.precision_bits);
                c
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(exit_code(&e));
            }
        },
        (None, Some(command)) => RunConfig { precision_bits: cli.precision_bits, command },
        _ => {
            eprintln!("error: give exactly one of a subcommand or --config");
            return ExitCode::from(2);
        }
    };
    if cli.emit_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return ExitCode::SUCCESS;
    }
    if let Some(bits) = cfg.precision_bits {
        // read once by the library; set before any worker starts
        std::env::set_var("ORBITLAB_PRECISION_BITS", bits.to_string());
    }
    if let Some(n) = cli.jobs {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: cannot start {n} workers");
            return ExitCode::from(2);
        }
    }
    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
