//! `framedqpb` — scenario-driven verification of the framed bundle calculus.
//!
//! Exit codes: 0 when every check passes (or is vacuous), 1 when any check
//! fails, 2 for invalid input.

use clap::{Parser, Subcommand, ValueEnum};
use framedqpb::report::Report;
use framedqpb::scenario::Scenario;
use framedqpb::verify::{run_calculus, run_curvature, run_torsion, run_uniqueness, run_verify, VerifyOptions};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "framedqpb", version, about = "Exact checks for a framed quantum SO(2) bundle over a Laurent base")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full identity suite on a scenario.
    Verify {
        #[arg(long)]
        scenario: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        output: OutputFormat,
        /// Overrides the scenario seed for the sampled law checks.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Tabulate the connection curvature against its closed form.
    Curvature {
        #[arg(long)]
        scenario: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        output: OutputFormat,
        #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
        m_min: i64,
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        m_max: i64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Report the induced first-order calculus on the structure group.
    Calculus {
        #[arg(long)]
        scenario: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        output: OutputFormat,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Torsion of a named perturbation, evaluated along both routes.
    Torsion {
        #[arg(long)]
        scenario: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        output: OutputFormat,
        /// Perturbation name from the scenario; defaults to the first one.
        #[arg(long)]
        perturbation: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve for all torsion-free perturbations over a degree window.
    Uniqueness {
        #[arg(long)]
        scenario: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        output: OutputFormat,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(path: &str, seed: Option<u64>) -> Result<Scenario, String> {
    let mut sc = Scenario::from_path(path).map_err(|e| e.to_string())?;
    if let Some(s) = seed {
        sc.seed = s;
    }
    Ok(sc)
}

fn emit(report: &Report, format: OutputFormat) -> ExitCode {
    match format {
        OutputFormat::Text => print!("{}", report.to_text()),
        OutputFormat::Json => println!("{}", report.to_json()),
    }
    if report.has_failures() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn invalid(message: String) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { scenario, output, seed } => match load(&scenario, seed) {
            Err(e) => invalid(e),
            Ok(sc) => emit(&run_verify(&sc, VerifyOptions::default()), output),
        },
        Command::Curvature {
            scenario,
            output,
            m_min,
            m_max,
            seed,
        } => {
            if m_min > m_max {
                return invalid(format!("m-min ({m_min}) must not exceed m-max ({m_max})"));
            }
            match load(&scenario, seed) {
                Err(e) => invalid(e),
                Ok(sc) => emit(&run_curvature(&sc, m_min, m_max), output),
            }
        }
        Command::Calculus { scenario, output, seed } => match load(&scenario, seed) {
            Err(e) => invalid(e),
            Ok(sc) => emit(&run_calculus(&sc), output),
        },
        Command::Torsion {
            scenario,
            output,
            perturbation,
            seed,
        } => match load(&scenario, seed) {
            Err(e) => invalid(e),
            Ok(sc) => {
                let name = match perturbation.or_else(|| sc.perturbations.keys().next().cloned()) {
                    Some(n) => n,
                    None => return invalid("scenario defines no perturbations; use --perturbation".into()),
                };
                match run_torsion(&sc, &name) {
                    Err(e) => invalid(e),
                    Ok(report) => emit(&report, output),
                }
            }
        },
        Command::Uniqueness { scenario, output, seed } => match load(&scenario, seed) {
            Err(e) => invalid(e),
            Ok(sc) => emit(&run_uniqueness(&sc), output),
        },
    }
}
