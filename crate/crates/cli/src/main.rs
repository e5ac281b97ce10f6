mod commands;
mod document;
mod error;

use activation_robustness::teleport::Protocol;
use activation_robustness::verify::SuiteConfig;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use commands::{ReportDocument, RobustnessOptions, TeleportOptions};
use error::CliError;

/// Robustness of entanglement, optimal witnesses and teleportation activation.
#[derive(Parser, Debug)]
#[command(name = "robact", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// SDP solver tolerance on the duality gap and residuals.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    /// Monte Carlo sample count for `teleport`.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Seed for Monte Carlo draws, see-saw restarts and the acceptance suite.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Reduced sample counts for `verify`.
    #[arg(long, global = true)]
    quick: bool,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// PPT-relaxed robustness of a bipartite state and its optimal witness.
    Robustness {
        input: PathBuf,
        /// See-saw restarts used to certify the witness normalization.
        #[arg(long, default_value_t = 100)]
        restarts: usize,
    },
    /// Teleportation fidelity of a d x d resource.
    Teleport {
        input: PathBuf,
        #[arg(short = 'd', long = "dim")]
        d: usize,
        #[arg(long, value_enum, default_value_t = ProtocolArg::Twirled)]
        protocol: ProtocolArg,
    },
    /// Activation report for a four-party resource rho and a two-qudit state sigma.
    Activate {
        rho: PathBuf,
        sigma: PathBuf,
        /// See-saw restarts for the spread and the witness normalization.
        #[arg(long, default_value_t = 100)]
        restarts: usize,
    },
    /// Run the acceptance suite.
    Verify,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProtocolArg {
    Twirled,
    Direct,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Twirled => Protocol::Twirled,
            ProtocolArg::Direct => Protocol::Direct,
        }
    }
}

fn emit(report: &ReportDocument, out: Option<&PathBuf>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report).expect("plain data serializes");
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("--out {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let seed = cli.seed.unwrap_or(0);
    let report = match cli.command {
        Command::Robustness { input, restarts } => commands::cmd_robustness(
            &input,
            &RobustnessOptions {
                tolerance: cli.tol,
                restarts,
                seed,
            },
        )?,
        Command::Teleport { input, d, protocol } => commands::cmd_teleport(
            &input,
            &TeleportOptions {
                d,
                samples: cli.samples,
                seed,
                protocol: protocol.into(),
            },
        )?,
        Command::Activate { rho, sigma, restarts } => commands::cmd_activate(
            &rho,
            &sigma,
            &RobustnessOptions {
                tolerance: cli.tol,
                restarts,
                seed,
            },
        )?,
        Command::Verify => {
            let config = SuiteConfig {
                seed: cli.seed.unwrap_or(SuiteConfig::default().seed),
                quick: cli.quick,
            };
            let (report, failed) = commands::cmd_verify(config);
            emit(&report, cli.out.as_ref())?;
            return if failed.is_empty() { Ok(()) } else { Err(CliError::Failed(failed)) };
        }
    };
    emit(&report, cli.out.as_ref())
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("robact: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
