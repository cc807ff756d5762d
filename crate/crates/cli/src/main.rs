use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use extremal_cli::commands::{
    self, parse_forms, parse_zeros, ClassifyArgs, DiscArgs, Form, EXIT_ERROR,
};
use extremal_cli::{CliError, Outcome};
use extremal_core::DEFAULT_TOL;

/// Classify linear maps between matrix algebras whose adjoints preserve
/// extreme points of the dual ball.
#[derive(Parser)]
#[command(name = "extremal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a superoperator stored as JSON.
    Classify {
        path: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Mode::Extremal)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Seed for witness searches.
        #[arg(long, env = "EXTREMAL_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Write a random map in one of the canonical forms.
    Generate {
        /// One of 1, 1t, 2, 2a.
        #[arg(long, conflicts_with = "blocks")]
        form: Option<String>,
        #[arg(long, num_args = 2, value_names = ["K", "H"], required = true)]
        dims: Vec<usize>,
        /// Comma-separated forms, one output block each.
        #[arg(long)]
        blocks: Option<String>,
        #[arg(long, env = "EXTREMAL_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a composition-multiplication operator on the disc algebra.
    Disc {
        #[arg(long, default_value = "[]", allow_hyphen_values = true)]
        psi_zeros: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        psi_phase: f64,
        #[arg(long, default_value = "[0]", allow_hyphen_values = true)]
        phi_zeros: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi_phase: f64,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Extremal,
    Pure,
    Jordan,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

impl From<Mode> for commands::Mode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Extremal => Self::Extremal,
            Mode::Pure => Self::Pure,
            Mode::Jordan => Self::Jordan,
        }
    }
}

impl From<Format> for commands::Format {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => Self::Json,
            Format::Text => Self::Text,
        }
    }
}

fn run(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Classify {
            path,
            tol,
            mode,
            format,
            seed,
        } => commands::run_classify(&ClassifyArgs {
            path,
            tol,
            mode: mode.into(),
            format: format.into(),
            seed,
        }),
        Command::Generate {
            form,
            dims,
            blocks,
            seed,
            out,
        } => {
            let forms: Vec<Form> = match (form, blocks) {
                (_, Some(list)) => parse_forms(&list)?,
                (Some(f), None) => vec![f.parse()?],
                (None, None) => {
                    return Err(CliError::InvalidArgument(
                        "one of --form or --blocks is required".into(),
                    ))
                }
            };
            commands::run_generate(&forms, dims[0], dims[1], seed, out.as_deref())
        }
        Command::Disc {
            psi_zeros,
            psi_phase,
            phi_zeros,
            phi_phase,
            grid,
            tol,
            format,
        } => commands::run_disc(&DiscArgs {
            psi_zeros: parse_zeros(&psi_zeros)?,
            psi_phase,
            phi_zeros: parse_zeros(&phi_zeros)?,
            phi_phase,
            grid,
            tol,
            format: format.into(),
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_ERROR as u8),
            };
        }
    };
    match run(cli.command) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            let _ = stdout.flush();
            ExitCode::from(outcome.code as u8)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
