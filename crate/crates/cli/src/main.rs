//! `midrange`: command-line front end to the `midrange-core` library.
//!
//! Every command prints one JSON result document on stdout. Exit codes:
//! 0 success, 1 a verified property failed, 2 invalid input, 3 numerical
//! failure or an unfinished search.

mod commands;
mod io;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Debug, Parser)]
#[command(
    name = "midrange",
    version,
    about = "Affine-invariant midrange statistics on SPD matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distance between two matrices of a file.
    Distance {
        /// Matrix file, or `-` for stdin.
        file: String,
        a: String,
        b: String,
        /// `thompson`, `riemannian` or `p=<v>` with v >= 1.
        #[arg(long, default_value = "thompson")]
        metric: String,
    },
    /// Midpoint, or a geodesic point with `--t`, of two matrices.
    Midpoint {
        file: String,
        a: String,
        b: String,
        #[arg(long, value_enum, default_value_t = MidpointKind::Star)]
        kind: MidpointKind,
        /// Geodesic parameter in [0, 1]: Nussbaum geodesic for `star`,
        /// Riemannian geodesic for `geometric`.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Midrange of every matrix (or, with `--vector`, every vector) of a file.
    Midrange {
        file: String,
        #[arg(long)]
        vector: bool,
        /// Bracket width at which the search stops.
        #[arg(long)]
        tol: Option<f64>,
        /// Projection cycles per feasibility check.
        #[arg(long)]
        max_iters: Option<usize>,
        /// Exit with code 3 when the bracket on the optimal cost stays open.
        #[arg(long)]
        strict: bool,
    },
    /// Search for an ensemble whose midrange cost exceeds the pairwise bound,
    /// or test a given ensemble.
    FindGap {
        /// Ensemble to test instead of searching.
        file: Option<String>,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        count: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Defaults to `MIDRANGE_SEED`, else 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1e-3)]
        margin: f64,
    },
    /// Check the metric and midpoint properties on the matrices of a file.
    Verify {
        file: String,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Seed of the random congruence used by the invariance checks;
        /// defaults to `MIDRANGE_SEED`, else 0.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MidpointKind {
    Star,
    Geometric,
    Diamond,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Metric,
    Midpoint,
    Order,
    Scaling,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    PropertyFailed,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
    /// Partial result to print despite the failure.
    pub document: Option<Box<io::ResultDocument>>,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Validation,
            message: message.into(),
            document: None,
        }
    }

    pub fn with_document(
        kind: ErrorKind,
        message: impl Into<String>,
        document: io::ResultDocument,
    ) -> Self {
        Self {
            kind,
            message: message.into(),
            document: Some(Box::new(document)),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            ErrorKind::PropertyFailed => 1,
            ErrorKind::Validation => 2,
            ErrorKind::Numerical => 3,
        }
    }
}

impl From<midrange_core::Error> for CliError {
    fn from(e: midrange_core::Error) -> Self {
        use midrange_core::Error as E;
        let kind = match e {
            E::NumericalFailure(_) | E::InconclusiveSolve { .. } | E::SearchExhausted { .. } => {
                ErrorKind::Numerical
            }
            _ => ErrorKind::Validation,
        };
        Self {
            kind,
            message: e.to_string(),
            document: None,
        }
    }
}

/// `MIDRANGE_SEED` if set, else 0.
fn default_seed() -> Result<u64, CliError> {
    match std::env::var("MIDRANGE_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| {
            CliError::validation(format!("MIDRANGE_SEED={s:?} is not an unsigned integer"))
        }),
        Err(_) => Ok(0),
    }
}

fn run(cli: Cli) -> Result<io::ResultDocument, CliError> {
    match cli.command {
        Command::Distance { file, a, b, metric } => commands::distance(&file, &a, &b, &metric),
        Command::Midpoint {
            file,
            a,
            b,
            kind,
            t,
        } => commands::midpoint(&file, &a, &b, kind, t),
        Command::Midrange {
            file,
            vector,
            tol,
            max_iters,
            strict,
        } => commands::midrange(&file, vector, tol, max_iters, strict),
        Command::FindGap {
            file,
            dim,
            count,
            trials,
            seed,
            margin,
        } => {
            let seed = seed.map_or_else(default_seed, Ok)?;
            commands::find_gap(file.as_deref(), dim, count, trials, seed, margin)
        }
        Command::Verify { file, suite, seed } => {
            let seed = seed.map_or_else(default_seed, Ok)?;
            verify::verify(&file, suite, seed)
        }
    }
}

fn command_name(cli: &Cli) -> &'static str {
    match cli.command {
        Command::Distance { .. } => "distance",
        Command::Midpoint { .. } => "midpoint",
        Command::Midrange { .. } => "midrange",
        Command::FindGap { .. } => "find-gap",
        Command::Verify { .. } => "verify",
    }
}

/// Writes the document to stdout; a closed pipe is not an error.
fn emit(doc: &io::ResultDocument) {
    let _ = writeln!(std::io::stdout().lock(), "{}", doc.to_json());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli);
    match run(cli) {
        Ok(doc) => {
            emit(&doc);
            ExitCode::SUCCESS
        }
        Err(mut e) => {
            let mut doc = e
                .document
                .take()
                .map_or_else(|| io::ResultDocument::new(name, Vec::new()), |d| *d);
            let kind = match e.kind {
                ErrorKind::Validation => "validation",
                ErrorKind::Numerical => "numerical",
                ErrorKind::PropertyFailed => "property_failed",
            };
            doc.diagnostic("error", json!({"kind": kind, "message": e.message}));
            emit(&doc);
            eprintln!("midrange {name}: {}", e.message);
            ExitCode::from(e.exit_code())
        }
    }
}
