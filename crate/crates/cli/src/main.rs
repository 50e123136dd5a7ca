//! `negafont` command-line tool.

mod commands;
mod text;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use negafont::Error;

/// Negativity fonts, partial transposes and entanglement classes of
/// multiqubit pure states.
#[derive(Parser, Debug)]
#[command(name = "negafont", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct StateArg {
    /// State as a ket expression, e.g. "|000> + |111>".
    #[arg(long)]
    pub state: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Assign the class and subclass of a 3- or 4-qubit state.
    Classify(ClassifyArgs),
    /// List the negativity fonts for one transposed qubit.
    Fonts {
        #[command(flatten)]
        state: StateArg,
        #[arg(long)]
        qubit: usize,
        /// Restrict to fonts of order K.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = negafont::qstate::DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Global (or K-way) partial transpose: negativity and decomposition residual.
    Transpose {
        #[command(flatten)]
        state: StateArg,
        #[arg(long)]
        qubit: usize,
        #[arg(long)]
        k: Option<usize>,
        /// Include the full matrix.
        #[arg(long)]
        dump: bool,
        #[arg(long)]
        json: bool,
    },
    /// Global and K-way negativities per qubit.
    Negativity {
        #[command(flatten)]
        state: StateArg,
        /// Single qubit; all qubits if omitted.
        #[arg(long)]
        qubit: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Canonical form under local unitaries (exact for 3 qubits).
    Canonicalize {
        #[command(flatten)]
        state: StateArg,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = negafont::qstate::DEFAULT_TOL)]
        tol: f64,
        /// Further reduce the term count with invertible local operators.
        #[arg(long)]
        slocc: bool,
        #[arg(long)]
        json: bool,
    },
    /// 3-tangle, cluster invariant and font-sum identity check.
    Invariants {
        #[command(flatten)]
        state: StateArg,
        #[arg(long)]
        json: bool,
    },
    /// Number of major classes and N-partite entanglement types.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["state", "file"]))]
pub struct ClassifyArgs {
    #[arg(long)]
    pub state: Option<String>,
    /// File with one ket expression per line; emits one JSON record per line.
    #[arg(long)]
    pub file: Option<std::path::PathBuf>,
    /// Canonicalize before classifying (the default).
    #[arg(long, conflicts_with = "assume_canonical")]
    pub canonicalize: bool,
    /// Treat a 4-qubit input as already canonical.
    #[arg(long)]
    pub assume_canonical: bool,
    #[arg(long, default_value_t = negafont::qstate::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub json: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
}

/// Failure of a command, mapped onto the exit code.
#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    /// Invalid flag values or unreadable input files.
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(Error::Parse(_)) => 1,
            CliError::Lib(Error::InvalidState(_)) => 2,
            CliError::Lib(
                Error::Numeric(_) | Error::DegenerateSlot | Error::NoSolution(_) | Error::Inconsistent(_),
            ) => 3,
            CliError::Lib(Error::Domain(_)) | CliError::Usage(_) => 4,
        }
    }
}

fn report(err: &CliError, input: Option<&str>) {
    match err {
        CliError::Lib(Error::Parse(p)) => {
            eprintln!("error: {p}");
            if let Some(text) = input.filter(|t| !t.contains('\n')) {
                eprintln!("  {text}");
                eprintln!("  {}^", " ".repeat(text[..p.offset.min(text.len())].chars().count()));
            }
        }
        CliError::Lib(e) => eprintln!("error: {e}"),
        CliError::Usage(m) => eprintln!("error: {m}"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let input = commands::state_text(&cli.command).map(str::to_owned);
    match commands::run(&cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            report(&e, input.as_deref());
            ExitCode::from(e.exit_code())
        }
    }
}
