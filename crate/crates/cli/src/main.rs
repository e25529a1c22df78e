//! Command-line front end: every analysis as a subcommand with
//! machine-readable output on stdout and diagnostics on stderr.
//!
//! Exit codes: 0 success, 2 usage or precondition failure, 3 numeric
//! non-convergence (ac regime detected, unstable count), 4 excluded
//! spectral point.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use spectral_phase::eigensolve::DEFAULT_EIG_TOL;
use spectral_phase::model::DEFAULT_CLASSIFY_TOL;
use spectral_phase::{Error, Result};

#[derive(Parser)]
#[command(
    name = "spectral-phase",
    version,
    about = "Spectral analysis of Jacobi matrices with linearly growing, \
             2-periodically modulated entries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Upward recursion from the seed pair (u1, u2).
    Forward,
    /// Downward minimal-solution recovery; ignores u1 and u2.
    Backward,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ZeroSide {
    /// The odd-indexed weights vanish.
    C1,
    /// The even-indexed weights vanish.
    C2,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a parameter pair into its spectral region (JSON).
    #[command(allow_negative_numbers = true)]
    Classify {
        #[arg(long)]
        c1: f64,
        #[arg(long)]
        c2: f64,
        /// Absolute tolerance of the critical-line membership tests.
        #[arg(long, default_value_t = DEFAULT_CLASSIFY_TOL)]
        tol: f64,
    },
    /// Solve the three-term recurrence and print the trace (CSV).
    #[command(allow_negative_numbers = true)]
    Solve {
        #[arg(long)]
        c1: f64,
        #[arg(long)]
        c2: f64,
        #[arg(long)]
        lambda: f64,
        /// Number of entries to produce.
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Mode::Forward)]
        mode: Mode,
        /// First seed entry (forward mode).
        #[arg(long, default_value_t = 1.0)]
        u1: f64,
        /// Second seed entry (forward mode).
        #[arg(long, default_value_t = 1.0)]
        u2: f64,
    },
    /// Describe the asymptotics of the two canonical solutions (JSON).
    #[command(allow_negative_numbers = true)]
    Asym {
        #[arg(long)]
        c1: f64,
        #[arg(long)]
        c2: f64,
        #[arg(long)]
        lambda: f64,
    },
    /// Eigenvalues of the size x size truncation inside [lo, hi) (CSV).
    #[command(allow_negative_numbers = true)]
    Spectrum {
        #[arg(long)]
        c1: f64,
        #[arg(long)]
        c2: f64,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        /// Bisection width at which an eigenvalue counts as located.
        #[arg(long, default_value_t = DEFAULT_EIG_TOL)]
        tol: f64,
        /// Worker threads (default: all cores); SPECTRAL_PHASE_THREADS wins.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Sweep a square parameter grid and print region codes (CSV).
    #[command(allow_negative_numbers = true)]
    PhaseDiagram {
        #[arg(long, default_value_t = -2.0)]
        min: f64,
        #[arg(long, default_value_t = 2.0)]
        max: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        /// Absolute tolerance of the critical-line membership tests.
        #[arg(long, default_value_t = DEFAULT_CLASSIFY_TOL)]
        tol: f64,
        /// Worker threads (default: all cores); SPECTRAL_PHASE_THREADS wins.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Search witness depths certifying point spectrum below 1/2 (JSON).
    #[command(allow_negative_numbers = true)]
    Witness {
        #[arg(long)]
        c1: f64,
        #[arg(long)]
        c2: f64,
        /// Largest witness depth to try.
        #[arg(long)]
        n_max: usize,
    },
    /// Check the eigenvalue-count bound below 1/2 - eps (JSON).
    #[command(allow_negative_numbers = true)]
    Count {
        #[arg(long)]
        c1: f64,
        #[arg(long)]
        c2: f64,
        #[arg(long)]
        eps: f64,
        /// Truncation size; stability is checked against twice this size.
        #[arg(long)]
        size: usize,
    },
    /// Closed-form spectrum of a degenerate operator (CSV).
    #[command(allow_negative_numbers = true)]
    Degenerate {
        /// The surviving weight coefficient.
        #[arg(long)]
        c: f64,
        /// Which coefficient is zero.
        #[arg(long, value_enum)]
        zero: ZeroSide,
        /// Number of blocks to expand.
        #[arg(long)]
        n_max: usize,
    },
}

/// The environment variable overrides the flag; unset means the flag.
fn thread_override(flag: Option<usize>) -> Result<Option<usize>> {
    match std::env::var("SPECTRAL_PHASE_THREADS") {
        Ok(text) => match text.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Some(k)),
            _ => Err(Error::InvalidInput(
                "SPECTRAL_PHASE_THREADS must be a positive integer",
            )),
        },
        Err(std::env::VarError::NotPresent) => Ok(flag),
        Err(std::env::VarError::NotUnicode(_)) => Err(Error::InvalidInput(
            "SPECTRAL_PHASE_THREADS must be a positive integer",
        )),
    }
}

fn run(command: Command) -> Result<String> {
    match command {
        Command::Classify { c1, c2, tol } => commands::classify_cmd(c1, c2, tol),
        Command::Solve {
            c1,
            c2,
            lambda,
            n,
            mode,
            u1,
            u2,
        } => commands::solve_cmd(c1, c2, lambda, n, mode == Mode::Forward, u1, u2),
        Command::Asym { c1, c2, lambda } => commands::asym_cmd(c1, c2, lambda),
        Command::Spectrum {
            c1,
            c2,
            size,
            lo,
            hi,
            tol,
            threads,
        } => commands::spectrum_cmd(c1, c2, size, lo, hi, tol, thread_override(threads)?),
        Command::PhaseDiagram {
            min,
            max,
            step,
            tol,
            threads,
        } => commands::phase_diagram_cmd(min, max, step, tol, thread_override(threads)?),
        Command::Witness { c1, c2, n_max } => commands::witness_cmd(c1, c2, n_max),
        Command::Count { c1, c2, eps, size } => commands::count_cmd(c1, c2, eps, size),
        Command::Degenerate { c, zero, n_max } => {
            commands::degenerate_cmd(c, zero == ZeroSide::C1, n_max)
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NoConvergence { .. } | Error::UnstableCount { .. } => 3,
        Error::HalfLineResonance => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            if matches!(err, Error::NoConvergence { .. }) {
                eprintln!(
                    "no minimal solution was found; this is the expected outcome \
                     when lambda lies inside the absolutely continuous spectrum"
                );
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
