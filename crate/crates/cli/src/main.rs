use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bpfrac_cli::{
    run_opmatrix, run_solve, run_spectrum, CliError, SolveOptions, DEFAULT_PRECISION,
};
use clap::{Parser, Subcommand};

/// Block-pulse solver for linear Caputo fractional differential equations.
#[derive(Debug, Parser)]
#[command(name = "bpfrac", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a problem file and write the solution trace as CSV.
    Solve {
        /// Problem file.
        file: PathBuf,
        /// Output path (stdout if omitted).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Number of evenly spaced rows; defaults to m (subinterval midpoints).
        #[arg(long)]
        samples: Option<usize>,
        /// Significant digits in the output.
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: usize,
        /// Append the equation residual as a final column.
        #[arg(long)]
        residual: bool,
    },
    /// Write the dense fractional integration matrix P^beta as CSV.
    Opmatrix {
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long)]
        m: usize,
        #[arg(long = "T", allow_negative_numbers = true)]
        length: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write the block-pulse spectrum of an expression in t as CSV.
    Spectrum {
        #[arg(long, allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        m: usize,
        #[arg(long = "T", allow_negative_numbers = true)]
        length: f64,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            file,
            output,
            samples,
            precision,
            residual,
        } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", file.display())))?;
            let opts = SolveOptions {
                samples,
                precision,
                residual,
            };
            emit(output.as_deref(), &run_solve(&text, &opts)?)
        }
        Command::Opmatrix {
            beta,
            m,
            length,
            output,
        } => emit(output.as_deref(), &run_opmatrix(beta, m, length)?),
        Command::Spectrum {
            expr,
            m,
            length,
            precision,
            output,
        } => emit(
            output.as_deref(),
            &run_spectrum(&expr, m, length, precision)?,
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
