//! Library half of the `bpfrac` command-line tool.
//!
//! Every command renders its full output into a `String` before anything is
//! written, so a failing run never leaves a partial file behind.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod format;
pub mod problem;

use std::fmt::Write as _;

use bpfrac::{
    bp_spectrum, frac_integration_matrix, parse, residual, solve, try_bp_spectrum, Grid64,
};
use thiserror::Error;

pub use format::format_sig;
pub use problem::ProblemFile;

pub const DEFAULT_PRECISION: usize = 12;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad file, flag, or expression. Exit code 1.
    #[error("{0}")]
    Input(String),
    /// Singular pivot, non-finite value, or failed evaluation. Exit code 2.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn from_core(e: bpfrac::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Rows to emit; `None` or `Some(m)` means subinterval midpoints.
    pub samples: Option<usize>,
    pub precision: usize,
    pub residual: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            samples: None,
            precision: DEFAULT_PRECISION,
            residual: false,
        }
    }
}

fn check_precision(precision: usize) -> Result<(), CliError> {
    if (1..=17).contains(&precision) {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "--precision must be between 1 and 17, got {precision}"
        )))
    }
}

fn grid(m: usize, length: f64) -> Result<Grid64, CliError> {
    Grid64::new(m, length).map_err(|e| CliError::Input(e.to_string()))
}

/// Column name for the `j`-th derivative: `x`, `dx`, `d2x`, ...
fn derivative_column(j: usize) -> String {
    match j {
        0 => "x".to_string(),
        1 => "dx".to_string(),
        _ => format!("d{j}x"),
    }
}

/// Solves a problem file and renders the solution trace as CSV.
pub fn run_solve(text: &str, opts: &SolveOptions) -> Result<String, CliError> {
    check_precision(opts.precision)?;
    let file = ProblemFile::parse(text)?;
    let problem = file.to_problem()?;
    let grid = *problem.grid();
    let points: Vec<f64> = match opts.samples {
        Some(0) => return Err(CliError::Input("--samples must be at least 1".into())),
        Some(k) if k != grid.m() => {
            let dt = grid.length() / k as f64;
            (0..k).map(|i| i as f64 * dt).collect()
        }
        _ => grid.midpoints().collect(),
    };

    let sol = solve(&problem).map_err(CliError::from_core)?;
    let residuals = if opts.residual {
        Some(residual(&sol, &problem, &points).map_err(CliError::from_core)?)
    } else {
        None
    };

    let n = sol.order();
    let mut out = String::from("t");
    for j in 0..=n {
        out.push(',');
        out.push_str(&derivative_column(j));
    }
    if residuals.is_some() {
        out.push_str(",residual");
    }
    out.push('\n');

    let fmt = |v: f64| format_sig(v, opts.precision);
    for (row, &t) in points.iter().enumerate() {
        out.push_str(&fmt(t));
        for j in 0..=n {
            let v = sol.derivative(j, t).map_err(CliError::from_core)?;
            out.push(',');
            out.push_str(&fmt(v));
        }
        if let Some(r) = &residuals {
            out.push(',');
            out.push_str(&fmt(r[row]));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Dense `P^β` as headerless CSV rows, 12 significant digits.
pub fn run_opmatrix(beta: f64, m: usize, length: f64) -> Result<String, CliError> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(CliError::Input(format!(
            "--beta must be a finite non-negative number, got {beta}"
        )));
    }
    let p = frac_integration_matrix(beta, &grid(m, length)?).map_err(CliError::from_core)?;
    let mut out = String::new();
    for row in p.to_dense() {
        let cells: Vec<String> = row
            .iter()
            .map(|&v| format_sig(v, DEFAULT_PRECISION))
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Block-pulse spectrum of an expression as `index,midpoint_t,coefficient`.
pub fn run_spectrum(
    expr: &str,
    m: usize,
    length: f64,
    precision: usize,
) -> Result<String, CliError> {
    check_precision(precision)?;
    let e = parse(expr).map_err(|err| CliError::Input(format!("in \"{expr}\": {err}")))?;
    let g = grid(m, length)?;
    let spectrum = if e.is_constant() {
        let c = e.eval(0.0).map_err(CliError::from_core)?;
        bp_spectrum(|_| c, &g)
    } else {
        try_bp_spectrum(|t| e.eval(t), &g)
    }
    .map_err(CliError::from_core)?;
    let mut out = String::from("index,midpoint_t,coefficient\n");
    for (i, &c) in spectrum.coeffs().iter().enumerate() {
        writeln!(
            out,
            "{},{},{}",
            i + 1,
            format_sig(g.midpoint(i), precision),
            format_sig(c, precision)
        )
        .expect("writing to a String cannot fail");
    }
    Ok(out)
}
