//! Block-pulse operational solver for linear differential equations with
//! Caputo fractional (or mixed integer/fractional) derivatives and variable
//! coefficients.
//!
//! Signals on `[0, T)` are represented by their block-pulse spectra (means
//! over `m` equal subintervals). Fractional integration of order β becomes
//! multiplication by a lower-triangular Toeplitz matrix `P^β`, which turns an
//! initial value problem into a triangular linear system.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below name the common instantiations.
//!
//! ```
//! use bpfrac::{solve, signal, FdeProblem64, FdeTerm, Grid64};
//!
//! // ᶜD^{1.5} x + x = 1 with x(0) = x'(0) = 0 on [0, 2)
//! let problem = FdeProblem64::new(
//!     vec![FdeTerm::constant(1.5, 1.0)?, FdeTerm::constant(0.0, 1.0)?],
//!     signal(|_| 1.0),
//!     vec![0.0, 0.0],
//!     Grid64::new(100, 2.0)?,
//! )?;
//! let solution = solve(&problem)?;
//! let x = solution.value(1.0)?;
//! assert!(x > 0.0 && x < 1.5);
//! # Ok::<(), bpfrac::Error>(())
//! ```

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod error;
pub mod expr;
mod gamma;
pub mod opmatrix;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod solver;

pub use basis::{
    bp_spectrum, bp_value, monomial_spectrum, project_general, try_bp_spectrum, Grid, Spectrum,
};
pub use error::{Error, Result};
pub use expr::{parse, Expr};
pub use opmatrix::{frac_integration_matrix, gamma, LowerToeplitz, OpMatrix};
pub use oracle::{caputo_derivative, rl_integral, rl_integral_of_spectrum, FracOrder};
pub use scalar::Scalar;
pub use solver::{
    assemble_system, derivative_spectra, residual, signal, solve, solve_triangular, Coefficient,
    CompositionMode, FdeProblem, FdeSolution, FdeTerm, LowerTriangular, Signal,
};

pub type Grid64 = Grid<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type OpMatrix64 = OpMatrix<f64>;
pub type FdeProblem64 = FdeProblem<f64>;
pub type FdeSolution64 = FdeSolution<f64>;

pub type Grid32 = Grid<f32>;
pub type Spectrum32 = Spectrum<f32>;
pub type OpMatrix32 = OpMatrix<f32>;
pub type FdeProblem32 = FdeProblem<f32>;
pub type FdeSolution32 = FdeSolution<f32>;
