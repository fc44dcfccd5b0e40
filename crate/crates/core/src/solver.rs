//! Block-pulse solution of linear Caputo equations with variable coefficients.
//!
//! The problem
//!
//! ```text
//! Σ_k φ_k(t) · ᶜD^{β_k} x(t) = f(t),   x^{(j)}(0) = x_j0,  j = 0..n−1,  n = ⌈max β⌉
//! ```
//!
//! is rewritten in terms of `u = x^{(n)}`. Each Caputo term becomes
//! `I^{m_k−β_k} x^{(m_k)}` with `m_k = ⌈β_k⌉`, and `x^{(m_k)}` is the initial-value
//! Taylor polynomial plus `I^{n−m_k} u`. Replacing every integral by its
//! operational matrix and every product by a diagonal scaling gives a
//! lower-triangular system `A·U = Ψ` for the spectrum of `u`, which is solved by
//! forward substitution. The spectra of `x` and its lower derivatives follow by
//! integrating `U` back up.

use std::fmt;
use std::sync::Arc;

use crate::basis::{monomial_spectrum, try_bp_spectrum, Grid, Spectrum};
use crate::error::{Error, Result};
use crate::opmatrix::{frac_integration_matrix, LowerToeplitz};
use crate::oracle::rl_integral_of_spectrum;
use crate::scalar::Scalar;

/// A real function of time that may fail to evaluate.
pub type Signal<S> = Arc<dyn Fn(S) -> Result<S> + Send + Sync>;

/// Wraps an infallible closure as a [`Signal`].
pub fn signal<S, F>(f: F) -> Signal<S>
where
    S: Scalar,
    F: Fn(S) -> S + Send + Sync + 'static,
{
    Arc::new(move |t| Ok(f(t)))
}

/// Coefficient multiplying one Caputo term.
#[derive(Clone)]
pub enum Coefficient<S> {
    Constant(S),
    Function(Signal<S>),
}

impl<S: Scalar> Coefficient<S> {
    pub fn eval(&self, t: S) -> Result<S> {
        match self {
            Coefficient::Constant(c) => Ok(*c),
            Coefficient::Function(f) => f(t),
        }
    }

    pub fn spectrum(&self, grid: &Grid<S>) -> Result<Spectrum<S>> {
        match self {
            Coefficient::Constant(c) => Spectrum::new(vec![*c; grid.m()], *grid),
            Coefficient::Function(f) => try_bp_spectrum(|t| f(t), grid),
        }
    }
}

impl<S: fmt::Debug> fmt::Debug for Coefficient<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            Coefficient::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// One term `φ(t)·ᶜD^β x(t)`.
#[derive(Debug, Clone)]
pub struct FdeTerm<S> {
    beta: S,
    coeff: Coefficient<S>,
    ceil_order: usize,
}

impl<S: Scalar> FdeTerm<S> {
    pub fn new(beta: S, coeff: Coefficient<S>) -> Result<Self> {
        if !beta.is_finite() || !(beta >= S::zero()) {
            return Err(Error::InvalidOrder {
                order: beta.as_f64(),
                reason: "derivative order must be finite and non-negative",
            });
        }
        let ceil_order = beta.ceil().to_usize().ok_or(Error::InvalidOrder {
            order: beta.as_f64(),
            reason: "derivative order too large",
        })?;
        Ok(Self {
            beta,
            coeff,
            ceil_order,
        })
    }

    pub fn constant(beta: S, c: S) -> Result<Self> {
        Self::new(beta, Coefficient::Constant(c))
    }

    pub fn with_fn<F>(beta: S, f: F) -> Result<Self>
    where
        F: Fn(S) -> S + Send + Sync + 'static,
    {
        Self::new(beta, Coefficient::Function(signal(f)))
    }

    pub fn beta(&self) -> S {
        self.beta
    }

    pub fn coeff(&self) -> &Coefficient<S> {
        &self.coeff
    }

    /// `⌈β⌉`, with `⌈0⌉ = 0`.
    pub fn ceil_order(&self) -> usize {
        self.ceil_order
    }

    fn is_integer(&self) -> bool {
        self.beta == S::from_count(self.ceil_order)
    }
}

/// How the operator acting on `U` in each term is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompositionMode {
    /// One matrix `P^{n−β_k}` per term.
    #[default]
    Single,
    /// The product `P^{m_k−β_k}·P^{n−m_k}`.
    Composed,
}

/// A normalized linear Caputo initial value problem on a block-pulse grid.
#[derive(Clone)]
pub struct FdeProblem<S> {
    terms: Vec<FdeTerm<S>>,
    rhs: Signal<S>,
    ics: Vec<S>,
    grid: Grid<S>,
    mode: CompositionMode,
}

impl<S: fmt::Debug> fmt::Debug for FdeProblem<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FdeProblem")
            .field("terms", &self.terms)
            .field("ics", &self.ics)
            .field("grid", &self.grid)
            .field("mode", &self.mode)
            .finish_non_exhaustive()
    }
}

impl<S: Scalar> FdeProblem<S> {
    /// Terms are sorted by descending order. The highest-order term must
    /// have the constant coefficient 1, and `ics` holds `x(0), x'(0), …` up to
    /// order `⌈β_max⌉ − 1`.
    pub fn new(
        mut terms: Vec<FdeTerm<S>>,
        rhs: Signal<S>,
        ics: Vec<S>,
        grid: Grid<S>,
    ) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidProblem(
                "at least one term is required".into(),
            ));
        }
        terms.sort_by(|a, b| b.beta.partial_cmp(&a.beta).expect("orders are finite"));
        if let Some(w) = terms.windows(2).find(|w| w[0].beta == w[1].beta) {
            return Err(Error::InvalidProblem(format!(
                "order {} appears more than once",
                w[0].beta
            )));
        }
        let lead = &terms[0];
        if lead.ceil_order == 0 {
            return Err(Error::InvalidProblem(
                "highest derivative order must be positive".into(),
            ));
        }
        match lead.coeff {
            Coefficient::Constant(c) if c == S::one() => {}
            _ => {
                return Err(Error::InvalidProblem(format!(
                    "the order-{} term must have coefficient 1 (divide the equation through)",
                    lead.beta
                )))
            }
        }
        if ics.len() != lead.ceil_order {
            return Err(Error::InvalidProblem(format!(
                "expected {} initial values for highest order {}, got {}",
                lead.ceil_order,
                lead.beta,
                ics.len()
            )));
        }
        if let Some(v) = ics.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "initial value {v} is not finite"
            )));
        }
        Ok(Self {
            terms,
            rhs,
            ics,
            grid,
            mode: CompositionMode::default(),
        })
    }

    pub fn with_composition_mode(mut self, mode: CompositionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn terms(&self) -> &[FdeTerm<S>] {
        &self.terms
    }

    pub fn rhs(&self) -> &Signal<S> {
        &self.rhs
    }

    pub fn ics(&self) -> &[S] {
        &self.ics
    }

    pub fn grid(&self) -> &Grid<S> {
        &self.grid
    }

    pub fn composition_mode(&self) -> CompositionMode {
        self.mode
    }

    /// `n = ⌈β_max⌉`, the integer order of the unknown `u = x^{(n)}`.
    pub fn order(&self) -> usize {
        self.terms[0].ceil_order
    }
}

/// Dense lower-triangular matrix with packed row storage.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular<S> {
    m: usize,
    data: Vec<S>,
}

impl<S: Scalar> LowerTriangular<S> {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            data: vec![S::zero(); m * (m + 1) / 2],
        }
    }

    /// Accepts a square row-major matrix whose strict upper part is zero.
    pub fn from_dense(rows: &[Vec<S>]) -> Result<Self> {
        let m = rows.len();
        let mut out = Self::zeros(m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::LengthMismatch { len: row.len(), m });
            }
            for (j, &v) in row.iter().enumerate() {
                if j > i {
                    if v != S::zero() {
                        return Err(Error::NotLowerTriangular { row: i, col: j });
                    }
                } else {
                    *out.get_mut(i, j) = v;
                }
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> S {
        if col > row {
            S::zero()
        } else {
            self.data[row * (row + 1) / 2 + col]
        }
    }

    fn get_mut(&mut self, row: usize, col: usize) -> &mut S {
        debug_assert!(col <= row);
        &mut self.data[row * (row + 1) / 2 + col]
    }

    fn row(&self, row: usize) -> &[S] {
        let start = row * (row + 1) / 2;
        &self.data[start..start + row + 1]
    }

    pub fn to_dense(&self) -> Vec<Vec<S>> {
        (0..self.m)
            .map(|i| (0..self.m).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn max_abs(&self) -> S {
        self.data.iter().fold(S::zero(), |acc, v| acc.max(v.abs()))
    }

    /// Adds `D(scale) · T` for a lower-triangular Toeplitz `T`.
    fn add_scaled_toeplitz(&mut self, scale: &[S], toeplitz: &LowerToeplitz<S>) {
        let col = toeplitz.first_col();
        for (i, &s) in scale.iter().enumerate() {
            for j in 0..=i {
                *self.get_mut(i, j) = self.entry(i, j) + s * col[i - j];
            }
        }
    }
}

/// Builds `A` and `Ψ` such that `A·U = Ψ` for the spectrum `U` of `x^{(n)}`.
pub fn assemble_system<S: Scalar>(
    problem: &FdeProblem<S>,
) -> Result<(LowerTriangular<S>, Spectrum<S>)> {
    let grid = problem.grid;
    let n = problem.order();
    let rhs = &problem.rhs;
    let mut psi = try_bp_spectrum(|t| rhs(t), &grid)?;
    let mut a = LowerTriangular::zeros(grid.m());

    for term in &problem.terms {
        let phi = term.coeff.spectrum(&grid)?;
        let mk = term.ceil_order;
        let inner = S::from_count(mk) - term.beta;
        let caputo = frac_integration_matrix(inner, &grid)?;
        let operator = match problem.mode {
            CompositionMode::Single => {
                frac_integration_matrix(S::from_count(n) - term.beta, &grid)?
                    .toeplitz()
                    .clone()
            }
            CompositionMode::Composed => {
                caputo.compose(&frac_integration_matrix(S::from_count(n - mk), &grid)?)?
            }
        };
        a.add_scaled_toeplitz(phi.coeffs(), &operator);

        if mk < n {
            let poly = taylor_spectrum(&problem.ics[mk..], &grid)?;
            let known = caputo.apply(&poly)?;
            psi = psi.axpy(-S::one(), &phi.hadamard(&known)?)?;
        }
    }

    if let Some(k) = a.data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "system matrix",
            t: k as f64,
        });
    }
    Ok((a, psi))
}

/// Spectrum of `Σ_j c_j t^j / j!`.
fn taylor_spectrum<S: Scalar>(coeffs: &[S], grid: &Grid<S>) -> Result<Spectrum<S>> {
    let mut acc = Spectrum::zeros(*grid);
    let mut factorial = S::one();
    for (j, &c) in coeffs.iter().enumerate() {
        if j > 0 {
            factorial = factorial * S::from_count(j);
        }
        if c != S::zero() {
            let mono = monomial_spectrum(S::from_count(j), grid)?;
            acc = acc.axpy(c / factorial, &mono)?;
        }
    }
    Ok(acc)
}

/// Forward substitution for `A·U = Ψ`.
///
/// Any pivot with `|A_ii| ≤ 1e−12·max|A|` is rejected.
pub fn solve_triangular<S: Scalar>(a: &LowerTriangular<S>, psi: &[S]) -> Result<Vec<S>> {
    let m = a.dim();
    if psi.len() != m {
        return Err(Error::LengthMismatch { len: psi.len(), m });
    }
    let tolerance = S::lit(1e-12) * a.max_abs();
    let mut u: Vec<S> = Vec::with_capacity(m);
    for (i, &rhs) in psi.iter().enumerate() {
        let row = a.row(i);
        let pivot = row[i];
        if !(pivot.abs() > tolerance) {
            return Err(Error::SingularSystem {
                row: i,
                pivot: pivot.as_f64(),
                tolerance: tolerance.as_f64(),
            });
        }
        let dot = row[..i]
            .iter()
            .zip(&u)
            .fold(S::zero(), |acc, (&l, &x)| acc + l * x);
        u.push((rhs - dot) / pivot);
    }
    if let Some(i) = u.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "solution spectrum",
            t: i as f64,
        });
    }
    Ok(u)
}

/// Spectra of `x^{(j)}`, `j = 0..n−1`, from `U` and the initial values.
///
/// `X_j = Σ_{l=j}^{n−1} x_l0 · t^{l−j}/(l−j)! + P^{n−j}·U`; entry `j` of the
/// result is the spectrum of `x^{(j)}`.
pub fn derivative_spectra<S: Scalar>(u: &Spectrum<S>, ics: &[S]) -> Result<Vec<Spectrum<S>>> {
    let grid = u.grid();
    let n = ics.len();
    (0..n)
        .map(|j| {
            let integrated = frac_integration_matrix(S::from_count(n - j), grid)?.apply(u)?;
            taylor_spectrum(&ics[j..], grid)?.axpy(S::one(), &integrated)
        })
        .collect()
}

/// Spectra of the solution and all its integer derivatives up to order `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdeSolution<S> {
    u_spectrum: Spectrum<S>,
    deriv_spectra: Vec<Spectrum<S>>,
    grid: Grid<S>,
}

impl<S: Scalar> FdeSolution<S> {
    /// Spectrum of `u = x^{(n)}`.
    pub fn u_spectrum(&self) -> &Spectrum<S> {
        &self.u_spectrum
    }

    /// Spectra of `x, x', …, x^{(n−1)}`.
    pub fn deriv_spectra(&self) -> &[Spectrum<S>] {
        &self.deriv_spectra
    }

    pub fn grid(&self) -> &Grid<S> {
        &self.grid
    }

    pub fn order(&self) -> usize {
        self.deriv_spectra.len()
    }

    /// Spectrum of `x^{(j)}` for `j ≤ n`.
    pub fn spectrum(&self, j: usize) -> Option<&Spectrum<S>> {
        match j.cmp(&self.order()) {
            std::cmp::Ordering::Less => Some(&self.deriv_spectra[j]),
            std::cmp::Ordering::Equal => Some(&self.u_spectrum),
            std::cmp::Ordering::Greater => None,
        }
    }

    /// Piecewise-constant approximation of `x(t)`.
    pub fn value(&self, t: S) -> Result<S> {
        self.deriv_spectra[0].reconstruct(t)
    }

    /// Piecewise-constant approximation of `x^{(j)}(t)`, `j ≤ n`.
    pub fn derivative(&self, j: usize, t: S) -> Result<S> {
        self.spectrum(j)
            .ok_or(Error::InvalidOrder {
                order: j as f64,
                reason: "derivative order exceeds the problem order",
            })?
            .reconstruct(t)
    }
}

pub fn solve<S: Scalar>(problem: &FdeProblem<S>) -> Result<FdeSolution<S>> {
    let (a, psi) = assemble_system(problem)?;
    let u = Spectrum::new(solve_triangular(&a, psi.coeffs())?, problem.grid)?;
    let deriv_spectra = derivative_spectra(&u, &problem.ics)?;
    Ok(FdeSolution {
        u_spectrum: u,
        deriv_spectra,
        grid: problem.grid,
    })
}

/// Signed equation residual of the reconstructed solution at each point.
///
/// Every Caputo term is evaluated exactly on the block-pulse expansion of
/// `x^{(m_k)}`; integer-order terms read the expansion directly.
pub fn residual<S: Scalar>(
    sol: &FdeSolution<S>,
    problem: &FdeProblem<S>,
    points: &[S],
) -> Result<Vec<S>> {
    sol.grid.check_same(&problem.grid)?;
    points
        .iter()
        .map(|&t| {
            let mut lhs = S::zero();
            for term in &problem.terms {
                let base = sol.spectrum(term.ceil_order).ok_or(Error::InvalidProblem(
                    "solution order does not match the problem".into(),
                ))?;
                let caputo = if term.is_integer() {
                    base.reconstruct(t)?
                } else {
                    rl_integral_of_spectrum(base, S::from_count(term.ceil_order) - term.beta, t)?
                };
                lhs = lhs + term.coeff.eval(t)? * caputo;
            }
            Ok(lhs - (problem.rhs)(t)?)
        })
        .collect()
}
