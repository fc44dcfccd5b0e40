//! Block-pulse basis on `[0, T)`: grids, spectra and reconstruction.
//!
//! A grid splits `[0, T)` into `m` half-open subintervals of width `h = T/m`.
//! Basis function `i` (0-based) is 1 on `[i·h, (i+1)·h)` and 0 elsewhere, so a
//! point on a boundary belongs to the interval on its right. The spectrum of a
//! signal is the vector of its subinterval means.

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::Scalar;

/// Uniform partition of `[0, T)` into `m` subintervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<S> {
    m: usize,
    length: S,
}

impl<S: Scalar> Grid<S> {
    pub fn new(m: usize, length: S) -> Result<Self> {
        if m == 0 || !length.is_finite() || length <= S::zero() {
            return Err(Error::InvalidGrid {
                m,
                length: length.as_f64(),
            });
        }
        Ok(Self { m, length })
    }

    /// Number of subintervals.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Interval length `T`.
    pub fn length(&self) -> S {
        self.length
    }

    /// Subinterval width `h = T/m`.
    pub fn step(&self) -> S {
        self.length / S::from_count(self.m)
    }

    /// Left edge of subinterval `i`.
    pub fn left(&self, i: usize) -> S {
        S::from_count(i) * self.step()
    }

    pub fn midpoint(&self, i: usize) -> S {
        (S::from_count(i) + S::lit(0.5)) * self.step()
    }

    pub fn midpoints(&self) -> impl Iterator<Item = S> + '_ {
        (0..self.m).map(|i| self.midpoint(i))
    }

    /// Index of the subinterval containing `t`.
    pub fn locate(&self, t: S) -> Result<usize> {
        if !(t >= S::zero() && t < self.length) {
            return Err(Error::OutOfDomain {
                t: t.as_f64(),
                length: self.length.as_f64(),
            });
        }
        let guess = (t / self.step()).floor().to_usize().unwrap_or(0);
        let mut i = guess.min(self.m - 1);
        // The quotient can land one cell off when t sits near a boundary.
        if i > 0 && t < self.left(i) {
            i -= 1;
        } else if i + 1 < self.m && t >= self.left(i + 1) {
            i += 1;
        }
        Ok(i)
    }

    fn same_as(&self, other: &Self) -> bool {
        self.m == other.m && self.length == other.length
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Value of block-pulse function `index` at `t`: 1 on its own subinterval, else 0.
pub fn bp_value<S: Scalar>(grid: &Grid<S>, index: usize, t: S) -> Result<S> {
    if index >= grid.m() {
        return Err(Error::IndexOutOfRange { index, m: grid.m() });
    }
    match grid.locate(t) {
        Ok(i) if i == index => Ok(S::one()),
        _ => Ok(S::zero()),
    }
}

/// Block-pulse coefficient vector of a signal, tied to its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<S> {
    coeffs: Vec<S>,
    grid: Grid<S>,
}

impl<S: Scalar> Spectrum<S> {
    pub fn new(coeffs: Vec<S>, grid: Grid<S>) -> Result<Self> {
        if coeffs.len() != grid.m() {
            return Err(Error::LengthMismatch {
                len: coeffs.len(),
                m: grid.m(),
            });
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: "spectrum coefficient",
                t: grid.midpoint(i).as_f64(),
            });
        }
        Ok(Self { coeffs, grid })
    }

    pub fn zeros(grid: Grid<S>) -> Self {
        Self::constant(S::zero(), grid)
    }

    /// Spectrum of the constant function `value`.
    pub fn constant(value: S, grid: Grid<S>) -> Self {
        Self {
            coeffs: vec![value; grid.m()],
            grid,
        }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn grid(&self) -> &Grid<S> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Piecewise-constant reconstruction at `t`.
    pub fn reconstruct(&self, t: S) -> Result<S> {
        Ok(self.coeffs[self.grid.locate(t)?])
    }

    pub fn scaled(&self, a: S) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| a * c).collect(),
            grid: self.grid,
        }
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: S, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&x, &y)| x + a * y)
            .collect();
        Self::new(coeffs, self.grid)
    }

    /// Componentwise product, i.e. `D(self)·other`.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&x, &y)| x * y)
            .collect();
        Self::new(coeffs, self.grid)
    }

    pub fn max_abs(&self) -> S {
        self.coeffs
            .iter()
            .fold(S::zero(), |acc, &c| acc.max(c.abs()))
    }
}

/// Spectrum of `f`: per-subinterval means by 16-point Gauss–Legendre.
pub fn bp_spectrum<S, F>(f: F, grid: &Grid<S>) -> Result<Spectrum<S>>
where
    S: Scalar,
    F: Fn(S) -> S,
{
    try_bp_spectrum(|t| Ok(f(t)), grid)
}

/// As [`bp_spectrum`] for a fallible signal; the first error is returned.
pub fn try_bp_spectrum<S, F>(f: F, grid: &Grid<S>) -> Result<Spectrum<S>>
where
    S: Scalar,
    F: Fn(S) -> Result<S>,
{
    let rule = GaussLegendre::spectrum_rule();
    let h = grid.step();
    let mut coeffs = Vec::with_capacity(grid.m());
    for i in 0..grid.m() {
        let a = grid.left(i);
        let integral = rule.try_integrate(a, a + h, |t| {
            let v = f(t)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite {
                    context: "signal",
                    t: t.as_f64(),
                })
            }
        })?;
        coeffs.push(integral / h);
    }
    Spectrum::new(coeffs, *grid)
}

/// Closed-form spectrum of `t^p`.
pub fn monomial_spectrum<S: Scalar>(p: S, grid: &Grid<S>) -> Result<Spectrum<S>> {
    if !(p >= S::zero()) || !p.is_finite() {
        return Err(Error::InvalidOrder {
            order: p.as_f64(),
            reason: "monomial exponent must be finite and non-negative",
        });
    }
    if p == S::zero() {
        return Ok(Spectrum::constant(S::one(), *grid));
    }
    let h = grid.step();
    let q = p + S::one();
    let coeffs = (0..grid.m())
        .map(|i| {
            let a = grid.left(i);
            let b = grid.left(i + 1);
            (b.powf(q) - a.powf(q)) / (h * q)
        })
        .collect();
    Spectrum::new(coeffs, *grid)
}

/// Gram matrix `w_ij = ∫ s_i s_j dt` of an arbitrary basis, row-major.
pub fn gram_matrix<S: Scalar>(basis: &[&dyn Fn(S) -> S], grid: &Grid<S>) -> Vec<Vec<S>> {
    let n = basis.len();
    let mut w = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = integrate_over_grid(grid, |t| basis[i](t) * basis[j](t));
            w[i][j] = v;
            w[j][i] = v;
        }
    }
    w
}

/// Least-squares coefficients of `f` in an arbitrary basis, `X = W⁻¹·Q`.
///
/// Integrals use the same composite 16-point rule as [`bp_spectrum`]. Only
/// tests and diagnostics use this; the solver works with block-pulse spectra.
pub fn project_general<S, F>(f: F, basis: &[&dyn Fn(S) -> S], grid: &Grid<S>) -> Result<Vec<S>>
where
    S: Scalar,
    F: Fn(S) -> S,
{
    let w = gram_matrix(basis, grid);
    let q: Vec<S> = basis
        .iter()
        .map(|s| integrate_over_grid(grid, |t| f(t) * s(t)))
        .collect();
    if let Some(i) = q.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "projection moment",
            t: i as f64,
        });
    }
    cholesky_solve(w, q)
}

fn integrate_over_grid<S: Scalar, F: Fn(S) -> S>(grid: &Grid<S>, f: F) -> S {
    let rule = GaussLegendre::spectrum_rule();
    let h = grid.step();
    (0..grid.m())
        .map(|i| {
            let a = grid.left(i);
            rule.integrate(a, a + h, &f)
        })
        .sum()
}

/// Solves an SPD system; the squared ratio of extreme Cholesky pivots is the
/// condition estimate.
fn cholesky_solve<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Result<Vec<S>> {
    let n = b.len();
    let max_condition = S::one() / (S::lit(1e4) * S::epsilon());
    for j in 0..n {
        let d = a[j][j] - a[j][..j].iter().map(|&v| v * v).sum::<S>();
        if !(d > S::zero()) {
            return Err(Error::SingularProjection {
                condition: f64::INFINITY,
            });
        }
        let d = d.sqrt();
        a[j][j] = d;
        for i in j + 1..n {
            let s: S = a[i][..j].iter().zip(&a[j][..j]).map(|(&x, &y)| x * y).sum();
            a[i][j] = (a[i][j] - s) / d;
        }
    }
    let (lo, hi) = (0..n).fold((S::infinity(), S::zero()), |(lo, hi), i| {
        (lo.min(a[i][i]), hi.max(a[i][i]))
    });
    let condition = (hi / lo).powi(2);
    if condition > max_condition {
        return Err(Error::SingularProjection {
            condition: condition.as_f64(),
        });
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s = s - a[i][k] * b[k];
        }
        b[i] = s / a[i][i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s = s - a[k][i] * b[k];
        }
        b[i] = s / a[i][i];
    }
    Ok(b)
}
