//! Fractional-order operational integration matrices in the block-pulse basis.
//!
//! `P^β` maps the spectrum of a signal to the spectrum of its order-β
//! Riemann–Liouville integral. It is lower-triangular Toeplitz, so only its
//! first column is stored: entry `k` is the value on sub-diagonal `k`.
//!
//! ```text
//! c_0 = h^β / Γ(β+2)
//! c_k = h^β / Γ(β+2) · ((k+1)^{β+1} − 2k^{β+1} + (k−1)^{β+1}),   k ≥ 1
//! ```
//!
//! At β = 1 this is the classic `(h/2)·[1; 2; 2; …]` integration matrix and at
//! β = 0 it is the identity.

pub use crate::gamma::gamma;

use crate::basis::{Grid, Spectrum};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lower-triangular Toeplitz matrix stored by its first column.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerToeplitz<S> {
    first_col: Vec<S>,
}

impl<S: Scalar> LowerToeplitz<S> {
    pub fn from_first_col(first_col: Vec<S>) -> Self {
        Self { first_col }
    }

    pub fn identity(m: usize) -> Self {
        let mut first_col = vec![S::zero(); m];
        if m > 0 {
            first_col[0] = S::one();
        }
        Self { first_col }
    }

    pub fn dim(&self) -> usize {
        self.first_col.len()
    }

    pub fn first_col(&self) -> &[S] {
        &self.first_col
    }

    pub fn entry(&self, row: usize, col: usize) -> S {
        if row >= col {
            self.first_col[row - col]
        } else {
            S::zero()
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<S>> {
        let m = self.dim();
        (0..m)
            .map(|i| (0..m).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// Matrix–vector product by the direct O(m²) loop.
    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.dim(), "dimension mismatch");
        (0..x.len())
            .map(|i| {
                (0..=i)
                    .map(|j| self.first_col[i - j] * x[j])
                    .fold(S::zero(), |acc, v| acc + v)
            })
            .collect()
    }

    /// Product `self · other`, again lower-triangular Toeplitz.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        Self {
            first_col: self.mul_vec(&other.first_col),
        }
    }

    pub fn frobenius_norm(&self) -> S {
        let m = self.dim();
        self.first_col
            .iter()
            .enumerate()
            .map(|(k, &c)| S::from_count(m - k) * c * c)
            .sum::<S>()
            .sqrt()
    }

    /// Frobenius norm of `self − other`.
    pub fn frobenius_distance(&self, other: &Self) -> S {
        let diff: Vec<S> = self
            .first_col
            .iter()
            .zip(&other.first_col)
            .map(|(&a, &b)| a - b)
            .collect();
        LowerToeplitz::from_first_col(diff).frobenius_norm()
    }
}

/// Operational integration matrix of order `beta` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OpMatrix<S> {
    beta: S,
    grid: Grid<S>,
    matrix: LowerToeplitz<S>,
}

impl<S: Scalar> OpMatrix<S> {
    pub fn beta(&self) -> S {
        self.beta
    }

    pub fn grid(&self) -> &Grid<S> {
        &self.grid
    }

    pub fn first_col(&self) -> &[S] {
        self.matrix.first_col()
    }

    pub fn toeplitz(&self) -> &LowerToeplitz<S> {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> S {
        self.matrix.entry(row, col)
    }

    pub fn to_dense(&self) -> Vec<Vec<S>> {
        self.matrix.to_dense()
    }

    /// Spectrum of the order-β integral of the signal with spectrum `x`.
    pub fn apply(&self, x: &Spectrum<S>) -> Result<Spectrum<S>> {
        self.grid.check_same(x.grid())?;
        Spectrum::new(self.matrix.mul_vec(x.coeffs()), self.grid)
    }

    /// Matrix product `self · other` (orders add only in the limit m → ∞).
    pub fn compose(&self, other: &Self) -> Result<LowerToeplitz<S>> {
        self.grid.check_same(&other.grid)?;
        Ok(self.matrix.compose(&other.matrix))
    }
}

/// Builds `P^β` for `β ≥ 0`.
pub fn frac_integration_matrix<S: Scalar>(beta: S, grid: &Grid<S>) -> Result<OpMatrix<S>> {
    if !beta.is_finite() || !(beta >= S::zero()) {
        return Err(Error::InvalidOrder {
            order: beta.as_f64(),
            reason: "integration order must be finite and non-negative",
        });
    }
    let m = grid.m();
    let scale = grid.step().powf(beta) / gamma(beta + S::lit(2.0))?;
    let exponent = beta + S::one();
    let pow = |k: usize| S::from_count(k).powf(exponent);
    let mut first_col = Vec::with_capacity(m);
    first_col.push(scale);
    for k in 1..m {
        let second_difference = pow(k + 1) - S::lit(2.0) * pow(k) + pow(k - 1);
        first_col.push(scale * second_difference);
    }
    if let Some(k) = first_col.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "operational matrix entry",
            t: grid.left(k).as_f64(),
        });
    }
    Ok(OpMatrix {
        beta,
        grid: *grid,
        matrix: LowerToeplitz::from_first_col(first_col),
    })
}
