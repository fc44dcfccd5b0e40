//! Direct evaluation of Riemann–Liouville integrals and Caputo derivatives.
//!
//! These routines never touch the operational matrices and serve as the
//! reference they are checked against.

use crate::basis::Spectrum;
use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::quadrature::GaussLegendre;
use crate::scalar::Scalar;

/// A positive fractional order together with `n = ⌈β⌉`, so `n − 1 < β ≤ n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder<S> {
    beta: S,
    n: usize,
}

impl<S: Scalar> FracOrder<S> {
    pub fn new(beta: S) -> Result<Self> {
        if !beta.is_finite() || !(beta > S::zero()) {
            return Err(Error::InvalidOrder {
                order: beta.as_f64(),
                reason: "order must be finite and positive",
            });
        }
        let n = beta.ceil().to_usize().ok_or(Error::InvalidOrder {
            order: beta.as_f64(),
            reason: "order too large",
        })?;
        Ok(Self { beta, n })
    }

    pub fn beta(&self) -> S {
        self.beta
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_integer(&self) -> bool {
        self.beta == S::from_count(self.n)
    }
}

/// `I^β f(t) = 1/Γ(β) ∫₀ᵗ (t−τ)^{β−1} f(τ) dτ` by 64-point Gauss–Legendre.
///
/// The kernel is absorbed by the change of variables `t − τ = t·s^q`, which
/// turns the integral into `t^β q/Γ(β) ∫₀¹ s^{qβ−1} f(t − t·s^q) ds`. The
/// integer `q = max(3, ⌈3/β⌉)` keeps `f`'s argument polynomial in `s` and the
/// weight exponent at least 2. A second map `s = 1 − (1−v)³` grades
/// the nodes towards `τ = 0`, where integrands such as `τ^α` are not smooth.
pub fn rl_integral<S, F>(f: F, beta: S, t: S) -> Result<S>
where
    S: Scalar,
    F: Fn(S) -> S,
{
    if !beta.is_finite() || !(beta > S::zero()) {
        return Err(Error::InvalidOrder {
            order: beta.as_f64(),
            reason: "integration order must be finite and positive",
        });
    }
    if !(t >= S::zero()) || !t.is_finite() {
        return Err(Error::OutOfDomain {
            t: t.as_f64(),
            length: f64::INFINITY,
        });
    }
    if t == S::zero() {
        return Ok(S::zero());
    }
    let rule = GaussLegendre::oracle_rule();
    let sample = |tau: S| {
        let v = f(tau);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                context: "integrand",
                t: tau.as_f64(),
            })
        }
    };
    let graded = |g: &dyn Fn(S) -> Result<S>| {
        rule.try_integrate(S::zero(), S::one(), |v| {
            let w = S::one() - v;
            Ok(S::lit(3.0) * w * w * g(S::one() - w.powi(3))?)
        })
    };
    let q = (S::lit(3.0) / beta).ceil().max(S::lit(3.0));
    let qi = q.to_i32().ok_or(Error::InvalidOrder {
        order: beta.as_f64(),
        reason: "integration order too small for the oracle",
    })?;
    let weight_exp = q * beta - S::one();
    let integral = graded(&|s| Ok(s.powf(weight_exp) * sample(t - t * s.powi(qi))?))?;
    Ok(t.powf(beta) * q / gamma(beta)? * integral)
}

/// Exact order-β integral of the piecewise-constant reconstruction of `x`.
pub fn rl_integral_of_spectrum<S: Scalar>(x: &Spectrum<S>, beta: S, t: S) -> Result<S> {
    if !beta.is_finite() || !(beta > S::zero()) {
        return Err(Error::InvalidOrder {
            order: beta.as_f64(),
            reason: "integration order must be finite and positive",
        });
    }
    let grid = x.grid();
    let last = grid.locate(t)?;
    let ramp = |z: S| {
        if z > S::zero() {
            z.powf(beta)
        } else {
            S::zero()
        }
    };
    let sum: S = x.coeffs()[..=last]
        .iter()
        .enumerate()
        .map(|(i, &c)| c * (ramp(t - grid.left(i)) - ramp(t - grid.left(i + 1))))
        .sum();
    Ok(sum / gamma(beta + S::one())?)
}

/// Caputo derivative of order `order` at `t`, given `dnf = f^{(n)}`.
pub fn caputo_derivative<S, F>(dnf: F, order: FracOrder<S>, t: S) -> Result<S>
where
    S: Scalar,
    F: Fn(S) -> S,
{
    if order.is_integer() {
        let v = dnf(t);
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                context: "integrand",
                t: t.as_f64(),
            })
        };
    }
    rl_integral(dnf, S::from_count(order.n()) - order.beta(), t)
}
