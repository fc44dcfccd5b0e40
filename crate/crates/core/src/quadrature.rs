//! Fixed-order Gauss–Legendre rules.
//!
//! Nodes and weights are computed once in `f64` by Newton iteration on the
//! Legendre polynomial and then cast to the working scalar on use.

use std::sync::OnceLock;

use crate::scalar::Scalar;

/// Points per subinterval used for block-pulse spectra and Gram integrals.
pub const SPECTRUM_POINTS: usize = 16;
/// Points used by the Riemann–Liouville oracle.
pub const ORACLE_POINTS: usize = 64;

/// Nodes on `[-1, 1]` (ascending) and matching weights.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess for the i-th largest root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared 16-point rule.
    pub fn spectrum_rule() -> &'static Self {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| Self::new(SPECTRUM_POINTS))
    }

    /// Shared 64-point rule.
    pub fn oracle_rule() -> &'static Self {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| Self::new(ORACLE_POINTS))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Sample points and weights mapped onto `[a, b]`, in ascending order.
    pub fn mapped<S: Scalar>(&self, a: S, b: S) -> impl Iterator<Item = (S, S)> + '_ {
        let half = (b - a) * S::lit(0.5);
        let mid = a + half;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * S::lit(x), half * S::lit(w)))
    }

    /// Integrates `f` over `[a, b]`, stopping at the first error.
    pub fn try_integrate<S, E, F>(&self, a: S, b: S, mut f: F) -> Result<S, E>
    where
        S: Scalar,
        F: FnMut(S) -> Result<S, E>,
    {
        let mut acc = S::zero();
        for (x, w) in self.mapped(a, b) {
            acc = acc + w * f(x)?;
        }
        Ok(acc)
    }

    pub fn integrate<S: Scalar, F: FnMut(S) -> S>(&self, a: S, b: S, mut f: F) -> S {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Legendre polynomial P_n(x) and its derivative via the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
