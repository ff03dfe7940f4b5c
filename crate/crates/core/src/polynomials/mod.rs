//! Homogeneous polynomial oracles.
//!
//! A [`PolynomialOracle`] is anything that can evaluate a homogeneous
//! polynomial with nonnegative coefficients at a real point. The concrete
//! constructors cover products of linear forms of a nonnegative matrix,
//! determinants of PSD Hermitian pencils, explicit sparse polynomials, and
//! oracles derived from other oracles (partial derivatives at zero, Laplace
//! hybrids, diagonal rescalings).

mod derivative;
pub mod io;
mod laplace;
mod matrix;
mod mixed;
mod sparse;
mod tuple;

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use derivative::{
    derivative_oracle, derivative_oracle_over, partial_at_zero, ScaledOracle,
    DERIVATIVE_BUDGET,
};
pub use laplace::{laplace_hybrid, LAPLACE_BUDGET};
pub use matrix::{build_multilinear, Multilinear, NonnegativeMatrix};
pub(crate) use matrix::has_perfect_matching;
pub use mixed::{mixed_form, mixed_form_with_cap, POLARIZATION_CAP};
pub use sparse::{build_sparse, evaluate_sparse, Exponent, SparsePolynomial};
pub use tuple::{build_determinantal, Determinantal, HermitianTuple};

/// How an oracle was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Multilinear,
    Determinantal,
    Sparse,
    Derivative,
    LaplaceHybrid,
    Scaled,
}

/// An evaluatable homogeneous polynomial.
///
/// Implementations must be pure: the same input always produces the same
/// output, and concurrent evaluation from several threads is allowed.
pub trait Polynomial: Send + Sync + fmt::Debug {
    fn num_vars(&self) -> usize;
    fn degree(&self) -> usize;
    /// Evaluate at `x`; `x.len()` must equal `num_vars()`.
    fn eval(&self, x: &[f64]) -> f64;
    fn provenance(&self) -> Provenance;

    /// `S_p(A)` read off the representation, when that is possible exactly.
    fn exact_support_degree(&self, _subset: &[bool]) -> Option<usize> {
        None
    }

    /// `x_i ∂_i p(x) / p(x)` for every `i` at a strictly positive `x`, when a
    /// closed form is available. Callers fall back to interpolation otherwise.
    fn log_gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn as_sparse(&self) -> Option<&SparsePolynomial> {
        None
    }
}

/// Shared handle to a polynomial oracle.
#[derive(Clone)]
pub struct PolynomialOracle(Arc<dyn Polynomial>);

impl PolynomialOracle {
    pub fn new(p: impl Polynomial + 'static) -> Self {
        PolynomialOracle(Arc::new(p))
    }

    /// Checked evaluation.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.num_vars() {
            return Err(Error::invalid(format!(
                "point has {} coordinates, oracle has {} variables",
                x.len(),
                self.num_vars()
            )));
        }
        Ok(self.0.eval(x))
    }

    pub fn at_ones(&self) -> f64 {
        self.0.eval(&vec![1.0; self.num_vars()])
    }

    /// A nonzero element of `Hom₊` is strictly positive at the all-ones point.
    pub fn is_zero(&self) -> bool {
        if let Some(s) = self.as_sparse() {
            return s.is_zero();
        }
        self.at_ones() <= 0.0
    }

    pub fn ensure_nonzero(&self, context: &str) -> Result<()> {
        if self.is_zero() {
            Err(Error::ZeroPolynomial(format!("{context}: polynomial is identically zero")))
        } else {
            Ok(())
        }
    }

    /// Require `num_vars == degree`, the setting of capacity and bounds.
    pub fn ensure_square(&self, context: &str) -> Result<()> {
        if self.num_vars() != self.degree() {
            return Err(Error::invalid(format!(
                "{context}: need as many variables as the degree, got {} variables and degree {}",
                self.num_vars(),
                self.degree()
            )));
        }
        Ok(())
    }
}

impl Deref for PolynomialOracle {
    type Target = dyn Polynomial;
    fn deref(&self) -> &Self::Target {
        &*self.0
    }
}

impl fmt::Debug for PolynomialOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `x_i ∂_i p(x) / p(x)` at a positive point, closed form if the oracle has
/// one, otherwise one univariate interpolation per coordinate.
pub fn log_gradient(p: &PolynomialOracle, x: &[f64]) -> Vec<f64> {
    if let Some(g) = p.log_gradient(x) {
        return g;
    }
    log_gradient_interpolated(p, x)
}

/// Interpolation route for [`log_gradient`]; `n + 1` oracle calls per coordinate.
pub fn log_gradient_interpolated(p: &PolynomialOracle, x: &[f64]) -> Vec<f64> {
    let n = p.degree();
    let mut point = x.to_vec();
    (0..x.len())
        .map(|i| {
            // τ ↦ p(x with x_i := τ x_i) on [0, 2]; the log-derivative is q'(1) / q(1).
            let xi = x[i];
            let fit = crate::interp::ChebyshevFit::new(n, 0.0, 2.0, |tau| {
                point[i] = tau * xi;
                p.eval(&point)
            });
            point[i] = xi;
            let taylor = fit.taylor(1.0);
            let value = taylor[0];
            if value > 0.0 {
                taylor.get(1).copied().unwrap_or(0.0) / value
            } else {
                0.0
            }
        })
        .collect()
}

/// Partial derivatives `∂_i p(x)` by interpolation of `t ↦ p(x + (t - x_i) e_i)`.
pub fn partial_derivatives(p: &PolynomialOracle, x: &[f64]) -> Vec<f64> {
    let n = p.degree();
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let half = if scale > 0.0 { scale } else { 1.0 };
    let mut point = x.to_vec();
    (0..x.len())
        .map(|i| {
            let xi = x[i];
            let fit = crate::interp::ChebyshevFit::new(n, xi - half, xi + half, |t| {
                point[i] = t;
                p.eval(&point)
            });
            point[i] = xi;
            fit.derivative_at(xi)
        })
        .collect()
}
