//! Capacity of homogeneous polynomials with nonnegative coefficients.
//!
//! Polynomials are handled as evaluation oracles ([`polynomials::PolynomialOracle`]).
//! From an oracle the crate computes the capacity `inf_{x>0, ∏x=1} p(x)` by convex
//! minimization, turns it into certified brackets for the mixed-derivative
//! coefficient `∂ⁿp/∂x₁⋯∂xₙ` (permanents and mixed discriminants in particular),
//! and provides the combinatorial tools around it: support degrees, Newton
//! polytope membership, indecomposability and sampled hyperbolicity checks.

pub mod bounds;
pub mod capacity;
pub mod cli;
pub mod error;
pub mod exact;
pub mod hyperbolicity;
pub mod instances;
pub mod interp;
pub mod numeric;
pub mod polynomials;
pub mod structure;
pub mod verify;

pub use error::{Error, Result};
