use serde::Serialize;

use super::{capacity, CapacityOptions, CapacityResult, CapacityStatus};
use crate::bounds::{generalized_factor, Ordering};
use crate::error::{Error, Result};
use crate::polynomials::{derivative_oracle, PolynomialOracle};
use crate::structure::singleton_support_degrees;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Approximation {
    /// `F(p)`: the capacity estimate, within a factor 2 of `Cap(p)`.
    pub estimate: f64,
    pub capacity: CapacityResult,
    /// `factor · Cap_lower`, a certified lower bound on the coefficient.
    pub coefficient_lower: f64,
    /// `cap_estimate`, an upper bound on the coefficient.
    pub coefficient_upper: f64,
    pub factor: f64,
    pub support_degrees: Vec<usize>,
    /// Number of variables differentiated away before the capacity run.
    pub derivatives_taken: usize,
    pub warnings: Vec<String>,
}

/// Estimate `∂ⁿp/∂x₁⋯∂xₙ (0)` by the capacity computed to within a factor 2.
///
/// For POS-hyperbolic indecomposable `p` the coefficient `C` satisfies
/// `C ≤ estimate ≤ 2 C / factor`.
pub fn approximate_coefficient(p: &PolynomialOracle) -> Result<Approximation> {
    p.ensure_square("approximate_coefficient")?;
    p.ensure_nonzero("approximate_coefficient")?;
    let cap = capacity(p, &CapacityOptions::with_tol(std::f64::consts::LN_2))?;
    if cap.status == CapacityStatus::UnboundedBelowSuspected {
        return Err(Error::invalid(
            "capacity appears unattained (decomposable input); split the polynomial first",
        ));
    }
    let s = singleton_support_degrees(p)?;
    let f = generalized_factor(&s, &Ordering::Best)?;
    let mut warnings = Vec::new();
    if cap.status != CapacityStatus::Converged {
        warnings.push(format!("capacity gap {:.3e} exceeds log 2; the factor-2 guarantee does not hold", cap.gap_bound));
    }
    Ok(Approximation {
        estimate: cap.cap_estimate,
        coefficient_lower: f.value * cap.cap_lower(),
        coefficient_upper: cap.cap_estimate,
        factor: f.value,
        support_degrees: s,
        capacity: cap,
        derivatives_taken: 0,
        warnings,
    })
}

/// Differentiate away `k = ⌈m log₂ n⌉` variables at zero first, then approximate.
///
/// The mixed derivative of `p_k` equals the one of `p`, and the worst-case
/// factor drops to about `2eⁿ/nᵐ`. `k` is capped at `n - 1`. If the derivative
/// oracle is over budget the plain approximation is returned with a warning.
pub fn improved_approximate(p: &PolynomialOracle, m: u32) -> Result<Approximation> {
    p.ensure_square("improved_approximate")?;
    let n = p.num_vars();
    let k = if m == 0 || n < 2 {
        0
    } else {
        ((m as f64 * (n as f64).log2()).ceil() as usize).min(n - 1)
    };
    if k == 0 {
        return approximate_coefficient(p);
    }
    match derivative_oracle(p, k) {
        Ok(pk) => {
            let mut a = approximate_coefficient(&pk)?;
            a.derivatives_taken = k;
            Ok(a)
        }
        Err(Error::BudgetExceeded(msg)) => {
            let mut a = approximate_coefficient(p)?;
            a.warnings.push(format!("derivative oracle refused ({msg}); fell back to the plain approximation"));
            Ok(a)
        }
        Err(e) => Err(e),
    }
}
