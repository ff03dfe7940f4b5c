use rayon::prelude::*;

use super::PolynomialOracle;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Default upper limit on the degree for polarization (`2^n` oracle calls).
pub const POLARIZATION_CAP: usize = 22;

/// `M_p(X_1, ..., X_n)` by the polarization identity
/// `2^{-n} Σ_{b ∈ {±1}^n} (∏ b_i) p(Σ b_i X_i)`.
pub fn mixed_form(p: &PolynomialOracle, xs: &[Vec<f64>]) -> Result<f64> {
    mixed_form_with_cap(p, xs, POLARIZATION_CAP)
}

pub fn mixed_form_with_cap(p: &PolynomialOracle, xs: &[Vec<f64>], cap: usize) -> Result<f64> {
    let n = p.degree();
    let m = p.num_vars();
    if xs.len() != n {
        return Err(Error::invalid(format!(
            "mixed form of a degree-{n} polynomial takes {n} vectors, got {}",
            xs.len()
        )));
    }
    if let Some((i, x)) = xs.iter().enumerate().find(|(_, x)| x.len() != m) {
        return Err(Error::invalid(format!("vector {i} has {} entries, expected {m}", x.len())));
    }
    if n > cap.min(62) {
        return Err(Error::BudgetExceeded(format!(
            "polarization needs 2^{n} evaluations (cap 2^{cap}); use a derivative oracle instead"
        )));
    }
    if n == 0 {
        return Ok(p.eval(&[]));
    }
    let term = |mask: u64| -> f64 {
        let mut point = vec![0.0; m];
        let mut sign = 1.0;
        for (i, x) in xs.iter().enumerate() {
            let b = if mask >> i & 1 == 1 {
                sign = -sign;
                -1.0
            } else {
                1.0
            };
            for (pt, v) in point.iter_mut().zip(x) {
                *pt += b * v;
            }
        }
        sign * p.eval(&point)
    };
    let count = 1u64 << n;
    // Values are collected in mask order so the reduction does not depend on threading.
    let values: Vec<f64> = if n >= 10 {
        (0..count).into_par_iter().map(term).collect()
    } else {
        (0..count).map(term).collect()
    };
    let sum: CompensatedSum = values.into_iter().collect();
    Ok(sum.value() / count as f64)
}
