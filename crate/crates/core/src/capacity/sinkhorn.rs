use serde::Serialize;

use crate::error::{Error, Result};
use crate::polynomials::NonnegativeMatrix;

/// Stopping tolerance on the largest row or column sum residual.
pub const DS_TOL: f64 = 1e-10;
pub const SINKHORN_MAX_ITERS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingStatus {
    Converged,
    /// The iteration cap was hit; the matrix may lack total support.
    NotConverged,
}

/// `A = D₁ B D₂` with `B` (approximately) doubly stochastic.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingResult {
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    #[serde(serialize_with = "serialize_matrix")]
    pub b: NonnegativeMatrix,
    /// `∏ d1_i · ∏ d2_j`, equal to `Cap(Mul_A)` once converged.
    pub cap_product: f64,
    pub status: ScalingStatus,
    pub iterations: usize,
    /// Largest row or column sum deviation from 1.
    pub residual: f64,
}

fn serialize_matrix<S: serde::Serializer>(m: &NonnegativeMatrix, s: S) -> Result<S::Ok, S::Error> {
    m.rows().serialize(s)
}

/// Alternate row and column normalization until both residuals are at most `ds_tol`.
pub fn sinkhorn_scale(a: &NonnegativeMatrix, ds_tol: f64, max_iters: usize) -> Result<ScalingResult> {
    let n = a.n();
    if let Some(j) = a.col_sums().iter().position(|&s| s == 0.0) {
        return Err(Error::invalid(format!("column {j} is identically zero; no scaling exists")));
    }
    if !(ds_tol > 0.0) {
        return Err(Error::invalid("ds_tol must be positive"));
    }
    // B = diag(u) A diag(v), so D₁ = diag(1/u) and D₂ = diag(1/v).
    let mut u = vec![1.0; n];
    let mut v = vec![1.0; n];
    let entry = |u: &[f64], v: &[f64], i: usize, j: usize| u[i] * a.get(i, j) * v[j];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < max_iters {
        iterations += 1;
        for i in 0..n {
            let s: f64 = (0..n).map(|j| a.get(i, j) * v[j]).sum();
            u[i] = 1.0 / s;
        }
        for j in 0..n {
            let s: f64 = (0..n).map(|i| u[i] * a.get(i, j)).sum();
            v[j] = 1.0 / s;
        }
        // Columns are exact after the column step; measure the rows.
        residual = (0..n)
            .map(|i| ((0..n).map(|j| entry(&u, &v, i, j)).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        if residual <= ds_tol {
            break;
        }
    }
    let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| entry(&u, &v, i, j)).collect()).collect();
    let col_residual = (0..n)
        .map(|j| ((0..n).map(|i| rows[i][j]).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    residual = residual.max(col_residual);
    let d1: Vec<f64> = u.iter().map(|x| 1.0 / x).collect();
    let d2: Vec<f64> = v.iter().map(|x| 1.0 / x).collect();
    let log_cap: f64 = d1.iter().chain(&d2).map(|d| d.ln()).sum();
    Ok(ScalingResult {
        b: NonnegativeMatrix::from_rows(&rows)?,
        d1,
        d2,
        cap_product: log_cap.exp(),
        status: if residual <= ds_tol { ScalingStatus::Converged } else { ScalingStatus::NotConverged },
        iterations,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point() {
        let a = NonnegativeMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let r = sinkhorn_scale(&a, DS_TOL, SINKHORN_MAX_ITERS).unwrap();
        assert_eq!(r.status, ScalingStatus::Converged);
        assert_eq!(r.cap_product, 1.0);
        assert!(r.d1.iter().chain(&r.d2).all(|&d| d == 1.0));
    }

    #[test]
    fn diagonal() {
        let a = NonnegativeMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let r = sinkhorn_scale(&a, DS_TOL, SINKHORN_MAX_ITERS).unwrap();
        assert_eq!(r.b.rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!((r.cap_product - 4.0).abs() < 1e-14);
    }

    #[test]
    fn factorization_reproduces_input() {
        let a = NonnegativeMatrix::from_rows(&[vec![1.0, 7.0, 0.2], vec![3.0, 0.5, 2.0], vec![0.4, 1.0, 9.0]]).unwrap();
        let r = sinkhorn_scale(&a, DS_TOL, SINKHORN_MAX_ITERS).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let back = r.d1[i] * r.b.get(i, j) * r.d2[j];
                assert!((back - a.get(i, j)).abs() <= 1e-8 * a.get(i, j));
            }
        }
        assert!(r.residual <= DS_TOL);
    }

    #[test]
    fn without_total_support() {
        // [[1,1],[0,1]] has no positive diagonal through (0,1); scaling only converges in the limit
        let a = NonnegativeMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let r = sinkhorn_scale(&a, 1e-12, 1000).unwrap();
        assert_eq!(r.status, ScalingStatus::NotConverged);
        let z = NonnegativeMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(sinkhorn_scale(&z, DS_TOL, 10).is_err());
    }
}
