//! Random and enumerated test instances.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::capacity::{sinkhorn_scale, ScalingStatus, DS_TOL, SINKHORN_MAX_ITERS};
use crate::error::Result;
use crate::polynomials::{HermitianTuple, NonnegativeMatrix};

/// Positive matrix with entries `exp(2u)`, `u` uniform on `[0, 1)`.
pub fn random_positive_matrix(n: usize, rng: &mut impl Rng) -> NonnegativeMatrix {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| (2.0 * rng.random::<f64>()).exp()).collect()).collect();
    NonnegativeMatrix::from_rows(&rows).expect("positive entries")
}

/// Sinkhorn scaling of [`random_positive_matrix`].
pub fn random_doubly_stochastic(n: usize, rng: &mut impl Rng) -> NonnegativeMatrix {
    loop {
        let a = random_positive_matrix(n, rng);
        if let Ok(s) = sinkhorn_scale(&a, DS_TOL, SINKHORN_MAX_ITERS) {
            if s.status == ScalingStatus::Converged {
                return s.b;
            }
        }
    }
}

/// 0-1 matrix with the given density and at least one positive diagonal.
pub fn random_01_with_positive_permanent(n: usize, density: f64, rng: &mut impl Rng) -> NonnegativeMatrix {
    loop {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| if rng.random::<f64>() < density { 1.0 } else { 0.0 }).collect())
            .collect();
        if let Ok(a) = NonnegativeMatrix::from_rows(&rows) {
            if a.total_support_part().is_some() {
                return a;
            }
        }
    }
}

/// Nonnegative matrix whose entries are zero with probability `1 - density`.
pub fn random_sparse_matrix(n: usize, density: f64, rng: &mut impl Rng) -> NonnegativeMatrix {
    loop {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..n).map(|_| if rng.random::<f64>() < density { 0.1 + rng.random::<f64>() } else { 0.0 }).collect()
            })
            .collect();
        if let Ok(a) = NonnegativeMatrix::from_rows(&rows) {
            return a;
        }
    }
}

/// Tuple of `n` PSD matrices `G Gᵀ` (or `G G*` when `complex`) of random
/// ranks, with a positive definite sum.
pub fn random_psd_tuple(n: usize, complex: bool, rng: &mut impl Rng) -> HermitianTuple {
    loop {
        let mats: Vec<DMatrix<Complex64>> = (0..n)
            .map(|_| {
                let r = rng.random_range(1..=n);
                let g = DMatrix::<Complex64>::from_fn(n, r, |_, _| {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = if complex { StandardNormal.sample(rng) } else { 0.0 };
                    Complex64::new(re, im)
                });
                let m = &g * g.adjoint();
                // exact symmetry
                DMatrix::from_fn(n, n, |i, j| if i <= j { m[(i, j)] } else { m[(j, i)].conj() })
            })
            .collect();
        if let Ok(t) = HermitianTuple::new(mats) {
            return t;
        }
    }
}

/// Coefficients of `∏ (a_i t + b_i)` with positive `a_i, b_i`, lowest degree first.
pub fn random_factored(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let factors: Vec<(f64, f64)> = (0..n)
        .map(|_| (0.1 + rng.random::<f64>() * 3.0, 0.1 + rng.random::<f64>() * 3.0))
        .collect();
    crate::interp::expand_linear_factors(&factors)
}

/// `c ∈ [0,1]ⁿ` with `Σc = n - 1`, occasionally with zero entries.
pub fn random_entropic_point(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    let mut c: Vec<f64> = w.iter().map(|v| 1.0 - v / total).collect();
    if n >= 2 && rng.random::<f64>() < 0.1 {
        // one coordinate carries all the slack
        let i = rng.random_range(0..n);
        c = vec![1.0; n];
        c[i] = 0.0;
    }
    c
}

/// Probability vector from normalized exponentials.
pub fn random_probability_vector(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

/// Every `n × n` matrix with entries in `{0, ..., max_entry}` and all row and
/// column sums equal to `k`.
pub fn regular_integer_matrices(n: usize, k: usize, max_entry: usize) -> Vec<Vec<Vec<usize>>> {
    fn rows_with_sum(n: usize, k: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            if prefix.iter().sum::<usize>() == k {
                out.push(prefix.clone());
            }
            return;
        }
        let used: usize = prefix.iter().sum();
        for v in 0..=max.min(k - used) {
            prefix.push(v);
            rows_with_sum(n, k, max, prefix, out);
            prefix.pop();
        }
    }
    let mut rows = Vec::new();
    rows_with_sum(n, k, max_entry, &mut Vec::new(), &mut rows);
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn pick(
        rows: &[Vec<usize>],
        n: usize,
        k: usize,
        cols: &mut Vec<usize>,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if chosen.len() == n {
            if cols.iter().all(|&c| c == k) {
                out.push(chosen.iter().map(|&r| rows[r].clone()).collect());
            }
            return;
        }
        for (ri, row) in rows.iter().enumerate() {
            if cols.iter().zip(row).all(|(c, v)| c + v <= k) {
                for (c, v) in cols.iter_mut().zip(row) {
                    *c += v;
                }
                chosen.push(ri);
                pick(rows, n, k, cols, chosen, out);
                chosen.pop();
                for (c, v) in cols.iter_mut().zip(row) {
                    *c -= v;
                }
            }
        }
    }
    pick(&rows, n, k, &mut vec![0; n], &mut chosen, &mut out);
    out
}

/// Convert an integer matrix to an exact [`NonnegativeMatrix`].
pub fn integer_matrix(rows: &[Vec<usize>]) -> Result<NonnegativeMatrix> {
    let r: Vec<Vec<num_rational::BigRational>> = rows
        .iter()
        .map(|row| row.iter().map(|&v| num_rational::BigRational::from_integer(v.into())).collect())
        .collect();
    NonnegativeMatrix::from_rationals(&r)
}
