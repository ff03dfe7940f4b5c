use num_rational::BigRational;
use num_traits::Signed;

use super::{Polynomial, PolynomialOracle, Provenance};
use crate::error::{Error, Result};
use crate::numeric::{rational_from_f64, rational_to_f64};

/// Square matrix with nonnegative entries and positive row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegativeMatrix {
    n: usize,
    entries: Vec<f64>,
    /// Exact entries when the matrix was given as rationals.
    exact: Option<Vec<BigRational>>,
}

impl NonnegativeMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("matrix must be at least 1x1"));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid(format!("entry ({i},{j}) = {v} is not a nonnegative real")));
                }
            }
            entries.extend_from_slice(row);
        }
        let m = NonnegativeMatrix { n, entries, exact: None };
        m.check_row_sums()?;
        Ok(m)
    }

    pub fn from_rationals(rows: &[Vec<BigRational>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("matrix must be at least 1x1"));
        }
        let mut exact = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if v.is_negative() {
                    return Err(Error::invalid(format!("entry ({i},{j}) = {v} is negative")));
                }
            }
            exact.extend(row.iter().cloned());
        }
        let entries = exact.iter().map(rational_to_f64).collect();
        let m = NonnegativeMatrix { n, entries, exact: Some(exact) };
        m.check_row_sums()?;
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        NonnegativeMatrix { n, entries, exact: None }
    }

    /// `J_n`: every entry `1/n`, held exactly.
    pub fn uniform(n: usize) -> Self {
        let v = BigRational::new(1.into(), (n as i64).into());
        let rows = vec![vec![v; n]; n];
        Self::from_rationals(&rows).expect("J_n is valid")
    }

    fn check_row_sums(&self) -> Result<()> {
        for i in 0..self.n {
            if self.row(i).iter().all(|&v| v == 0.0) {
                return Err(Error::invalid(format!("row {i} is identically zero")));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Exact rational entries (derived exactly from the floats if none were given).
    pub fn exact_entries(&self) -> Vec<BigRational> {
        match &self.exact {
            Some(e) => e.clone(),
            None => self.entries.iter().map(|&v| rational_from_f64(v)).collect(),
        }
    }

    pub fn has_exact_entries(&self) -> bool {
        self.exact.is_some()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.n).map(|j| (0..self.n).map(|i| self.get(i, j)).sum()).collect()
    }

    /// Number of nonzero entries in each column.
    pub fn column_support_counts(&self) -> Vec<usize> {
        (0..self.n)
            .map(|j| (0..self.n).filter(|&i| self.get(i, j) != 0.0).count())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.get(i, j);
            }
        }
        let exact = self.exact.as_ref().map(|e| {
            let mut t = e.clone();
            for i in 0..n {
                for j in 0..n {
                    t[j * n + i] = e[i * n + j].clone();
                }
            }
            t
        });
        NonnegativeMatrix { n, entries, exact }
    }

    /// `diag(d1) · A · diag(d2)`.
    pub fn scaled(&self, d1: &[f64], d2: &[f64]) -> Result<Self> {
        let n = self.n;
        if d1.len() != n || d2.len() != n {
            return Err(Error::invalid("scaling vectors have the wrong length"));
        }
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| d1[i] * self.get(i, j) * d2[j]).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Rows `rows`, columns `cols`, in the given order (not validated for row sums).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<f64>> {
        rows.iter()
            .map(|&i| cols.iter().map(|&j| self.get(i, j)).collect())
            .collect()
    }

    /// Zero out entries whose removal leaves the permanent unchanged, i.e.
    /// entries on no positive diagonal. Returns `None` when `per(A) = 0`.
    pub fn total_support_part(&self) -> Option<Self> {
        let n = self.n;
        let pattern: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j) != 0.0).collect())
            .collect();
        if !has_perfect_matching(&pattern, None) {
            return None;
        }
        let mut entries = self.entries.clone();
        for i in 0..n {
            for j in 0..n {
                if pattern[i][j] && !has_perfect_matching(&pattern, Some((i, j))) {
                    entries[i * n + j] = 0.0;
                }
            }
        }
        let exact = self.exact.as_ref().map(|e| {
            e.iter()
                .zip(&entries)
                .map(|(r, &v)| if v == 0.0 { BigRational::from_integer(0.into()) } else { r.clone() })
                .collect()
        });
        Some(NonnegativeMatrix { n, entries, exact })
    }
}

/// Perfect matching in the bipartite graph of `pattern`, optionally forcing edge `(i, j)`.
pub(crate) fn has_perfect_matching(pattern: &[Vec<bool>], forced: Option<(usize, usize)>) -> bool {
    let n = pattern.len();
    let mut match_col: Vec<Option<usize>> = vec![None; n];
    let allowed = |i: usize, j: usize| -> bool {
        match forced {
            Some((fi, fj)) if i == fi => j == fj,
            Some((fi, fj)) if j == fj => i == fi,
            _ => pattern[i][j],
        }
    };
    if let Some((fi, fj)) = forced {
        if !pattern[fi][fj] {
            return false;
        }
    }
    fn augment(
        i: usize,
        seen: &mut [bool],
        match_col: &mut [Option<usize>],
        allowed: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        for j in 0..seen.len() {
            if allowed(i, j) && !seen[j] {
                seen[j] = true;
                if match_col[j].is_none_or(|k| augment(k, seen, match_col, allowed)) {
                    match_col[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    (0..n).all(|i| {
        let mut seen = vec![false; n];
        augment(i, &mut seen, &mut match_col, &allowed)
    })
}

/// `Mul_A(t) = ∏_i Σ_j A(i,j) t_j`.
#[derive(Debug, Clone)]
pub struct Multilinear {
    matrix: NonnegativeMatrix,
}

impl Multilinear {
    pub fn matrix(&self) -> &NonnegativeMatrix {
        &self.matrix
    }
}

pub fn build_multilinear(a: &NonnegativeMatrix) -> Result<PolynomialOracle> {
    a.check_row_sums()?;
    Ok(PolynomialOracle::new(Multilinear { matrix: a.clone() }))
}

impl Polynomial for Multilinear {
    fn num_vars(&self) -> usize {
        self.matrix.n
    }

    fn degree(&self) -> usize {
        self.matrix.n
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let n = self.matrix.n;
        (0..n)
            .map(|i| self.matrix.row(i).iter().zip(x).map(|(a, t)| a * t).sum::<f64>())
            .product()
    }

    fn provenance(&self) -> Provenance {
        Provenance::Multilinear
    }

    fn exact_support_degree(&self, subset: &[bool]) -> Option<usize> {
        // D_A(t) = ∏_rows (t Σ_{j∈A} a_rj + Σ_j a_rj): one degree per row touching A.
        Some(
            (0..self.matrix.n)
                .filter(|&i| {
                    self.matrix
                        .row(i)
                        .iter()
                        .zip(subset)
                        .any(|(&a, &inside)| inside && a != 0.0)
                })
                .count(),
        )
    }

    fn log_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = self.matrix.n;
        let forms: Vec<f64> = (0..n)
            .map(|i| self.matrix.row(i).iter().zip(x).map(|(a, t)| a * t).sum())
            .collect();
        if forms.iter().any(|&f| f <= 0.0) {
            return None;
        }
        Some(
            (0..n)
                .map(|j| (0..n).map(|i| self.matrix.get(i, j) * x[j] / forms[i]).sum())
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_the_monomial() {
        let p = build_multilinear(&NonnegativeMatrix::identity(3)).unwrap();
        assert_eq!(p.eval(&[2.0, 3.0, 5.0]), 30.0);
        assert_eq!(p.at_ones(), 1.0);
    }

    #[test]
    fn uniform_matrix_values() {
        let p = build_multilinear(&NonnegativeMatrix::uniform(3)).unwrap();
        assert!((p.at_ones() - 1.0).abs() < 1e-15);
        assert!((p.eval(&[3.0, 0.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_scaling() {
        let a = NonnegativeMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let p = build_multilinear(&a).unwrap();
        assert_eq!(p.eval(&[1.0, 1.0]), 4.0);
        assert_eq!(p.eval(&[0.5, 3.0]), 6.0);
    }

    #[test]
    fn zero_row_is_named() {
        let err = NonnegativeMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
        assert!(NonnegativeMatrix::from_rows(&[vec![1.0, -1.0], vec![1.0, 1.0]]).is_err());
        assert!(NonnegativeMatrix::from_rows(&[vec![1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn support_degree_counts_rows() {
        let a = NonnegativeMatrix::from_rows(&[
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let p = build_multilinear(&a).unwrap();
        assert_eq!(p.exact_support_degree(&[false, false, true]), Some(3));
        assert_eq!(p.exact_support_degree(&[true, false, false]), Some(1));
        assert_eq!(p.exact_support_degree(&[true, true, false]), Some(2));
        assert_eq!(a.column_support_counts(), vec![1, 1, 3]);
    }

    #[test]
    fn total_support_drops_off_diagonal_entries() {
        // Upper triangular: only the diagonal lies on a positive diagonal.
        let a = NonnegativeMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let t = a.total_support_part().unwrap();
        assert_eq!(t.rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let singular = NonnegativeMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0], ]).unwrap();
        assert!(singular.total_support_part().is_some());
        let no_matching = NonnegativeMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![1.0, 1.0, 1.0],
        ])
        .unwrap();
        assert!(no_matching.total_support_part().is_none());
    }
}
