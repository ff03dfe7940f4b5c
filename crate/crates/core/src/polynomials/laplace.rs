use super::{build_multilinear, NonnegativeMatrix, Polynomial, PolynomialOracle, Provenance};
use crate::error::{Error, Result};
use crate::exact::permanent_f64;

/// Maximum number of row subsets (exact minors) a Laplace hybrid may hold.
pub const LAPLACE_BUDGET: usize = 1 << 20;

/// `Σ_R per(A[R, S]) · Mul_{A[R', S']}(x_{S'})`, summed over row sets `|R| = |S|`.
#[derive(Debug, Clone)]
struct LaplaceHybrid {
    matrix: NonnegativeMatrix,
    /// Columns kept as variables, in order.
    free_cols: Vec<usize>,
    /// (weight, complement rows) for every row subset with a nonzero minor.
    terms: Vec<(f64, Vec<usize>)>,
}

impl Polynomial for LaplaceHybrid {
    fn num_vars(&self) -> usize {
        self.free_cols.len()
    }

    fn degree(&self) -> usize {
        self.free_cols.len()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let n = self.matrix.n();
        let forms: Vec<f64> = (0..n)
            .map(|r| self.free_cols.iter().zip(x).map(|(&c, &v)| self.matrix.get(r, c) * v).sum())
            .collect();
        self.terms
            .iter()
            .map(|(w, rows)| w * rows.iter().map(|&r| forms[r]).product::<f64>())
            .sum()
    }

    fn provenance(&self) -> Provenance {
        Provenance::LaplaceHybrid
    }

    fn exact_support_degree(&self, subset: &[bool]) -> Option<usize> {
        // Maximum over surviving terms of the number of their rows touching the subset.
        self.terms
            .iter()
            .map(|(_, rows)| {
                rows.iter()
                    .filter(|&&r| {
                        self.free_cols
                            .iter()
                            .zip(subset)
                            .any(|(&c, &inside)| inside && self.matrix.get(r, c) != 0.0)
                    })
                    .count()
            })
            .max()
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Laplace-expansion hybrid of `Mul_A` along the column set `cols`.
///
/// The columns in `cols` are eliminated exactly: for every row set `R` of the
/// same size the minor `per(A[R, cols])` is computed by Ryser, and the
/// complementary block contributes `Mul_{A[R', cols']}` in the remaining
/// variables. The result equals the mixed derivative of `Mul_A` in the
/// variables `cols`, so its full mixed derivative is `per(A)`.
pub fn laplace_hybrid(a: &NonnegativeMatrix, cols: &[usize]) -> Result<PolynomialOracle> {
    let n = a.n();
    let mut cols = cols.to_vec();
    cols.sort_unstable();
    cols.dedup();
    if let Some(&bad) = cols.iter().find(|&&c| c >= n) {
        return Err(Error::invalid(format!("column {bad} out of range for a {n}x{n} matrix")));
    }
    if cols.is_empty() {
        return build_multilinear(a);
    }
    let k = cols.len();
    let count = crate::numeric::binomial(n, k);
    if count > LAPLACE_BUDGET as f64 || k > 24 {
        return Err(Error::BudgetExceeded(format!(
            "Laplace hybrid needs {count:.0} exact {k}x{k} minors (cap {LAPLACE_BUDGET})"
        )));
    }
    let free_cols: Vec<usize> = (0..n).filter(|c| !cols.contains(c)).collect();
    let mut terms = Vec::new();
    for rows in combinations(n, k) {
        let minor = a.submatrix(&rows, &cols);
        let w = permanent_f64(&minor);
        if w > 0.0 {
            let complement = (0..n).filter(|r| !rows.contains(r)).collect();
            terms.push((w, complement));
        }
    }
    Ok(PolynomialOracle::new(LaplaceHybrid { matrix: a.clone(), free_cols, terms }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_set_is_plain_product() {
        let a = NonnegativeMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let p = laplace_hybrid(&a, &[]).unwrap();
        assert_eq!(p.provenance(), Provenance::Multilinear);
        assert_eq!(p.eval(&[1.0, 1.0]), 21.0);
    }

    #[test]
    fn identity_keeps_one_minor() {
        let p = laplace_hybrid(&NonnegativeMatrix::identity(3), &[0]).unwrap();
        assert_eq!(p.num_vars(), 2);
        assert_eq!(p.eval(&[2.0, 5.0]), 10.0);
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }
}
