use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;

use super::{Polynomial, PolynomialOracle, Provenance};
use crate::error::{Error, Result};
use crate::numeric::rational_from_f64;

/// Absolute Hermitian-symmetry tolerance, relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalue tolerance for positive semidefiniteness, relative to the spectral scale.
pub const PSD_TOL: f64 = 1e-9;
/// Imaginary residue allowed on a determinant of a Hermitian pencil.
pub const IM_TOL: f64 = 1e-9;

/// `n` positive semidefinite Hermitian `n × n` matrices with positive definite sum.
#[derive(Debug, Clone)]
pub struct HermitianTuple {
    n: usize,
    matrices: Vec<DMatrix<Complex64>>,
    /// Exact (re, im) entries when the tuple was given as rationals.
    exact: Option<Vec<(Vec<BigRational>, Vec<BigRational>)>>,
}

fn min_hermitian_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b))
}

impl HermitianTuple {
    pub fn new(matrices: Vec<DMatrix<Complex64>>) -> Result<Self> {
        Self::with_exact(matrices, None)
    }

    /// Real symmetric tuple from row-major rows.
    pub fn from_real(mats: &[Vec<Vec<f64>>]) -> Result<Self> {
        let zeros: Vec<Vec<Vec<f64>>> = mats
            .iter()
            .map(|m| m.iter().map(|r| vec![0.0; r.len()]).collect())
            .collect();
        Self::from_parts(mats, &zeros)
    }

    pub fn from_parts(re: &[Vec<Vec<f64>>], im: &[Vec<Vec<f64>>]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::invalid("real and imaginary parts have different lengths"));
        }
        let mut matrices = Vec::with_capacity(re.len());
        for (k, (r, i)) in re.iter().zip(im).enumerate() {
            let n = r.len();
            if r.iter().any(|row| row.len() != n) || i.len() != n || i.iter().any(|row| row.len() != n) {
                return Err(Error::invalid(format!("matrix {k} is not square {n}x{n}")));
            }
            matrices.push(DMatrix::from_fn(n, n, |a, b| Complex64::new(r[a][b], i[a][b])));
        }
        Self::new(matrices)
    }

    pub fn from_rationals(parts: Vec<(Vec<Vec<BigRational>>, Vec<Vec<BigRational>>)>) -> Result<Self> {
        let mut matrices = Vec::with_capacity(parts.len());
        let mut exact = Vec::with_capacity(parts.len());
        for (k, (re, im)) in parts.into_iter().enumerate() {
            let n = re.len();
            if re.iter().any(|row| row.len() != n) || im.len() != n || im.iter().any(|row| row.len() != n) {
                return Err(Error::invalid(format!("matrix {k} is not square {n}x{n}")));
            }
            let f = |r: &BigRational| crate::numeric::rational_to_f64(r);
            matrices.push(DMatrix::from_fn(n, n, |a, b| Complex64::new(f(&re[a][b]), f(&im[a][b]))));
            exact.push((re.into_iter().flatten().collect(), im.into_iter().flatten().collect()));
        }
        Self::with_exact(matrices, Some(exact))
    }

    fn with_exact(
        matrices: Vec<DMatrix<Complex64>>,
        exact: Option<Vec<(Vec<BigRational>, Vec<BigRational>)>>,
    ) -> Result<Self> {
        let n = matrices.len();
        if n == 0 {
            return Err(Error::invalid("tuple must contain at least one matrix"));
        }
        let mut sum = DMatrix::<Complex64>::zeros(n, n);
        for (k, m) in matrices.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::invalid(format!(
                    "matrix {k} is {}x{}, expected {n}x{n} (tuple length equals dimension)",
                    m.nrows(),
                    m.ncols()
                )));
            }
            let scale = m.iter().fold(0.0f64, |a, z| a.max(z.norm()));
            for a in 0..n {
                for b in 0..n {
                    if (m[(a, b)] - m[(b, a)].conj()).norm() > HERMITIAN_TOL * (1.0 + scale) {
                        return Err(Error::invalid(format!(
                            "matrix {k} is not Hermitian at entry ({a},{b})"
                        )));
                    }
                }
            }
            let min_eig = min_hermitian_eigenvalue(m);
            if min_eig < -PSD_TOL * (1.0 + scale) {
                return Err(Error::invalid(format!(
                    "matrix {k} is not positive semidefinite: eigenvalue {min_eig:e}"
                )));
            }
            sum += m;
        }
        let scale = sum.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let min_sum = min_hermitian_eigenvalue(&sum);
        if min_sum <= PSD_TOL * (1.0 + scale) {
            return Err(Error::invalid(format!(
                "sum of the tuple is not positive definite: eigenvalue {min_sum:e}"
            )));
        }
        Ok(HermitianTuple { n, matrices, exact })
    }

    /// `(I, I, ..., I)`.
    pub fn identity(n: usize) -> Self {
        Self::new(vec![DMatrix::identity(n, n); n]).expect("identity tuple is valid")
    }

    /// Diagonal tuple: matrix `k` is `diag(rows[0][k], ..., rows[n-1][k])`, i.e. the
    /// `k`-th column of `rows` on the diagonal. Its mixed discriminant is `per(rows)`.
    pub fn diagonal_from_columns(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mats = (0..n)
            .map(|k| DMatrix::from_fn(n, n, |a, b| if a == b { Complex64::new(rows[a][k], 0.0) } else { Complex64::new(0.0, 0.0) }))
            .collect();
        Self::new(mats)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrices(&self) -> &[DMatrix<Complex64>] {
        &self.matrices
    }

    pub fn is_real(&self) -> bool {
        self.matrices.iter().all(|m| m.iter().all(|z| z.im == 0.0))
    }

    /// Exact `(re, im)` row-major entries of each matrix.
    pub fn exact_entries(&self) -> Vec<(Vec<BigRational>, Vec<BigRational>)> {
        match &self.exact {
            Some(e) => e.clone(),
            None => self
                .matrices
                .iter()
                .map(|m| {
                    let n = self.n;
                    let re = (0..n * n).map(|k| rational_from_f64(m[(k / n, k % n)].re)).collect();
                    let im = (0..n * n).map(|k| rational_from_f64(m[(k / n, k % n)].im)).collect();
                    (re, im)
                })
                .collect(),
        }
    }

    /// Numerical rank of matrix `k`.
    pub fn rank_of(&self, k: usize) -> usize {
        numerical_rank(&self.matrices[k])
    }
}

fn numerical_rank(m: &DMatrix<Complex64>) -> usize {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    eig.eigenvalues.iter().filter(|&&v| v > 1e-9 * max.max(1e-300)).count()
}

impl Determinantal {
    /// `Σ_{i ∈ A} A_i`.
    fn partial_sum(&self, subset: &[bool]) -> DMatrix<Complex64> {
        let n = self.tuple.n;
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (a, _) in self.tuple.matrices.iter().zip(subset).filter(|(_, &b)| b) {
            m += a;
        }
        m
    }
}

/// `DET(t) = det(Σ t_i A_i)`.
#[derive(Debug, Clone)]
pub struct Determinantal {
    tuple: HermitianTuple,
}

impl Determinantal {
    pub fn tuple(&self) -> &HermitianTuple {
        &self.tuple
    }

    /// Value together with the discarded imaginary part.
    pub fn eval_with_residue(&self, t: &[f64]) -> (f64, f64) {
        let d = self.combination(t).lu().determinant();
        (d.re, d.im)
    }

    fn combination(&self, t: &[f64]) -> DMatrix<Complex64> {
        let n = self.tuple.n;
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (ti, a) in t.iter().zip(&self.tuple.matrices) {
            if *ti != 0.0 {
                m += a * Complex64::new(*ti, 0.0);
            }
        }
        m
    }
}

pub fn build_determinantal(t: &HermitianTuple) -> Result<PolynomialOracle> {
    Ok(PolynomialOracle::new(Determinantal { tuple: t.clone() }))
}

impl Polynomial for Determinantal {
    fn num_vars(&self) -> usize {
        self.tuple.n
    }

    fn degree(&self) -> usize {
        self.tuple.n
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let m = self.combination(x);
        // nalgebra's closed forms for n ≤ 3 cancel badly; always factor
        let d = m.clone().lu().determinant();
        // rounding in the determinant scales with the Hadamard bound, not with |det|
        let hadamard: f64 = m.row_iter().map(|r| r.norm()).product();
        debug_assert!(
            !(d.im.abs() > 1e3 * IM_TOL * (1.0 + hadamard)),
            "imaginary residue {:e} on determinant {:e}",
            d.im,
            d.re
        );
        d.re
    }

    fn provenance(&self) -> Provenance {
        Provenance::Determinantal
    }

    // det(C + tB) with C = Σ A_i ≻ 0 and B ⪰ 0 has degree rank(B)
    fn exact_support_degree(&self, subset: &[bool]) -> Option<usize> {
        let all = self.partial_sum(&vec![true; self.tuple.n]);
        if numerical_rank(&all) < self.tuple.n {
            return None;
        }
        Some(numerical_rank(&self.partial_sum(subset)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_tuple_is_power_of_sum() {
        let p = build_determinantal(&HermitianTuple::identity(3)).unwrap();
        assert!((p.at_ones() - 27.0).abs() < 1e-12);
        let x = [0.5, 1.0, 2.5];
        assert!((p.eval(&x) - 4.0f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn diagonal_projectors_give_product() {
        let t = HermitianTuple::from_real(&[
            vec![vec![1.0, 0.0], vec![0.0, 0.0]],
            vec![vec![0.0, 0.0], vec![0.0, 1.0]],
        ])
        .unwrap();
        let p = build_determinantal(&t).unwrap();
        assert!((p.eval(&[3.0, 7.0]) - 21.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_pair_matches_symbolic_expansion() {
        // A = [[2,1],[1,1]], B = [[1,0.5],[0.5,3]]
        let t = HermitianTuple::from_real(&[
            vec![vec![2.0, 1.0], vec![1.0, 1.0]],
            vec![vec![1.0, 0.5], vec![0.5, 3.0]],
        ])
        .unwrap();
        let p = build_determinantal(&t).unwrap();
        let symbolic = |s: f64, u: f64| {
            let a = 2.0 * s + u;
            let b = s + 0.5 * u;
            let d = s + 3.0 * u;
            a * d - b * b
        };
        for (s, u) in [(1.0, 1.0), (0.3, 2.0), (5.0, 0.1), (-1.0, 2.0), (0.0, 1.5)] {
            let v = p.eval(&[s, u]);
            let w = symbolic(s, u);
            assert!((v - w).abs() <= 1e-10 * w.abs().max(1.0), "{v} vs {w}");
        }
    }

    #[test]
    fn complex_hermitian_residue_is_small() {
        let re = vec![
            vec![vec![2.0, 0.5], vec![0.5, 1.0]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        ];
        let im = vec![
            vec![vec![0.0, 0.7], vec![-0.7, 0.0]],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        ];
        let t = HermitianTuple::from_parts(&re, &im).unwrap();
        let d = Determinantal { tuple: t };
        let (v, r) = d.eval_with_residue(&[1.3, 0.4]);
        assert!(r.abs() <= IM_TOL * (1.0 + v.abs()));
        // det [[3.0, .65+.91i],[.65-.91i, 1.7]] = 5.1 - (.65² + .91²)
        let want = 3.0 * 1.7 - (0.65f64.powi(2) + 0.91f64.powi(2));
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn validation_errors_name_the_matrix() {
        let not_psd = HermitianTuple::from_real(&[
            vec![vec![1.0, 0.0], vec![0.0, -1.0]],
            vec![vec![1.0, 0.0], vec![0.0, 3.0]],
        ]);
        let err = not_psd.unwrap_err().to_string();
        assert!(err.contains("matrix 0") && err.contains("eigenvalue"), "{err}");

        let not_herm = HermitianTuple::from_real(&[
            vec![vec![1.0, 1.0], vec![0.0, 1.0]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        ]);
        assert!(not_herm.unwrap_err().to_string().contains("Hermitian"));

        let singular_sum = HermitianTuple::from_real(&[
            vec![vec![1.0, 0.0], vec![0.0, 0.0]],
            vec![vec![2.0, 0.0], vec![0.0, 0.0]],
        ]);
        assert!(singular_sum.unwrap_err().to_string().contains("positive definite"));
    }

    #[test]
    fn ranks() {
        let t = HermitianTuple::from_real(&[
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        ])
        .unwrap();
        assert_eq!(t.rank_of(0), 1);
        assert_eq!(t.rank_of(1), 2);
    }
}
