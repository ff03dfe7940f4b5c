//! Brute-force ground truth: permanents, mixed discriminants, grid capacity,
//! and the small lemmas about `[a|b|...|b]` matrices.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{rational_to_f64, CompensatedSum};
use crate::polynomials::{mixed_form, HermitianTuple, NonnegativeMatrix, PolynomialOracle};

/// Largest `n` accepted by the permanent routines.
pub const PERMANENT_CAP: usize = 24;
/// Largest `n` for which the rational permanent path is used.
pub const RATIONAL_PERMANENT_CAP: usize = 20;
/// Largest `n` for exact mixed discriminants; polarization covers the rest up to 20.
pub const EXACT_MIXED_DISCRIMINANT_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactMethod {
    Ryser,
    PermutationSum,
    Polarization,
    Grid,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExactNumber {
    Rational(BigRational),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactValue {
    pub value: ExactNumber,
    pub method: ExactMethod,
}

impl ExactValue {
    pub fn to_f64(&self) -> f64 {
        match &self.value {
            ExactNumber::Rational(r) => rational_to_f64(r),
            ExactNumber::Real(v) => *v,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.value {
            ExactNumber::Rational(r) => Some(r),
            ExactNumber::Real(_) => None,
        }
    }
}

impl fmt::Display for ExactNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactNumber::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            ExactNumber::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            ExactNumber::Real(v) => write!(f, "{v:e}"),
        }
    }
}

/// Ryser's formula with Gray-code subset order, compensated accumulation and
/// row sums rebuilt every 1024 steps so the incremental updates do not drift.
/// A nonnegative matrix without a positive diagonal gets an exact zero.
pub fn permanent_f64(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    if n == 0 {
        return 1.0;
    }
    if rows.iter().flatten().all(|&v| v >= 0.0) {
        let pattern: Vec<Vec<bool>> = rows.iter().map(|r| r.iter().map(|&v| v > 0.0).collect()).collect();
        if !crate::polynomials::has_perfect_matching(&pattern, None) {
            return 0.0;
        }
    }
    let mut sums = vec![0.0; n];
    let mut acc = CompensatedSum::new();
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let bit = k.trailing_zeros() as usize;
        gray ^= 1 << bit;
        if k % 1024 == 0 {
            for (i, s) in sums.iter_mut().enumerate() {
                *s = crate::numeric::mask_members(gray, n).map(|j| rows[i][j]).sum();
            }
        } else if gray >> bit & 1 == 1 {
            for (s, row) in sums.iter_mut().zip(rows) {
                *s += row[bit];
            }
        } else {
            for (s, row) in sums.iter_mut().zip(rows) {
                *s -= row[bit];
            }
        }
        // Product carried in double-double so each term is accurate beyond f64.
        let (mut hi, mut lo) = (1.0f64, 0.0f64);
        for &s in &sums {
            let h = hi * s;
            lo = lo.mul_add(s, hi.mul_add(s, -h));
            hi = h;
        }
        let sign = if (n - gray.count_ones() as usize).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc.add(sign * hi);
        acc.add(sign * lo);
    }
    acc.value()
}

/// Exact Ryser over the rationals.
pub fn permanent_rational(rows: &[Vec<BigRational>]) -> BigRational {
    let n = rows.len();
    if n == 0 {
        return BigRational::one();
    }
    let mut sums = vec![BigRational::zero(); n];
    let mut acc = BigRational::zero();
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let bit = k.trailing_zeros() as usize;
        gray ^= 1 << bit;
        let adding = gray >> bit & 1 == 1;
        for (s, row) in sums.iter_mut().zip(rows) {
            if adding {
                *s += &row[bit];
            } else {
                *s -= &row[bit];
            }
        }
        if sums.iter().any(Zero::is_zero) {
            continue;
        }
        let prod = sums.iter().fold(BigRational::one(), |a, b| a * b);
        if (n - gray.count_ones() as usize).is_multiple_of(2) {
            acc += prod;
        } else {
            acc -= prod;
        }
    }
    acc
}

/// Visit every permutation of `0..n` (Heap's algorithm) with its sign.
pub(crate) fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize], i8)) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut sign = 1i8;
    visit(&perm, sign);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            visit(&perm, sign);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// `Σ_σ ∏ A(i, σ(i))` by direct enumeration; `n ≤ 10`.
pub fn permanent_permutation_sum(rows: &[Vec<f64>]) -> f64 {
    let mut acc = CompensatedSum::new();
    for_each_permutation(rows.len(), |p, _| {
        acc.add(p.iter().enumerate().map(|(i, &j)| rows[i][j]).product());
    });
    acc.value()
}

pub fn permanent_permutation_sum_rational(rows: &[Vec<BigRational>]) -> BigRational {
    let mut acc = BigRational::zero();
    for_each_permutation(rows.len(), |p, _| {
        acc += p.iter().enumerate().fold(BigRational::one(), |a, (i, &j)| a * &rows[i][j]);
    });
    acc
}

/// `per(A)`: rational Ryser when the matrix carries exact entries, float Ryser otherwise.
pub fn permanent_exact(a: &NonnegativeMatrix) -> Result<ExactValue> {
    let n = a.n();
    if n > PERMANENT_CAP {
        return Err(Error::BudgetExceeded(format!(
            "exact permanent of a {n}x{n} matrix (cap {PERMANENT_CAP})"
        )));
    }
    let value = if a.has_exact_entries() && n <= RATIONAL_PERMANENT_CAP {
        let e = a.exact_entries();
        let rows: Vec<Vec<BigRational>> = e.chunks(n).map(<[BigRational]>::to_vec).collect();
        ExactNumber::Rational(permanent_rational(&rows))
    } else {
        ExactNumber::Real(permanent_f64(&a.rows()))
    };
    Ok(ExactValue { value, method: ExactMethod::Ryser })
}

/// Complex rational number for exact determinants of Hermitian pencils.
#[derive(Debug, Clone, PartialEq)]
struct Gaussian {
    re: BigRational,
    im: BigRational,
}

impl Gaussian {
    fn zero() -> Self {
        Gaussian { re: BigRational::zero(), im: BigRational::zero() }
    }

    fn one() -> Self {
        Gaussian { re: BigRational::one(), im: BigRational::zero() }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, o: &Self) -> Self {
        Gaussian { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    fn sub(&self, o: &Self) -> Self {
        Gaussian { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    fn mul(&self, o: &Self) -> Self {
        Gaussian {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn div(&self, o: &Self) -> Self {
        let d = &o.re * &o.re + &o.im * &o.im;
        Gaussian {
            re: (&self.re * &o.re + &self.im * &o.im) / &d,
            im: (&self.im * &o.re - &self.re * &o.im) / &d,
        }
    }
}

fn gaussian_determinant(mut m: Vec<Vec<Gaussian>>) -> Gaussian {
    let n = m.len();
    let mut det = Gaussian::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Gaussian::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = Gaussian::zero().sub(&det);
        }
        let p = m[col][col].clone();
        det = det.mul(&p);
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].div(&p);
            for c in col..n {
                let delta = factor.mul(&m[col][c]);
                m[r][c] = m[r][c].sub(&delta);
            }
        }
    }
    det
}

/// `D(A_1, ..., A_n)`.
///
/// Up to `n = 10` the value is exact: the coefficient of `t_1⋯t_n` in
/// `det(Σ t_k A_k)` is `Σ_S (-1)^{n-|S|} det(Σ_{k∈S} A_k)`, evaluated with
/// rational Gaussian elimination. Up to `n = 20` it falls back to polarization
/// of the determinantal oracle.
pub fn mixed_discriminant_exact(t: &HermitianTuple) -> Result<ExactValue> {
    let n = t.n();
    if n <= EXACT_MIXED_DISCRIMINANT_CAP {
        let entries: Vec<Vec<Gaussian>> = t
            .exact_entries()
            .into_iter()
            .map(|(re, im)| re.into_iter().zip(im).map(|(re, im)| Gaussian { re, im }).collect())
            .collect();
        let mut acc = Gaussian::zero();
        for mask in 1u64..(1u64 << n) {
            let mut m = vec![vec![Gaussian::zero(); n]; n];
            for k in crate::numeric::mask_members(mask, n) {
                for (idx, z) in entries[k].iter().enumerate() {
                    m[idx / n][idx % n] = m[idx / n][idx % n].add(z);
                }
            }
            let d = gaussian_determinant(m);
            if (n - mask.count_ones() as usize).is_multiple_of(2) {
                acc = acc.add(&d);
            } else {
                acc = acc.sub(&d);
            }
        }
        if !acc.im.is_zero() {
            return Err(Error::Numerical(format!(
                "mixed discriminant has imaginary part {}",
                rational_to_f64(&acc.im)
            )));
        }
        return Ok(ExactValue { value: ExactNumber::Rational(acc.re), method: ExactMethod::Ryser });
    }
    if n > 20 {
        return Err(Error::BudgetExceeded(format!("mixed discriminant of a {n}-tuple (cap 20)")));
    }
    let p = crate::polynomials::build_determinantal(t)?;
    let basis = unit_vectors(n);
    Ok(ExactValue { value: ExactNumber::Real(mixed_form(&p, &basis)?), method: ExactMethod::Polarization })
}

/// `D(A_1, ..., A_n) = Σ_σ sgn(σ) per([A_k(i, σ(i))]_{i,k})` in floating point; `n ≤ 8`.
///
/// Real part of the sum; an independent route to the mixed discriminant.
pub fn mixed_discriminant_permutation_sum(t: &HermitianTuple) -> Result<f64> {
    let n = t.n();
    if n > 8 {
        return Err(Error::BudgetExceeded(format!("permutation-pair sum for n = {n} (cap 8)")));
    }
    let mats = t.matrices();
    let mut acc = CompensatedSum::new();
    for_each_permutation(n, |sigma, sign| {
        // per of the complex matrix M(i, k) = A_k(i, σ(i)), by permutation sum over π
        let mut re = 0.0;
        for_each_permutation(n, |pi, _| {
            let mut z = num_complex::Complex64::new(1.0, 0.0);
            for i in 0..n {
                z *= mats[pi[i]][(i, sigma[i])];
            }
            re += z.re;
        });
        acc.add(f64::from(sign) * re);
    });
    Ok(acc.value())
}

pub(crate) fn unit_vectors(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        })
        .collect()
}

/// Minimize `p(e^y)` over the hyperplane `Σ y = 0` on nested grids in the first
/// `n - 1` coordinates. Returns the best value found, an upper estimate of `Cap(p)`.
pub fn capacity_grid(p: &PolynomialOracle, resolution: usize) -> Result<ExactValue> {
    p.ensure_square("capacity_grid")?;
    p.ensure_nonzero("capacity_grid")?;
    let n = p.num_vars();
    if n > 6 {
        return Err(Error::BudgetExceeded(format!("grid capacity for n = {n} (cap 6)")));
    }
    if resolution < 3 {
        return Err(Error::invalid("grid resolution must be at least 3"));
    }
    let eval = |y: &[f64]| -> f64 {
        let last = -y.iter().sum::<f64>();
        let x: Vec<f64> = y.iter().copied().chain(std::iter::once(last)).map(f64::exp).collect();
        p.eval(&x)
    };
    let d = n - 1;
    let mut center = vec![0.0; d];
    let mut best = eval(&center);
    if d == 0 {
        return Ok(ExactValue { value: ExactNumber::Real(best), method: ExactMethod::Grid });
    }
    let mut radius = (2.0 * p.at_ones()).ln().abs().max(1.0) * (n as f64).sqrt();
    let points = resolution.pow(d as u32);
    for _ in 0..60 {
        let step = 2.0 * radius / (resolution - 1) as f64;
        let mut round_best = (best, center.clone());
        let mut y = vec![0.0; d];
        for idx in 0..points {
            let mut rest = idx;
            for (k, yk) in y.iter_mut().enumerate() {
                *yk = center[k] - radius + step * (rest % resolution) as f64;
                rest /= resolution;
            }
            let v = eval(&y);
            if v < round_best.0 {
                round_best = (v, y.clone());
            }
        }
        let moved_to_edge = round_best
            .1
            .iter()
            .zip(&center)
            .any(|(a, c)| (a - c).abs() >= radius * (1.0 - 1e-12));
        best = round_best.0;
        center = round_best.1;
        // Keep the window when the best point sits on its edge, otherwise zoom in.
        if !moved_to_edge {
            radius = step;
        }
        if radius < 1e-9 {
            break;
        }
    }
    Ok(ExactValue { value: ExactNumber::Real(best), method: ExactMethod::Grid })
}

/// Result of [`mini_vdw_verify`].
#[derive(Debug, Clone, PartialEq)]
pub struct MiniVdw {
    pub closed_form: f64,
    pub ryser: f64,
    pub lower_bound: f64,
    pub bound_holds: bool,
}

/// Build `[a|b|...|b]` with `b_i = (1 - a_i)/(n - 1)` and compare its permanent,
/// by closed form and by Ryser, against `n!/nⁿ`.
pub fn mini_vdw_verify(a: &[f64]) -> Result<MiniVdw> {
    let n = a.len();
    if n < 2 {
        return Err(Error::invalid("need n >= 2"));
    }
    if a.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::invalid("entries of a must lie in [0, 1]"));
    }
    let total: f64 = a.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("entries of a sum to {total}, expected 1")));
    }
    let m = (n - 1) as f64;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let b = (1.0 - a[i]) / m;
            std::iter::once(a[i]).chain(std::iter::repeat_n(b, n - 1)).collect()
        })
        .collect();
    let ryser = permanent_f64(&rows);
    let sum: f64 = (0..n)
        .map(|i| a[i] * (0..n).filter(|&j| j != i).map(|j| 1.0 - a[j]).product::<f64>())
        .sum();
    let closed_form = crate::numeric::factorial(n - 1) / m.powi(n as i32 - 1) * sum;
    let lower_bound = crate::numeric::factorial(n) / (n as f64).powi(n as i32);
    Ok(MiniVdw {
        closed_form,
        ryser,
        lower_bound,
        bound_holds: closed_form >= lower_bound * (1.0 - 1e-12),
    })
}

/// Result of [`entropic_inequality`].
#[derive(Debug, Clone, PartialEq)]
pub struct EntropicCheck {
    /// `S_{n-1} - n S_n`
    pub lhs: f64,
    /// `exp(Σ c_i log c_i)` with `0 log 0 = 0`
    pub rhs: f64,
    pub holds: bool,
}

/// Check `S_{n-1}(c) - n S_n(c) ≥ exp(Σ c_i log c_i)` for `c ∈ [0,1]ⁿ`, `Σ c = n - 1`.
pub fn entropic_inequality(c: &[f64]) -> Result<EntropicCheck> {
    let n = c.len();
    if n < 2 {
        return Err(Error::invalid("need n >= 2"));
    }
    if c.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::invalid("entries of c must lie in [0, 1]"));
    }
    let total: f64 = c.iter().sum();
    if (total - (n - 1) as f64).abs() > 1e-9 {
        return Err(Error::invalid(format!("entries of c sum to {total}, expected {}", n - 1)));
    }
    // S_{n-1} - n S_n = Σ_i (1 - c_i) ∏_{j≠i} c_j, which avoids cancellation.
    let lhs: f64 = (0..n)
        .map(|i| (1.0 - c[i]) * (0..n).filter(|&j| j != i).map(|j| c[j]).product::<f64>())
        .sum();
    let entropy: f64 = c.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum();
    let rhs = entropy.exp();
    Ok(EntropicCheck { lhs, rhs, holds: lhs >= rhs * (1.0 - 1e-12) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn small_permanents() {
        assert_eq!(permanent_f64(&[vec![1.0, 1.0], vec![1.0, 1.0]]), 2.0);
        let i3 = permanent_exact(&NonnegativeMatrix::identity(3)).unwrap();
        assert_eq!(i3.to_f64(), 1.0);
        let j3 = permanent_exact(&NonnegativeMatrix::uniform(3)).unwrap();
        assert_eq!(j3.as_rational(), Some(&r(2, 9)));
        assert_eq!(j3.value.to_string(), "2/9");
    }

    #[test]
    fn ryser_matches_permutation_sum() {
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| (0..6).map(|j| ((i * 7 + j * 3) % 5) as f64 + 0.5).collect())
            .collect();
        let a = permanent_f64(&rows);
        let b = permanent_permutation_sum(&rows);
        assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn gray_code_refresh_keeps_accuracy() {
        let rows: Vec<Vec<f64>> = (0..12).map(|i| (0..12).map(|j| 1.0 + ((i + j) % 3) as f64 * 0.1).collect()).collect();
        let exact: Vec<Vec<BigRational>> =
            rows.iter().map(|r| r.iter().map(|&v| crate::numeric::rational_from_f64(v)).collect()).collect();
        let want = rational_to_f64(&permanent_rational(&exact));
        let got = permanent_f64(&rows);
        assert!((got - want).abs() <= 1e-11 * want, "{got} vs {want}");
    }

    #[test]
    fn heap_visits_all_permutations_with_signs() {
        let mut count = 0;
        let mut sign_sum = 0i32;
        for_each_permutation(4, |_, s| {
            count += 1;
            sign_sum += s as i32;
        });
        assert_eq!((count, sign_sum), (24, 0));
    }

    #[test]
    fn mixed_discriminants() {
        let t = HermitianTuple::identity(3);
        assert_eq!(mixed_discriminant_exact(&t).unwrap().as_rational(), Some(&r(6, 1)));
        let pair = HermitianTuple::from_real(&[
            vec![vec![1.0, 0.0], vec![0.0, 0.0]],
            vec![vec![0.0, 0.0], vec![0.0, 1.0]],
        ])
        .unwrap();
        assert_eq!(mixed_discriminant_exact(&pair).unwrap().to_f64(), 1.0);
        let j3 = vec![vec![1.0 / 3.0; 3]; 3];
        let diag = HermitianTuple::diagonal_from_columns(&j3).unwrap();
        assert!((mixed_discriminant_exact(&diag).unwrap().to_f64() - 2.0 / 9.0).abs() < 1e-15);
        assert!((mixed_discriminant_permutation_sum(&diag).unwrap() - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn grid_capacity() {
        let p = crate::polynomials::build_multilinear(&NonnegativeMatrix::identity(3)).unwrap();
        assert!((capacity_grid(&p, 5).unwrap().to_f64() - 1.0).abs() < 1e-12);
        let d = NonnegativeMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let p = crate::polynomials::build_multilinear(&d).unwrap();
        assert!((capacity_grid(&p, 5).unwrap().to_f64() - 4.0).abs() < 1e-12);
        let p = crate::polynomials::build_multilinear(&NonnegativeMatrix::uniform(3)).unwrap();
        let v = capacity_grid(&p, 7).unwrap().to_f64();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn mini_vdw() {
        let n = 5;
        let u = mini_vdw_verify(&vec![1.0 / n as f64; n]).unwrap();
        assert!((u.closed_form - u.lower_bound).abs() < 1e-15);
        let i2 = mini_vdw_verify(&[1.0, 0.0]).unwrap();
        assert_eq!((i2.closed_form, i2.ryser), (1.0, 1.0));
        assert!(i2.bound_holds);
    }

    #[test]
    fn entropic_equality_at_uniform() {
        let n = 6;
        let c = vec![(n - 1) as f64 / n as f64; n];
        let e = entropic_inequality(&c).unwrap();
        assert!((e.lhs - e.rhs).abs() < 1e-12);
        assert!(entropic_inequality(&[1.0, 1.0, 0.5]).is_err());
    }
}
