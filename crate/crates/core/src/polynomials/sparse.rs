use std::collections::BTreeMap;

use super::{Polynomial, PolynomialOracle, Provenance};
use crate::error::{Error, Result};

/// Exponent vector `r ∈ I_{m,n}`.
pub type Exponent = Vec<u32>;

/// Explicit homogeneous polynomial: exponent vector → positive coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePolynomial {
    num_vars: usize,
    degree: usize,
    terms: BTreeMap<Exponent, f64>,
}

impl SparsePolynomial {
    /// Validate and collect terms; repeated exponents are summed, zero coefficients dropped.
    pub fn new(num_vars: usize, degree: usize, terms: impl IntoIterator<Item = (Exponent, f64)>) -> Result<Self> {
        let mut map: BTreeMap<Exponent, f64> = BTreeMap::new();
        for (exp, coef) in terms {
            if exp.len() != num_vars {
                return Err(Error::invalid(format!(
                    "exponent {exp:?} has {} entries, expected {num_vars}",
                    exp.len()
                )));
            }
            let total: u64 = exp.iter().map(|&r| r as u64).sum();
            if total != degree as u64 {
                return Err(Error::invalid(format!(
                    "exponent {exp:?} has total degree {total}, polynomial is homogeneous of degree {degree}"
                )));
            }
            if !coef.is_finite() || coef < 0.0 {
                return Err(Error::invalid(format!("coefficient {coef} of {exp:?} is not a nonnegative real")));
            }
            *map.entry(exp).or_insert(0.0) += coef;
        }
        map.retain(|_, c| *c > 0.0);
        Ok(SparsePolynomial { num_vars, degree, terms: map })
    }

    pub fn zero(num_vars: usize, degree: usize) -> Self {
        SparsePolynomial { num_vars, degree, terms: BTreeMap::new() }
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, f64> {
        &self.terms
    }

    pub fn coefficient(&self, exp: &[u32]) -> f64 {
        self.terms.get(exp).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The support, i.e. the key set.
    pub fn support(&self) -> impl Iterator<Item = &Exponent> {
        self.terms.keys()
    }

    /// `S_p(A) = max_{r ∈ supp} Σ_{i∈A} r_i`; `None` for the zero polynomial.
    pub fn support_degree(&self, subset: &[bool]) -> Option<usize> {
        self.terms
            .keys()
            .map(|r| r.iter().zip(subset).filter(|(_, &s)| s).map(|(&v, _)| v as usize).sum())
            .max()
    }

    /// `∂/∂x_i p` at `x_i = 0`, in the remaining variables (exact).
    pub fn partial_at_zero(&self, i: usize) -> SparsePolynomial {
        let terms = self.terms.iter().filter(|(r, _)| r[i] == 1).map(|(r, &c)| {
            let mut e = r.clone();
            e.remove(i);
            (e, c)
        });
        SparsePolynomial {
            num_vars: self.num_vars - 1,
            degree: self.degree - 1,
            terms: terms.collect(),
        }
    }

    /// Expand `∏_i (Σ_j rows[i][j] x_j)`.
    pub fn from_linear_forms(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.first().map_or(0, |r| r.len());
        let mut acc: BTreeMap<Exponent, f64> = BTreeMap::new();
        acc.insert(vec![0; m], 1.0);
        for row in rows {
            if row.len() != m {
                return Err(Error::invalid("linear forms have different lengths"));
            }
            let mut next: BTreeMap<Exponent, f64> = BTreeMap::new();
            for (exp, c) in &acc {
                for (j, &a) in row.iter().enumerate() {
                    if a != 0.0 {
                        let mut e = exp.clone();
                        e[j] += 1;
                        *next.entry(e).or_insert(0.0) += c * a;
                    }
                }
            }
            acc = next;
        }
        Self::new(m, rows.len(), acc)
    }

    pub fn oracle(&self) -> PolynomialOracle {
        PolynomialOracle::new(self.clone())
    }
}

/// Build a sparse polynomial from `(exponent, coefficient)` pairs.
pub fn build_sparse(num_vars: usize, degree: usize, terms: impl IntoIterator<Item = (Exponent, f64)>) -> Result<SparsePolynomial> {
    SparsePolynomial::new(num_vars, degree, terms)
}

pub fn evaluate_sparse(q: &SparsePolynomial, x: &[f64]) -> Result<f64> {
    if x.len() != q.num_vars {
        return Err(Error::invalid(format!(
            "point has {} coordinates, polynomial has {} variables",
            x.len(),
            q.num_vars
        )));
    }
    Ok(q.eval(x))
}

impl Polynomial for SparsePolynomial {
    fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(r, c)| c * r.iter().zip(x).map(|(&e, &v)| v.powi(e as i32)).product::<f64>())
            .sum()
    }

    fn provenance(&self) -> Provenance {
        Provenance::Sparse
    }

    fn exact_support_degree(&self, subset: &[bool]) -> Option<usize> {
        self.support_degree(subset)
    }

    fn log_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut value = 0.0;
        let mut grad = vec![0.0; self.num_vars];
        for (r, c) in &self.terms {
            let mono = c * r.iter().zip(x).map(|(&e, &v)| v.powi(e as i32)).product::<f64>();
            value += mono;
            for (g, &e) in grad.iter_mut().zip(r) {
                *g += e as f64 * mono;
            }
        }
        if value <= 0.0 {
            return None;
        }
        Some(grad.into_iter().map(|g| g / value).collect())
    }

    fn as_sparse(&self) -> Option<&SparsePolynomial> {
        Some(self)
    }
}
