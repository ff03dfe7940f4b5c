//! The loss function `g`, van der Waerden type factors and the certified
//! coefficient and permanent brackets built from capacity.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};
use serde::Serialize;

use crate::capacity::{capacity, CapacityOptions, CapacityResult, CapacityStatus};
use crate::error::{Error, Result};
use crate::exact::for_each_permutation;
use crate::numeric::{big_factorial, rational_to_f64};
use crate::polynomials::{build_multilinear, NonnegativeMatrix, PolynomialOracle};
use crate::structure::singleton_support_degrees;

/// Orderings up to this size are searched exhaustively.
pub const EXHAUSTIVE_ORDERING_CAP: usize = 8;

/// `g(k) = ((k-1)/k)^{k-1}` for real `k ≥ 1`, with `g(0) = 1`.
pub fn g(k: f64) -> Result<f64> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::invalid(format!("g is defined for k ≥ 0, got {k}")));
    }
    if k <= 1.0 {
        if k > 0.0 && k < 1.0 {
            return Err(Error::invalid(format!("g is defined for k = 0 or k ≥ 1, got {k}")));
        }
        return Ok(1.0);
    }
    Ok(((k - 1.0) / k).powf(k - 1.0))
}

/// Exact `g(k)` for integer `k`.
pub fn g_rational(k: usize) -> BigRational {
    if k <= 1 {
        return BigRational::one();
    }
    let r = BigRational::new(BigInt::from(k - 1), BigInt::from(k));
    Pow::pow(r, (k - 1) as u32)
}

/// `n!/nⁿ`.
pub fn vdw_factor(n: usize) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::invalid("vdw_factor needs n ≥ 1"));
    }
    let nn: BigInt = Pow::pow(BigInt::from(n), n as u32);
    Ok(BigRational::new(big_factorial(n), nn))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Ordering {
    #[default]
    Identity,
    /// Maximize the factor over all relabelings.
    Best,
    /// `ordering[i]` is the variable placed at position `i`.
    Explicit(Vec<usize>),
}

impl std::str::FromStr for Ordering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Ordering::Identity),
            "best" => Ok(Ordering::Best),
            _ => Err(Error::invalid(format!("unknown ordering {s:?} (expected identity or best)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Factor {
    pub value: f64,
    #[serde(serialize_with = "crate::numeric::serialize_rational")]
    pub exact: BigRational,
    pub ordering: Vec<usize>,
}

fn factor_for(s: &[usize], ordering: &[usize]) -> BigRational {
    let n = s.len();
    ordering
        .iter()
        .enumerate()
        .map(|(i, &v)| g_rational(s[v].min(n - i)))
        .fold(BigRational::one(), |acc, x| acc * x)
}

/// `∏_i g(min(S_{σ(i)}, n+1-i))` for the ordering `σ`.
///
/// With [`Ordering::Best`] the ordering is searched exhaustively for `n ≤ 8`;
/// beyond that the degrees are sorted so the largest lands on the smallest cap.
/// The sorted assignment is optimal anyway (a pairwise exchange never helps),
/// the search is kept as an independent check.
pub fn generalized_factor(s: &[usize], ordering: &Ordering) -> Result<Factor> {
    let n = s.len();
    if n == 0 {
        return Err(Error::invalid("empty degree profile"));
    }
    if let Some((i, &v)) = s.iter().enumerate().find(|(_, &v)| v == 0 || v > n) {
        return Err(Error::invalid(format!("support degree S[{i}] = {v} outside 1..={n}")));
    }
    let order: Vec<usize> = match ordering {
        Ordering::Identity => (0..n).collect(),
        Ordering::Explicit(o) => {
            let mut seen = vec![false; n];
            if o.len() != n || o.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
                return Err(Error::invalid("ordering must be a permutation of 0..n"));
            }
            o.clone()
        }
        Ordering::Best if n <= EXHAUSTIVE_ORDERING_CAP => {
            let mut best: Option<(f64, Vec<usize>)> = None;
            for_each_permutation(n, |perm, _| {
                let v: f64 = perm
                    .iter()
                    .enumerate()
                    .map(|(i, &var)| g(s[var].min(n - i) as f64).expect("valid degree").ln())
                    .sum();
                if best.as_ref().is_none_or(|(b, _)| v > *b + 1e-12) {
                    best = Some((v, perm.to_vec()));
                }
            });
            best.expect("at least one permutation").1
        }
        Ordering::Best => greedy_ordering(s),
    };
    let exact = factor_for(s, &order);
    Ok(Factor { value: rational_to_f64(&exact), exact, ordering: order })
}

/// Degrees ascending along the positions, so the largest degree meets the smallest cap.
fn greedy_ordering(s: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by_key(|&i| (s[i], i));
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formula {
    /// Arbitrary per-variable degrees.
    General,
    /// All degrees equal `n`: factor `n!/nⁿ`.
    VanDerWaerden,
    /// All degrees equal `k < n`: factor `g(k)^{n-k} k!/k^k`.
    UniformDegree,
    /// Permanent with column support counts.
    ColumnCounts,
    /// Permanent with every column count equal to `k < n`.
    Regular,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub coefficient_lower: f64,
    pub coefficient_upper: f64,
    pub factor: f64,
    #[serde(serialize_with = "crate::numeric::serialize_rational")]
    pub factor_exact: BigRational,
    /// Factor of the identity ordering, reported for comparison.
    pub identity_factor: f64,
    pub ordering: Vec<usize>,
    pub formula: Formula,
    pub support_degrees: Vec<usize>,
    pub capacity: CapacityResult,
}

fn report(
    s: Vec<usize>,
    ordering: &Ordering,
    cap: CapacityResult,
    formula: Formula,
) -> Result<BoundReport> {
    let f = generalized_factor(&s, ordering)?;
    let identity = generalized_factor(&s, &Ordering::Identity)?;
    let lower = if cap.status == CapacityStatus::UnboundedBelowSuspected { 0.0 } else { f.value * cap.cap_lower() };
    Ok(BoundReport {
        coefficient_lower: lower,
        coefficient_upper: cap.cap_estimate,
        factor: f.value,
        factor_exact: f.exact,
        identity_factor: identity.value,
        ordering: f.ordering,
        formula,
        support_degrees: s,
        capacity: cap,
    })
}

fn uniform_formula(s: &[usize], n: usize, at_n: Formula, below_n: Formula, otherwise: Formula) -> Formula {
    match s.first() {
        Some(&k) if s.iter().all(|&v| v == k) => {
            if k == n {
                at_n
            } else {
                below_n
            }
        }
        _ => otherwise,
    }
}

/// Bracket for the mixed derivative `∂ⁿp/∂x₁⋯∂xₙ (0)` of a POS-hyperbolic `p`.
///
/// The lower end is only a certificate when the capacity run converged and the
/// input is POS-hyperbolic; for suspected unbounded inputs it is reported as 0.
pub fn coefficient_bounds(p: &PolynomialOracle, ordering: &Ordering, opts: &CapacityOptions) -> Result<BoundReport> {
    p.ensure_square("coefficient_bounds")?;
    let n = p.num_vars();
    let s = singleton_support_degrees(p)?;
    let cap = capacity(p, opts)?;
    let formula = uniform_formula(&s, n, Formula::VanDerWaerden, Formula::UniformDegree, Formula::General);
    report(s, ordering, cap, formula)
}

/// Bracket for `per(A)` from the column support counts.
///
/// Entries lying on no positive diagonal do not contribute to the permanent and
/// are dropped first; this keeps the capacity attained and only lowers the
/// column counts. Without any positive diagonal the lower end is 0.
pub fn permanent_lower_bound(a: &NonnegativeMatrix, ordering: &Ordering, opts: &CapacityOptions) -> Result<BoundReport> {
    let n = a.n();
    let Some(core) = a.total_support_part() else {
        let cap = capacity(&build_multilinear(a)?, opts)?;
        let s = a.column_support_counts();
        let mut r = report(s, ordering, cap, Formula::ColumnCounts)?;
        r.coefficient_lower = 0.0;
        return Ok(r);
    };
    let s = core.column_support_counts();
    let cap = capacity(&build_multilinear(&core)?, opts)?;
    let formula = uniform_formula(&s, n, Formula::VanDerWaerden, Formula::Regular, Formula::ColumnCounts);
    report(s, ordering, cap, formula)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchrijverComparison {
    /// `g(k)^{n-k} · k!/k^k`.
    #[serde(serialize_with = "crate::numeric::serialize_rational")]
    pub uniform_factor: BigRational,
    /// `g(k)^n`, the classical bound for `k`-regular matrices divided by `kⁿ`.
    #[serde(serialize_with = "crate::numeric::serialize_rational")]
    pub classic_factor: BigRational,
    pub uniform_is_sharper: bool,
}

pub fn schrijver_comparison(k: usize, n: usize) -> Result<SchrijverComparison> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("need 1 ≤ k ≤ n, got k = {k}, n = {n}")));
    }
    let gk = g_rational(k);
    let uniform = Pow::pow(gk.clone(), (n - k) as u32) * vdw_factor(k)?;
    let classic = Pow::pow(gk, n as u32);
    Ok(SchrijverComparison { uniform_is_sharper: uniform >= classic, uniform_factor: uniform, classic_factor: classic })
}

/// Identity `∏_{k ≤ n} g(k) = n!/nⁿ`, checked exactly.
pub fn vdw_identity_holds(n: usize) -> Result<bool> {
    let prod = (1..=n).map(g_rational).fold(BigRational::one(), |a, b| a * b);
    Ok(prod == vdw_factor(n)?)
}
