//! Support degrees `S_p(A)`, rank, submodularity, support and Newton polytope
//! membership, indecomposability.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::ChebyshevFit;
use crate::numeric::mask_members;
use crate::polynomials::{mixed_form, PolynomialOracle};

/// Relative threshold for reading a degree off interpolated coefficients.
pub const DEG_TOL: f64 = 1e-9;
/// Largest ground set handled by exhaustive subset enumeration.
pub const SUBSET_CAP: usize = 20;
/// Tolerance of the Newton polytope membership test.
pub const POLY_TOL: f64 = 1e-9;

fn indicator(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

/// `S_p(A)`: degree of `t ↦ p(1 + t·1_A)`.
///
/// Read off the representation when the oracle allows it; otherwise the
/// restriction is interpolated on `[0, 2]` and its degree detected with relative
/// threshold [`DEG_TOL`].
pub fn support_degree(p: &PolynomialOracle, subset: &[bool]) -> Result<usize> {
    let n = p.num_vars();
    if subset.len() != n {
        return Err(Error::invalid(format!("subset indicator has {} entries, expected {n}", subset.len())));
    }
    if let Some(s) = p.exact_support_degree(subset) {
        return Ok(s);
    }
    if !subset.iter().any(|&b| b) {
        p.ensure_nonzero("support_degree")?;
        return Ok(0);
    }
    let mut x = vec![1.0; n];
    let fit = ChebyshevFit::new(p.degree(), 0.0, 2.0, |t| {
        for (xi, &inside) in x.iter_mut().zip(subset) {
            if inside {
                *xi = 1.0 + t;
            }
        }
        p.eval(&x)
    });
    fit.detected_degree(DEG_TOL)
        .ok_or_else(|| Error::ZeroPolynomial("support_degree: restriction vanishes identically".into()))
}

/// `S_p({i})` for every variable.
pub fn singleton_support_degrees(p: &PolynomialOracle) -> Result<Vec<usize>> {
    let n = p.num_vars();
    (0..n)
        .map(|i| {
            let mut s = vec![false; n];
            s[i] = true;
            support_degree(p, &s)
        })
        .collect()
}

enum Source {
    Oracle(PolynomialOracle),
    Function(Box<dyn Fn(u64) -> usize + Send + Sync>),
}

/// Set function `A ↦ S_p(A)` on subsets of `{0, ..., n-1}` encoded as bit masks,
/// with a cache safe for concurrent fill.
pub struct SupportFunction {
    n: usize,
    source: Source,
    cache: RwLock<HashMap<u64, usize>>,
    table: OnceLock<Vec<usize>>,
}

impl std::fmt::Debug for SupportFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SupportFunction").field("n", &self.n).finish_non_exhaustive()
    }
}

impl SupportFunction {
    pub fn new(p: &PolynomialOracle) -> Result<Self> {
        p.ensure_nonzero("support function")?;
        if p.num_vars() > 63 {
            return Err(Error::BudgetExceeded("support functions are limited to 63 variables".into()));
        }
        Ok(SupportFunction {
            n: p.num_vars(),
            source: Source::Oracle(p.clone()),
            cache: RwLock::new(HashMap::new()),
            table: OnceLock::new(),
        })
    }

    /// An arbitrary set function, mainly for testing the lattice checks.
    pub fn from_fn(n: usize, f: impl Fn(u64) -> usize + Send + Sync + 'static) -> Self {
        SupportFunction { n, source: Source::Function(Box::new(f)), cache: RwLock::new(HashMap::new()), table: OnceLock::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn compute(&self, mask: u64) -> Result<usize> {
        match &self.source {
            Source::Oracle(p) => support_degree(p, &indicator(mask, self.n)),
            Source::Function(f) => Ok(f(mask)),
        }
    }

    pub fn value(&self, mask: u64) -> Result<usize> {
        if let Some(t) = self.table.get() {
            return Ok(t[mask as usize]);
        }
        if let Some(&v) = self.cache.read().expect("cache lock").get(&mask) {
            return Ok(v);
        }
        let v = self.compute(mask)?;
        self.cache.write().expect("cache lock").insert(mask, v);
        Ok(v)
    }

    /// `S(A)` for an explicit list of (0-based) indices.
    pub fn value_of(&self, indices: &[usize]) -> Result<usize> {
        self.value(indices.iter().fold(0, |m, &i| m | 1 << i))
    }

    /// All `2ⁿ` values, computed in parallel; `n ≤ 20`.
    pub fn table(&self) -> Result<&[usize]> {
        if let Some(t) = self.table.get() {
            return Ok(t);
        }
        if self.n > SUBSET_CAP {
            return Err(Error::BudgetExceeded(format!(
                "exhaustive subset enumeration for n = {} (cap {SUBSET_CAP})",
                self.n
            )));
        }
        let values = (0..1u64 << self.n)
            .into_par_iter()
            .map(|m| self.compute(m))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.table.get_or_init(|| values))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmodularVerdict {
    pub submodular: bool,
    /// Violating pair `(A, B)` with `S(A∪B) + S(A∩B) > S(A) + S(B)`, 0-based.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
    /// `false` when the verdict comes from random sampling (`n > 20`).
    pub exhaustive: bool,
}

/// Submodularity through the local exchange form
/// `S(C+i) + S(C+j) ≥ S(C+i+j) + S(C)`, which is equivalent to the pairwise one.
/// Pairs `i < j` are visited in lexicographic order, `C` in increasing mask order.
pub fn is_submodular(s: &SupportFunction) -> Result<SubmodularVerdict> {
    let n = s.n();
    let check = |c: u64, i: usize, j: usize| -> Result<Option<(Vec<usize>, Vec<usize>)>> {
        let (ci, cj) = (c | 1 << i, c | 1 << j);
        if s.value(ci | cj)? + s.value(c)? > s.value(ci)? + s.value(cj)? {
            Ok(Some((mask_members(ci, n).collect(), mask_members(cj, n).collect())))
        } else {
            Ok(None)
        }
    };
    if n <= SUBSET_CAP {
        s.table()?;
        for i in 0..n {
            for j in i + 1..n {
                let rest = ((1u64 << n) - 1) & !(1 << i) & !(1 << j);
                // enumerate submasks of `rest` in increasing order
                let mut c = 0u64;
                loop {
                    if let Some(w) = check(c, i, j)? {
                        return Ok(SubmodularVerdict { submodular: false, witness: Some(w), exhaustive: true });
                    }
                    if c == rest {
                        break;
                    }
                    c = (c.wrapping_sub(rest)) & rest;
                }
            }
        }
        return Ok(SubmodularVerdict { submodular: true, witness: None, exhaustive: true });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..10_000 {
        let i = rng.random_range(0..n);
        let j = (i + rng.random_range(1..n)) % n;
        let c = rng.random::<u64>() & ((1u64 << n) - 1) & !(1 << i) & !(1 << j);
        if let Some(w) = check(c, i.min(j), i.max(j))? {
            return Ok(SubmodularVerdict { submodular: false, witness: Some(w), exhaustive: false });
        }
    }
    Ok(SubmodularVerdict { submodular: true, witness: None, exhaustive: false })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportVerdict {
    pub member: bool,
    /// First subset (mask order) with `r(S) > S_p(S)`.
    pub violated: Option<Vec<usize>>,
}

/// `r ∈ supp(p)` through `r(S) ≤ S_p(S)` for every `S`; valid for POS-hyperbolic `p`.
pub fn in_support(p: &PolynomialOracle, r: &[u32]) -> Result<SupportVerdict> {
    let n = p.num_vars();
    if r.len() != n {
        return Err(Error::invalid(format!("exponent has {} entries, expected {n}", r.len())));
    }
    let total: u64 = r.iter().map(|&v| v as u64).sum();
    if total != p.degree() as u64 {
        return Err(Error::invalid(format!("exponent sums to {total}, expected the degree {}", p.degree())));
    }
    let s = SupportFunction::new(p)?;
    let table = s.table()?;
    for (mask, &sv) in table.iter().enumerate() {
        let rs: u64 = mask_members(mask as u64, n).map(|i| r[i] as u64).sum();
        if rs > sv as u64 {
            return Ok(SupportVerdict { member: false, violated: Some(mask_members(mask as u64, n).collect()) });
        }
    }
    Ok(SupportVerdict { member: true, violated: None })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonVerdict {
    pub member: bool,
    /// `min_S S_p(S) - x(S)`.
    pub min_slack: f64,
    pub argmin: Vec<usize>,
}

/// Membership of `x` in `{x ≥ 0, Σx = n, x(S) ≤ S_p(S)}`, the Newton polytope
/// for POS-hyperbolic `p`.
pub fn in_newton_polytope(p: &PolynomialOracle, x: &[f64]) -> Result<NewtonVerdict> {
    let n = p.num_vars();
    if x.len() != n {
        return Err(Error::invalid(format!("point has {} entries, expected {n}", x.len())));
    }
    if x.iter().any(|&v| !(v >= -POLY_TOL)) {
        return Err(Error::invalid("point must be nonnegative"));
    }
    let total: f64 = x.iter().sum();
    if (total - p.degree() as f64).abs() > 1e-9 {
        return Err(Error::invalid(format!("coordinates sum to {total}, expected {}", p.degree())));
    }
    let s = SupportFunction::new(p)?;
    let table = s.table()?;
    let (mut best, mut arg) = (f64::INFINITY, 0u64);
    for (mask, &sv) in table.iter().enumerate() {
        let xs: f64 = mask_members(mask as u64, n).map(|i| x[i]).sum();
        let slack = sv as f64 - xs;
        if slack < best {
            best = slack;
            arg = mask as u64;
        }
    }
    Ok(NewtonVerdict { member: best >= -POLY_TOL, min_slack: best, argmin: mask_members(arg, n).collect() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndecomposabilityVerdict {
    pub indecomposable: bool,
    /// First proper nonempty `A` (mask order) with `S_p(A) = |A|`.
    pub witness: Option<Vec<usize>>,
    /// Verdict of the coefficient condition, when it was evaluated.
    pub condition1: Option<bool>,
    /// `true` when the coefficient condition was checked on a sample of pairs only.
    pub condition1_sampled: bool,
}

/// Coefficient of `x_i² ∏_{m ≠ i, j} x_m` (times `2!`), positive for every
/// ordered pair `i ≠ j` exactly when `p` is indecomposable.
fn exchange_coefficient(p: &PolynomialOracle, i: usize, j: usize) -> Result<f64> {
    let n = p.num_vars();
    if let Some(s) = p.as_sparse() {
        let mut r = vec![1u32; n];
        r[i] = 2;
        r[j] = 0;
        return Ok(2.0 * s.coefficient(&r));
    }
    let mut vectors = Vec::with_capacity(n);
    for m in 0..n {
        let k = if m == j { i } else { m };
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        vectors.push(v);
    }
    mixed_form(p, &vectors)
}

/// Indecomposability of a POS-hyperbolic `p` via `S_p(A) > |A|` for
/// `1 ≤ |A| < n`, cross-checked against the coefficient condition.
pub fn is_indecomposable(p: &PolynomialOracle) -> Result<IndecomposabilityVerdict> {
    p.ensure_square("is_indecomposable")?;
    let n = p.num_vars();
    let s = SupportFunction::new(p)?;
    let table = s.table()?;
    let full = (1u64 << n) - 1;
    let witness = (1..full)
        .find(|&m| table[m as usize] <= m.count_ones() as usize)
        .map(|m| mask_members(m, n).collect::<Vec<_>>());

    let scale = p.at_ones();
    let positive = |i: usize, j: usize| -> Result<bool> {
        Ok(exchange_coefficient(p, i, j)? > 1e-10 * scale)
    };
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let (condition1, sampled) = if n < 2 {
        (None, false)
    } else if p.as_sparse().is_some() || n <= 10 {
        let mut all = true;
        for &(i, j) in &pairs {
            if !positive(i, j)? {
                all = false;
                break;
            }
        }
        (Some(all), false)
    } else if n <= crate::polynomials::POLARIZATION_CAP {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut all = true;
        for _ in 0..8 {
            let (i, j) = pairs[rng.random_range(0..pairs.len())];
            if !positive(i, j)? {
                all = false;
                break;
            }
        }
        (Some(all), true)
    } else {
        (None, false)
    };
    Ok(IndecomposabilityVerdict { indecomposable: witness.is_none(), witness, condition1, condition1_sampled: sampled })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub part: Vec<usize>,
    pub complement: Vec<usize>,
    pub verified: bool,
    /// Largest relative deviation of `p(x) p(1)` from `p(x_A, 1) p(1, x_{A'})` over the sample.
    pub max_rel_error: f64,
}

/// Look for `A` with `S_p(A) = |A|` and check `p(x) = p(x_A, 1) p(1, x_{A'}) / p(1)` at
/// 20 random positive points. Among tight sets the most balanced split is returned.
pub fn detect_decomposition(p: &PolynomialOracle) -> Result<Option<Decomposition>> {
    p.ensure_square("detect_decomposition")?;
    let n = p.num_vars();
    let s = SupportFunction::new(p)?;
    let table = s.table()?;
    let full = (1u64 << n) - 1;
    let balance = |m: u64| (m.count_ones() as usize).min(n - m.count_ones() as usize);
    let mut chosen: Option<u64> = None;
    for m in 1..full {
        if table[m as usize] == m.count_ones() as usize && chosen.is_none_or(|c| balance(m) > balance(c)) {
            chosen = Some(m);
        }
    }
    let Some(mask) = chosen else {
        return Ok(None);
    };
    let inside = indicator(mask, n);
    let norm = p.at_ones();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..3.0)).collect();
        let xa: Vec<f64> = x.iter().zip(&inside).map(|(&v, &b)| if b { v } else { 1.0 }).collect();
        let xb: Vec<f64> = x.iter().zip(&inside).map(|(&v, &b)| if b { 1.0 } else { v }).collect();
        let lhs = p.eval(&x) * norm;
        let rhs = p.eval(&xa) * p.eval(&xb);
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE));
    }
    Ok(Some(Decomposition {
        part: mask_members(mask, n).collect(),
        complement: mask_members(full & !mask, n).collect(),
        verified: worst <= 1e-8,
        max_rel_error: worst,
    }))
}

/// `Rank_p(X)`: number of nonzero roots of `t ↦ p(X - t·1)`.
///
/// Indicator vectors go through [`support_degree`]; other points count the
/// computed roots above the rank tolerance.
pub fn rank(p: &PolynomialOracle, x: &[f64]) -> Result<usize> {
    let n = p.num_vars();
    if x.len() != n {
        return Err(Error::invalid(format!("point has {} entries, expected {n}", x.len())));
    }
    if x.iter().all(|&v| v == 0.0) {
        return Ok(0);
    }
    if x.iter().all(|&v| v == 0.0 || v == 1.0) {
        let subset: Vec<bool> = x.iter().map(|&v| v == 1.0).collect();
        return support_degree(p, &subset);
    }
    let report = crate::hyperbolicity::restriction_roots(p, x, &vec![1.0; n])?;
    if !report.all_real {
        return Err(Error::HyperbolicityViolation(format!(
            "restriction at the given point has complex roots (max imaginary part {:e})",
            report.max_imag
        )));
    }
    Ok(report.nonzero_roots())
}
