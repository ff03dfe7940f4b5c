//! Invariant suites behind `hypercap verify`.
//!
//! Each check compares the system against an independent computation (Ryser,
//! explicit expansion, eigensolvers, closed forms) on fixtures and seeded
//! random instances, and reports one pass/fail line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{g, generalized_factor, permanent_lower_bound, vdw_identity_holds, Ordering};
use crate::capacity::{capacity, sinkhorn_scale, CapacityOptions, CapacityStatus, DS_TOL, SINKHORN_MAX_ITERS};
use crate::error::Result;
use crate::exact::{
    capacity_grid, entropic_inequality, mini_vdw_verify, mixed_discriminant_exact, permanent_exact, permanent_f64,
    permanent_permutation_sum, unit_vectors,
};
use crate::hyperbolicity::{
    af_inequality_check, check_pos_hyperbolic, factorization_check_prop_c1, lemma29_bound, newton_inequalities,
    ratio_infimum, restriction_roots,
};
use crate::instances::*;
use crate::numeric::factorial;
use crate::polynomials::io::{parse_input, LoadedInput};
use crate::polynomials::{
    build_determinantal, build_multilinear, build_sparse, mixed_form, partial_at_zero, partial_derivatives,
    HermitianTuple, NonnegativeMatrix, PolynomialOracle,
};
use crate::structure::{in_newton_polytope, is_indecomposable, is_submodular, support_degree, SupportFunction};

/// Shipped fixture files.
pub const FIXTURES: &[(&str, &str)] = &[
    ("I3.json", include_str!("../fixtures/I3.json")),
    ("J3.json", include_str!("../fixtures/J3.json")),
    ("diag2.json", include_str!("../fixtures/diag2.json")),
    ("regular3.json", include_str!("../fixtures/regular3.json")),
    ("det_identity3.json", include_str!("../fixtures/det_identity3.json")),
    ("tuple_complex2.json", include_str!("../fixtures/tuple_complex2.json")),
    ("remark.json", include_str!("../fixtures/remark.json")),
    ("circle.json", include_str!("../fixtures/circle.json")),
];

/// Fixtures that are POS-hyperbolic by construction (matrices and tuples).
fn hyperbolic_fixtures() -> Result<Vec<(&'static str, PolynomialOracle)>> {
    FIXTURES
        .iter()
        .map(|(name, text)| Ok((*name, parse_input(text)?)))
        .filter(|r: &Result<(&str, LoadedInput)>| !matches!(r, Ok((_, LoadedInput::Sparse(_)))))
        .map(|r| r.and_then(|(name, input)| Ok((name, input.oracle()?))))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

impl std::str::FromStr for Level {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(crate::Error::invalid(format!("unknown level {s:?} (expected quick or full)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub module: &'static str,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckOutcome>,
}

type Check = fn(&mut Ctx) -> Result<(bool, String)>;

struct Ctx {
    rng: ChaCha8Rng,
    level: Level,
}

impl Ctx {
    fn count(&self, quick: usize, full: usize) -> usize {
        match self.level {
            Level::Quick => quick,
            Level::Full => full,
        }
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn summary(bad: usize, total: usize) -> (bool, String) {
    (bad == 0, format!("{} of {total} cases passed", total - bad))
}

fn positive_point(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| 0.2 + 2.0 * rng.random::<f64>()).collect()
}

fn random_sparse_poly(n: usize, rng: &mut impl Rng) -> Result<crate::polynomials::SparsePolynomial> {
    let terms: Vec<(Vec<u32>, f64)> = (0..4)
        .map(|_| {
            let mut e = vec![0u32; n];
            for _ in 0..n {
                e[rng.random_range(0..n)] += 1;
            }
            (e, 0.5 + rng.random::<f64>())
        })
        .collect();
    build_sparse(n, n, terms)
}

fn homogeneity(ctx: &mut Ctx) -> Result<(bool, String)> {
    let fx = hyperbolic_fixtures()?;
    let mut bad = 0;
    for (_, p) in &fx {
        let x = positive_point(p.num_vars(), &mut ctx.rng);
        let lam = 0.5 + 2.0 * ctx.rng.random::<f64>();
        let xl: Vec<f64> = x.iter().map(|v| v * lam).collect();
        let ok = rel_close(p.eval(&xl), lam.powi(p.degree() as i32) * p.eval(&x), 1e-10)
            && p.eval(&x) >= 0.0
            && p.at_ones() > 0.0;
        bad += !ok as usize;
    }
    Ok(summary(bad, fx.len()))
}

fn euler(ctx: &mut Ctx) -> Result<(bool, String)> {
    let fx = hyperbolic_fixtures()?;
    let mut bad = 0;
    for (_, p) in &fx {
        let x = positive_point(p.num_vars(), &mut ctx.rng);
        let d = partial_derivatives(p, &x);
        let lhs: f64 = x.iter().zip(&d).map(|(a, b)| a * b).sum();
        bad += !rel_close(lhs, p.degree() as f64 * p.eval(&x), 1e-8) as usize;
    }
    Ok(summary(bad, fx.len()))
}

fn taylor_coefficients(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(3, 20);
    let mut bad = 0;
    let mut total = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(2..=5);
        let q = random_sparse_poly(n, &mut ctx.rng)?;
        let p = q.oracle();
        for (r, &a) in q.terms() {
            let mut xs = Vec::new();
            for (i, &ri) in r.iter().enumerate() {
                for _ in 0..ri {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    xs.push(e);
                }
            }
            let fact: f64 = r.iter().map(|&v| factorial(v as usize)).product();
            total += 1;
            bad += !rel_close(mixed_form(&p, &xs)? / fact, a, 1e-9) as usize;
        }
    }
    Ok(summary(bad, total))
}

fn s_monotone(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(3, 20);
    let mut bad = 0;
    let mut total = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(3..=5);
        let a = random_01_with_positive_permanent(n, 0.6, &mut ctx.rng);
        let q = crate::polynomials::SparsePolynomial::from_linear_forms(&a.rows())?;
        let p = q.oracle();
        let d = q.partial_at_zero(0).oracle();
        if d.is_zero() {
            continue;
        }
        for mask in 0..1u64 << (n - 1) {
            let sub: Vec<bool> = (0..n - 1).map(|i| mask >> i & 1 == 1).collect();
            let mut full = vec![false];
            full.extend(&sub);
            total += 1;
            bad += (support_degree(&d, &sub)? > (n - 1).min(support_degree(&p, &full)?)) as usize;
        }
    }
    Ok(summary(bad, total))
}

fn ds_capacity(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(5, 50);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(2..=5);
        let b = random_doubly_stochastic(n, &mut ctx.rng);
        let c = capacity(&build_multilinear(&b)?, &CapacityOptions::default())?;
        bad += !((c.cap_estimate - 1.0).abs() < 1e-8 && c.is_converged()) as usize;
    }
    Ok(summary(bad, trials))
}

fn scaling_equivariance(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(3, 20);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(2..=5);
        let a = random_positive_matrix(n, &mut ctx.rng);
        let d1: Vec<f64> = (0..n).map(|_| 0.3 + ctx.rng.random::<f64>() * 3.0).collect();
        let d2: Vec<f64> = (0..n).map(|_| 0.3 + ctx.rng.random::<f64>() * 3.0).collect();
        let scaled = a.scaled(&d1, &d2)?;
        let opts = CapacityOptions::default();
        let c = capacity(&build_multilinear(&a)?, &opts)?.cap_estimate;
        let cs = capacity(&build_multilinear(&scaled)?, &opts)?.cap_estimate;
        let factor: f64 = d1.iter().chain(&d2).product();
        let sk = sinkhorn_scale(&a, DS_TOL, SINKHORN_MAX_ITERS)?;
        bad += !(rel_close(cs, factor * c, 1e-6) && rel_close(sk.cap_product, c, 1e-6)) as usize;
    }
    Ok(summary(bad, trials))
}

fn decomposable_flagged(_: &mut Ctx) -> Result<(bool, String)> {
    let a = NonnegativeMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]])?;
    let c = capacity(&build_multilinear(&a)?, &CapacityOptions::default())?;
    Ok((c.status == CapacityStatus::UnboundedBelowSuspected, format!("status {:?}", c.status)))
}

fn bound_chain(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(10, 100);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(3..=5);
        let b = random_doubly_stochastic(n, &mut ctx.rng);
        let per = permanent_f64(&b.rows());
        let c = capacity(&build_multilinear(&b)?, &CapacityOptions::default())?;
        let lower = factorial(n) / (n as f64).powi(n as i32) * c.cap_lower();
        bad += !(lower <= per * (1.0 + 1e-12) && per <= c.cap_estimate * (1.0 + 1e-12)) as usize;
    }
    Ok(summary(bad, trials))
}

fn identity_eq(_: &mut Ctx) -> Result<(bool, String)> {
    let ok = (1..=20).map(vdw_identity_holds).collect::<Result<Vec<_>>>()?.iter().all(|&b| b);
    Ok((ok, "∏ g(k) = n!/nⁿ for n ≤ 20".into()))
}

fn g_monotone(_: &mut Ctx) -> Result<(bool, String)> {
    let v = (1..=50).map(|k| g(k as f64)).collect::<Result<Vec<_>>>()?;
    let ok = v.windows(2).skip(1).all(|w| w[1] < w[0]) && v[1] < v[0];
    Ok((ok, "g strictly decreasing on 1..50".into()))
}

fn ordering_dominance(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(100, 1000);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(1..=9);
        let s: Vec<usize> = (0..n).map(|_| ctx.rng.random_range(1..=n)).collect();
        let best = generalized_factor(&s, &Ordering::Best)?;
        let id = generalized_factor(&s, &Ordering::Identity)?;
        bad += (best.exact < id.exact) as usize;
    }
    Ok(summary(bad, trials))
}

fn bound_sandwich(ctx: &mut Ctx) -> Result<(bool, String)> {
    let opts = CapacityOptions::default();
    let mut bad = 0;
    let mut total = 0;
    // every 0-1 matrix of size 3 with a positive diagonal
    for mask in 0..1u32 << 9 {
        let rows: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| (mask >> (3 * i + j) & 1) as f64).collect()).collect();
        let Ok(a) = NonnegativeMatrix::from_rows(&rows) else { continue };
        let per = permanent_f64(&rows);
        if per == 0.0 {
            continue;
        }
        let r = permanent_lower_bound(&a, &Ordering::Best, &opts)?;
        total += 1;
        bad += !(r.coefficient_lower <= per * (1.0 + 1e-9) && per <= r.coefficient_upper * (1.0 + 1e-9)) as usize;
    }
    for _ in 0..ctx.count(0, 200) {
        let n = ctx.rng.random_range(4..=5);
        let a = random_01_with_positive_permanent(n, 0.5, &mut ctx.rng);
        let per = permanent_f64(&a.rows());
        let r = permanent_lower_bound(&a, &Ordering::Best, &opts)?;
        total += 1;
        bad += !(r.coefficient_lower <= per * (1.0 + 1e-9) && per <= r.coefficient_upper * (1.0 + 1e-9)) as usize;
    }
    Ok(summary(bad, total))
}

fn random_hyperbolic(ctx: &mut Ctx, n: usize) -> PolynomialOracle {
    if ctx.rng.random::<bool>() {
        build_multilinear(&random_sparse_matrix(n, 0.6, &mut ctx.rng)).expect("valid matrix")
    } else {
        build_determinantal(&random_psd_tuple(n, ctx.rng.random::<bool>(), &mut ctx.rng)).expect("valid tuple")
    }
}

fn rank_equals_degree(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(4, 30);
    let mut bad = 0;
    let mut total = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(2..=ctx.count(4, 6));
        let p = random_hyperbolic(ctx, n);
        let ones = vec![1.0; n];
        for mask in 1..1u64 << n {
            let x: Vec<f64> = (0..n).map(|i| (mask >> i & 1) as f64).collect();
            let sub: Vec<bool> = x.iter().map(|&v| v == 1.0).collect();
            let roots = restriction_roots(&p, &x, &ones)?;
            total += 1;
            bad += (roots.nonzero_roots() != support_degree(&p, &sub)?) as usize;
        }
    }
    Ok(summary(bad, total))
}

fn submodular_instances(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(4, 30);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(2..=ctx.count(4, 6));
        let p = random_hyperbolic(ctx, n);
        bad += !is_submodular(&SupportFunction::new(&p)?)?.submodular as usize;
    }
    Ok(summary(bad, trials))
}

fn remark_witness(_: &mut Ctx) -> Result<(bool, String)> {
    let p = build_sparse(4, 4, [(vec![1, 1, 1, 1], 1.0), (vec![0, 2, 0, 2], 1.0)])?.oracle();
    let s = SupportFunction::new(&p)?;
    let values = [s.value_of(&[0, 1])?, s.value_of(&[1, 2])?, s.value_of(&[1])?, s.value_of(&[0, 1, 2])?];
    let v = is_submodular(&s)?;
    let ok = values == [2, 2, 2, 3] && !v.submodular;
    Ok((ok, format!("S values {values:?}, witness {:?}", v.witness)))
}

fn conditions_agree(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(6, 40);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(2..=5);
        let a = random_01_with_positive_permanent(n, 0.55, &mut ctx.rng);
        let v = is_indecomposable(&build_multilinear(&a)?)?;
        bad += (v.condition1 != Some(v.indecomposable)) as usize;
    }
    Ok(summary(bad, trials))
}

fn cyclic_polytope(_: &mut Ctx) -> Result<(bool, String)> {
    // x₁x₂² + x₂x₃² + x₃x₁²: (2,1,0) satisfies every S_p constraint but is not
    // a convex combination of the three exponents.
    let p = build_sparse(3, 3, [(vec![1, 2, 0], 1.0), (vec![0, 1, 2], 1.0), (vec![2, 0, 1], 1.0)])?.oracle();
    let accepted = in_newton_polytope(&p, &[2.0, 1.0, 0.0])?.member;
    Ok((accepted, "SUB_p contains (2,1,0), which lies outside the hull of the support".into()))
}

fn fixtures_hyperbolic(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(40, 200);
    let mut bad = Vec::new();
    for (name, p) in hyperbolic_fixtures()? {
        if !check_pos_hyperbolic(&p, trials, 42)?.pass {
            bad.push(name);
        }
    }
    let circle = build_sparse(2, 2, [(vec![2, 0], 1.0), (vec![0, 2], 1.0)])?.oracle();
    let circle_fails = !check_pos_hyperbolic(&circle, trials, 42)?.pass;
    let _ = &mut ctx.rng;
    Ok((bad.is_empty() && circle_fails, format!("failing fixtures {bad:?}; x₁²+x₂² rejected: {circle_fails}")))
}

fn fact1_reconstruction(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(10, 40);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(2..=5);
        let p = random_hyperbolic(ctx, n);
        let x: Vec<f64> = (0..n).map(|_| ctx.rng.random::<f64>() * 2.0 - 0.5).collect();
        let r = restriction_roots(&p, &x, &vec![1.0; n])?;
        let prod: f64 = r.roots.iter().map(|z| z.re).product();
        let scale = p.eval(&x.iter().map(|v| v.abs()).collect::<Vec<_>>()).max(p.at_ones());
        bad += ((p.eval(&x) - p.at_ones() * prod).abs() > 1e-7 * scale) as usize;
    }
    Ok(summary(bad, trials))
}

fn derivative_closure(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(4, 30);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(3..=5);
        let p = random_hyperbolic(ctx, n);
        let d = partial_at_zero(&p, 0)?;
        if d.is_zero() {
            continue;
        }
        bad += !check_pos_hyperbolic(&d, 20, ctx.rng.random())?.pass as usize;
    }
    Ok(summary(bad, trials))
}

fn mixed_form_positive(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(5, 40);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(2..=5);
        let p = random_hyperbolic(ctx, n);
        let xs: Vec<Vec<f64>> = (0..n).map(|_| positive_point(n, &mut ctx.rng)).collect();
        bad += !(mixed_form(&p, &xs)? > 0.0) as usize;
    }
    Ok(summary(bad, trials))
}

fn newton_and_lemma(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(200, 10_000);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(1..=8);
        let d = random_factored(n, &mut ctx.rng);
        let nis = newton_inequalities(&d);
        let c = ratio_infimum(&d)?;
        let l = lemma29_bound(&d, c)?;
        bad += !(nis.nis_hold && nis.wnis_hold == Some(true) && l.applicable && l.holds) as usize;
    }
    Ok(summary(bad, trials))
}

fn entropic(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(1000, 100_000);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(2..=10);
        bad += !entropic_inequality(&random_entropic_point(n, &mut ctx.rng))?.holds as usize;
    }
    let mut eq_bad = 0;
    for n in 2..=10 {
        let c = vec![(n - 1) as f64 / n as f64; n];
        let e = entropic_inequality(&c)?;
        eq_bad += ((e.lhs - e.rhs).abs() > 1e-12) as usize;
    }
    Ok((bad == 0 && eq_bad == 0, format!("{} of {trials} random points, equality cases off: {eq_bad}", trials - bad)))
}

fn af_check(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(10, 100);
    let j = build_multilinear(&NonnegativeMatrix::uniform(3))?;
    let t = build_determinantal(&random_psd_tuple(3, false, &mut ctx.rng))?;
    let a = af_inequality_check(&j, trials, 42)?;
    let b = af_inequality_check(&t, trials, 42)?;
    Ok((a.pass && b.pass, format!("worst ratios {:.6} and {:.6}", a.worst_ratio, b.worst_ratio)))
}

fn prop_c1(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(10, 50);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(2..=5);
        let p = random_hyperbolic(ctx, n);
        let z: Vec<f64> = (0..n).map(|_| ctx.rng.random::<f64>()).collect();
        let y = positive_point(n, &mut ctx.rng);
        bad += !factorization_check_prop_c1(&p, &z, &y)?.pass as usize;
    }
    Ok(summary(bad, trials))
}

fn ryser_vs_permutations(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(5, 30);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(1..=ctx.count(6, 8));
        let a = random_sparse_matrix(n, 0.7, &mut ctx.rng);
        let (r, q) = (permanent_f64(&a.rows()), permanent_permutation_sum(&a.rows()));
        bad += !rel_close(r, q, 1e-12) as usize;
    }
    Ok(summary(bad, trials))
}

fn diagonal_reduction(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(4, 20);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(1..=ctx.count(5, 8));
        let a = random_positive_matrix(n, &mut ctx.rng);
        let md = mixed_discriminant_exact(&HermitianTuple::diagonal_from_columns(&a.rows())?)?;
        bad += !rel_close(md.to_f64(), permanent_exact(&a)?.to_f64(), 1e-12) as usize;
    }
    Ok(summary(bad, trials))
}

fn oracle_agreement(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(4, 20);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(1..=ctx.count(5, 8));
        let a = random_positive_matrix(n, &mut ctx.rng);
        let e = unit_vectors(n);
        bad += !rel_close(mixed_form(&build_multilinear(&a)?, &e)?, permanent_exact(&a)?.to_f64(), 1e-9) as usize;
        let t = random_psd_tuple(n, ctx.rng.random(), &mut ctx.rng);
        bad += !rel_close(mixed_form(&build_determinantal(&t)?, &e)?, mixed_discriminant_exact(&t)?.to_f64(), 1e-9)
            as usize;
    }
    Ok(summary(bad, 2 * trials))
}

fn mini_vdw(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(20, 500);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(2..=8);
        let m = mini_vdw_verify(&random_probability_vector(n, &mut ctx.rng))?;
        bad += !(m.bound_holds && rel_close(m.closed_form, m.ryser, 1e-10)) as usize;
    }
    Ok(summary(bad, trials))
}

fn falikman(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(200, 10_000);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(2..=6);
        let b = random_doubly_stochastic(n, &mut ctx.rng);
        bad += (permanent_f64(&b.rows()) < factorial(n) / (n as f64).powi(n as i32) * (1.0 - 1e-9)) as usize;
    }
    Ok(summary(bad, trials))
}

fn grid_vs_solver(ctx: &mut Ctx) -> Result<(bool, String)> {
    let trials = ctx.count(2, 10);
    let mut bad = 0;
    for _ in 0..trials {
        let n = ctx.rng.random_range(2..=4);
        let p = build_multilinear(&random_positive_matrix(n, &mut ctx.rng))?;
        let grid = capacity_grid(&p, 9)?.to_f64();
        let c = capacity(&p, &CapacityOptions::default())?;
        bad += !(grid >= c.cap_estimate * (1.0 - 1e-9) && grid <= c.cap_estimate * (1.0 + 1e-6)) as usize;
    }
    Ok(summary(bad, trials))
}

fn fixture_outputs(_: &mut Ctx) -> Result<(bool, String)> {
    let i3 = match parse_input(FIXTURES[0].1)? {
        LoadedInput::Matrix(a) => permanent_exact(&a)?,
        _ => unreachable!("I3 is a matrix"),
    };
    let LoadedInput::Matrix(j3) = parse_input(FIXTURES[1].1)? else { unreachable!("J3 is a matrix") };
    let r = permanent_lower_bound(&j3, &Ordering::Best, &CapacityOptions::default())?;
    let ok = i3.value.to_string() == "1"
        && (r.coefficient_lower - 2.0 / 9.0).abs() < 1e-8
        && (r.coefficient_upper - 1.0).abs() < 1e-8;
    Ok((ok, format!("per(I3) = {}, J3 bracket [{:.10}, {:.10}]", i3.value, r.coefficient_lower, r.coefficient_upper)))
}

const CHECKS: &[(&str, &str, Check)] = &[
    ("polynomials", "homogeneity and positivity on fixtures", homogeneity),
    ("polynomials", "Euler identity", euler),
    ("polynomials", "polarization reproduces coefficients", taylor_coefficients),
    ("polynomials", "support degrees shrink under differentiation", s_monotone),
    ("capacity", "doubly stochastic capacity is 1", ds_capacity),
    ("capacity", "scaling equivariance and Sinkhorn agreement", scaling_equivariance),
    ("capacity", "decomposable input flagged", decomposable_flagged),
    ("bounds", "van der Waerden bound chain", bound_chain),
    ("bounds", "product of g(k) equals n!/n^n", identity_eq),
    ("bounds", "g strictly decreasing", g_monotone),
    ("bounds", "best ordering dominates identity", ordering_dominance),
    ("bounds", "permanent bracket on 0-1 matrices", bound_sandwich),
    ("structure", "rank of indicators equals support degree", rank_equals_degree),
    ("structure", "support functions are submodular", submodular_instances),
    ("structure", "non-submodular counterexample", remark_witness),
    ("structure", "indecomposability conditions agree", conditions_agree),
    ("structure", "SUB_p differs from the hull for a cyclic cubic", cyclic_polytope),
    ("hyperbolicity", "fixtures pass, x1^2 + x2^2 fails", fixtures_hyperbolic),
    ("hyperbolicity", "p(X) = p(e) times product of roots", fact1_reconstruction),
    ("hyperbolicity", "hyperbolicity survives differentiation", derivative_closure),
    ("hyperbolicity", "mixed forms of positive vectors are positive", mixed_form_positive),
    ("hyperbolicity", "Newton inequalities and d1 bound", newton_and_lemma),
    ("hyperbolicity", "entropic inequality", entropic),
    ("hyperbolicity", "Alexandrov-Fenchel", af_check),
    ("hyperbolicity", "restrictions split into nonnegative factors", prop_c1),
    ("exact_oracles", "Ryser agrees with permutation sum", ryser_vs_permutations),
    ("exact_oracles", "diagonal mixed discriminant is a permanent", diagonal_reduction),
    ("exact_oracles", "mixed forms equal permanents and mixed discriminants", oracle_agreement),
    ("exact_oracles", "mini van der Waerden closed form", mini_vdw),
    ("exact_oracles", "permanents of doubly stochastic matrices", falikman),
    ("exact_oracles", "grid capacity brackets the solver", grid_vs_solver),
    ("cli", "fixture reports", fixture_outputs),
];

/// Run every suite; errors inside a check count as failures.
pub fn run_verify(level: Level, seed: u64) -> VerifyReport {
    let checks: Vec<CheckOutcome> = CHECKS
        .iter()
        .enumerate()
        .map(|(i, &(module, name, f))| {
            let mut ctx = Ctx { rng: ChaCha8Rng::seed_from_u64(seed ^ i as u64), level };
            let (pass, detail) = f(&mut ctx).unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckOutcome { module, name, pass, detail }
        })
        .collect();
    let passed = checks.iter().filter(|c| c.pass).count();
    VerifyReport { level, seed, passed, failed: checks.len() - passed, checks }
}
