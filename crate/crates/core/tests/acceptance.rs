//! The ten acceptance criteria. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; exits nonzero if any fails.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hypercap::bounds::{g, g_rational, permanent_lower_bound, schrijver_comparison, Ordering};
use hypercap::capacity::{approximate_coefficient, capacity, improved_approximate, CapacityOptions};
use hypercap::exact::{
    entropic_inequality, mixed_discriminant_exact, permanent_exact, permanent_f64,
};
use hypercap::hyperbolicity::{check_pos_hyperbolic, lemma29_bound, ratio_infimum, Counterexample};
use hypercap::instances::*;
use hypercap::polynomials::{
    build_determinantal, build_multilinear, build_sparse, mixed_form, partial_at_zero, NonnegativeMatrix,
    PolynomialOracle, SparsePolynomial,
};
use hypercap::structure::{in_support, is_indecomposable, rank, support_degree, SupportFunction};

type Outcome = Result<String, String>;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

fn unit_vectors(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn factorial_over_power(n: usize) -> BigRational {
    let fact: BigInt = (1..=n).map(BigInt::from).product();
    BigRational::new(fact, BigInt::from(n).pow(n as u32))
}

fn c1_vdw_chain() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let opts = CapacityOptions::default();
    let mut violations = Vec::new();
    for trial in 0..500 {
        let n = 3 + trial % 3;
        let b = random_doubly_stochastic(n, &mut rng);
        let per = permanent_f64(&b.rows());
        let c = capacity(&build_multilinear(&b).unwrap(), &opts).unwrap();
        let lower = hypercap::numeric::factorial(n) / (n as f64).powi(n as i32) * c.cap_lower();
        // floating rounding only: the two sides are computed independently
        if !(lower <= per * (1.0 + 1e-12) && per <= c.cap_estimate * (1.0 + 1e-12)) {
            violations.push((trial, lower, per, c.cap_estimate));
        }
    }
    let elapsed = start.elapsed();
    if !violations.is_empty() {
        return Err(format!("{} violations, first {:?}", violations.len(), violations[0]));
    }
    if elapsed > Duration::from_secs(120) {
        return Err(format!("took {elapsed:.1?}"));
    }
    Ok(format!("500 matrices, 0 violations, {elapsed:.1?}"))
}

fn c2_equality_at_j() -> Outcome {
    for n in 1..=8 {
        let j = NonnegativeMatrix::uniform(n);
        let per = permanent_exact(&j).unwrap();
        if per.as_rational() != Some(&factorial_over_power(n)) {
            return Err(format!("per(J_{n}) = {}", per.value));
        }
        let c = capacity(&build_multilinear(&j).unwrap(), &CapacityOptions::default()).unwrap();
        if (c.cap_estimate - 1.0).abs() > 1e-8 || c.cap_lower() < 1.0 - 1e-8 {
            return Err(format!("Cap(J_{n}) = {} (lower {})", c.cap_estimate, c.cap_lower()));
        }
    }
    Ok("per(J_n) = n!/n^n exactly and Cap = 1 for n ≤ 8".into())
}

fn c3_schrijver() -> Outcome {
    let value = schrijver_comparison(3, 4).unwrap().uniform_factor * BigRational::from_integer(81.into());
    if value != BigRational::from_integer(8.into()) {
        return Err(format!("bound value {value}, expected 8"));
    }
    let all = regular_integer_matrices(4, 3, 2);
    let opts = CapacityOptions::default();
    for m in &all {
        let per = permanent_f64(&m.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect::<Vec<_>>());
        if per < 8.0 * (1.0 - 1e-6) {
            return Err(format!("per = {per} for {m:?}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for _ in 0..200 {
        let n = rng.random_range(2..=6);
        let a = random_01_with_positive_permanent(n, 0.5, &mut rng);
        let per = permanent_f64(&a.rows());
        for ordering in [Ordering::Identity, Ordering::Best] {
            let r = permanent_lower_bound(&a, &ordering, &opts).unwrap();
            if r.coefficient_lower > per * (1.0 + 1e-12) {
                return Err(format!("lower {} > per {per} ({ordering:?}) for {:?}", r.coefficient_lower, a.rows()));
            }
        }
    }
    Ok(format!("{} matrices in Λ(3,4) have per ≥ 8; 200 sparse 0-1 brackets hold", all.len()))
}

fn c4_identity() -> Outcome {
    for n in 1..=20 {
        let prod: BigRational = (1..=n).map(g_rational).product();
        if prod != factorial_over_power(n) {
            return Err(format!("n = {n}: {prod}"));
        }
    }
    Ok("∏ g(k) = n!/n^n exactly for n ≤ 20".into())
}

fn c5_capacity_drop() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let opts = CapacityOptions::default();
    let mut worst = f64::INFINITY;
    let mut check = |p: &PolynomialOracle, label: &str| -> Result<(), String> {
        let n = p.num_vars();
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        let k = rank(p, &e1).unwrap();
        let cap = capacity(p, &opts).unwrap();
        let cap1 = capacity(&partial_at_zero(p, 0).unwrap(), &opts).unwrap();
        let rhs = g(k as f64).unwrap() * cap.cap_lower();
        worst = worst.min(cap1.cap_estimate / rhs);
        if cap1.cap_estimate < rhs * (1.0 - 1e-5) {
            return Err(format!("{label}: Cap(p_x1) = {} < g({k}) Cap(p) = {rhs}", cap1.cap_estimate));
        }
        Ok(())
    };
    for _ in 0..100 {
        let n = rng.random_range(2..=5);
        check(&build_multilinear(&random_positive_matrix(n, &mut rng)).unwrap(), "Mul")?;
    }
    for _ in 0..50 {
        let n = rng.random_range(2..=5);
        check(&build_determinantal(&random_psd_tuple(n, rng.random(), &mut rng)).unwrap(), "DET")?;
    }
    Ok(format!("150 instances, smallest ratio {worst:.6}"))
}

fn c6_approximation() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut done = 0;
    let mut worst = 0.0f64;
    while done < 50 {
        let n = rng.random_range(2..=6);
        let (p, c) = if done % 2 == 0 {
            let a = random_sparse_matrix(n, 0.75, &mut rng);
            (build_multilinear(&a).unwrap(), permanent_exact(&a).unwrap().to_f64())
        } else {
            let t = random_psd_tuple(n, rng.random(), &mut rng);
            (build_determinantal(&t).unwrap(), mixed_discriminant_exact(&t).unwrap().to_f64())
        };
        if !is_indecomposable(&p).unwrap().indecomposable {
            continue;
        }
        let a = approximate_coefficient(&p).unwrap();
        let s: Vec<usize> = a.support_degrees.clone();
        let identity_factor: f64 = (0..n).map(|i| g(s[i].min(n - i) as f64).unwrap()).product();
        if !(c <= a.estimate * (1.0 + 1e-12)
            && a.estimate <= 2.0 * c / a.factor * (1.0 + 1e-12)
            && a.estimate <= 2.0 * c / identity_factor * (1.0 + 1e-12))
        {
            return Err(format!("C = {c}, F = {}, factor {} for n = {n}", a.estimate, a.factor));
        }
        worst = worst.max(a.estimate * a.factor / (2.0 * c));
        done += 1;
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(300) {
        return Err(format!("took {elapsed:.1?}"));
    }
    Ok(format!("50 instances, largest F·factor/(2C) = {worst:.4}, {elapsed:.1?}"))
}

fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| {
            compositions(n - 1, total - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn c7_support() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let rs = compositions(4, 4);
    if rs.len() != 35 {
        return Err(format!("{} exponent vectors", rs.len()));
    }
    for _ in 0..50 {
        let a = loop {
            let rows: Vec<Vec<f64>> =
                (0..4).map(|_| (0..4).map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 }).collect()).collect();
            if let Ok(a) = NonnegativeMatrix::from_rows(&rows) {
                break a;
            }
        };
        let expanded = SparsePolynomial::from_linear_forms(&a.rows()).unwrap();
        let p = build_multilinear(&a).unwrap();
        for r in &rs {
            let member = in_support(&p, r).unwrap().member;
            if member != (expanded.coefficient(r) > 0.0) {
                return Err(format!("r = {r:?} for {:?}: in_support says {member}", a.rows()));
            }
        }
    }
    let q = build_sparse(4, 4, [(vec![1, 1, 1, 1], 1.0), (vec![0, 2, 0, 2], 1.0)]).unwrap().oracle();
    let s = SupportFunction::new(&q).unwrap();
    let values = [
        s.value_of(&[0, 1]).unwrap(),
        s.value_of(&[1, 2]).unwrap(),
        s.value_of(&[1]).unwrap(),
        s.value_of(&[0, 1, 2]).unwrap(),
    ];
    if values != [2, 2, 2, 3] {
        return Err(format!("S values {values:?}"));
    }
    let by_subset = support_degree(&q, &[true, true, true, false]).unwrap();
    Ok(format!("50 × 35 memberships agree; S({{1,2}}), S({{2,3}}), S({{2}}), S({{1,2,3}}) = 2, 2, 2, {by_subset}"))
}

fn c8_hyperbolicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut restrictions = 0;
    for i in 0..100 {
        let n = rng.random_range(2..=5);
        let p = if i % 2 == 0 {
            build_multilinear(&random_sparse_matrix(n, 0.7, &mut rng)).unwrap()
        } else {
            build_determinantal(&random_psd_tuple(n, rng.random(), &mut rng)).unwrap()
        };
        let v = check_pos_hyperbolic(&p, 200, 1000 + i as u64).unwrap();
        if !v.pass || v.newton_violations > 0 {
            return Err(format!("instance {i}: {v:?}"));
        }
        restrictions += v.real_rooted_restrictions;
    }
    let circle = build_sparse(2, 2, [(vec![2, 0], 1.0), (vec![0, 2], 1.0)]).unwrap().oracle();
    let v = check_pos_hyperbolic(&circle, 200, 42).unwrap();
    let Some(Counterexample::NotRealRooted { point, max_imag }) = &v.counterexample else {
        return Err(format!("x1^2 + x2^2 not rejected: {v:?}"));
    };
    if v.pass {
        return Err("x1^2 + x2^2 passed".into());
    }
    Ok(format!(
        "100 instances pass with {restrictions} real-rooted restrictions and no NI violations; \
         x1^2 + x2^2 fails at {point:.3?} (imag {max_imag:.3})"
    ))
}

fn c9_inequalities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    for _ in 0..100_000 {
        let n = rng.random_range(2..=10);
        let c = random_entropic_point(n, &mut rng);
        let e = entropic_inequality(&c).unwrap();
        if !e.holds {
            return Err(format!("entropic fails at {c:?}: {} < {}", e.lhs, e.rhs));
        }
    }
    for n in 2..=10 {
        let e = entropic_inequality(&vec![(n - 1) as f64 / n as f64; n]).unwrap();
        if (e.lhs - e.rhs).abs() > 1e-12 {
            return Err(format!("uniform n = {n}: {} vs {}", e.lhs, e.rhs));
        }
    }
    for _ in 0..10_000 {
        let n = rng.random_range(1..=8);
        let d = random_factored(n, &mut rng);
        let l = lemma29_bound(&d, ratio_infimum(&d).unwrap()).unwrap();
        if !(l.applicable && l.holds) {
            return Err(format!("lemma fails for {d:?}: {l:?}"));
        }
    }
    for n in 1..=8 {
        let d: Vec<f64> = (0..=n).map(|k| binomial(n, k)).collect();
        let l = lemma29_bound(&d, ratio_infimum(&d).unwrap()).unwrap();
        if !rel_close(l.d1, l.bound, 1e-10) {
            return Err(format!("(t+1)^{n}: d1 = {} bound = {}", l.d1, l.bound));
        }
    }
    Ok("10^5 entropic points, 10^4 factored polynomials, equality cases to tolerance".into())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn c10_oracle_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut worst = 0.0f64;
    for n in 1..=8 {
        for _ in 0..3 {
            let a = random_positive_matrix(n, &mut rng);
            let mf = mixed_form(&build_multilinear(&a).unwrap(), &unit_vectors(n)).unwrap();
            let per = permanent_f64(&a.rows());
            worst = worst.max((mf - per).abs() / per);
            if !rel_close(mf, per, 1e-9) {
                return Err(format!("Mul n = {n}: {mf} vs {per}"));
            }
            let t = random_psd_tuple(n, rng.random(), &mut rng);
            let mf = mixed_form(&build_determinantal(&t).unwrap(), &unit_vectors(n)).unwrap();
            let md = mixed_discriminant_exact(&t).unwrap().to_f64();
            worst = worst.max((mf - md).abs() / md);
            if !rel_close(mf, md, 1e-9) {
                return Err(format!("DET n = {n}: {mf} vs {md}"));
            }
        }
    }
    for n in 2..=5 {
        let p = build_multilinear(&random_positive_matrix(n, &mut rng)).unwrap();
        if improved_approximate(&p, 0).unwrap() != approximate_coefficient(&p).unwrap() {
            return Err(format!("improved_approximate(p, 0) differs for n = {n}"));
        }
    }
    Ok(format!("largest relative error {worst:.2e}; improved_approximate(p, 0) is identical"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("VDW bound chain", c1_vdw_chain),
        ("equality at J_n", c2_equality_at_j),
        ("generalized Schrijver bound", c3_schrijver),
        ("product identity for g", c4_identity),
        ("capacity drop under differentiation", c5_capacity_drop),
        ("factor-2 approximation contract", c6_approximation),
        ("support and Newton machinery", c7_support),
        ("hyperbolicity suite", c8_hyperbolicity),
        ("entropic inequality and d1 bound", c9_inequalities),
        ("oracle agreement", c10_oracle_agreement),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
