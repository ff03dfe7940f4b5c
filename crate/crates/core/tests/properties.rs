use proptest::prelude::*;

use hypercap::bounds::{g, generalized_factor, Ordering};
use hypercap::capacity::{capacity, sinkhorn_scale, CapacityOptions, DS_TOL, SINKHORN_MAX_ITERS};
use hypercap::exact::{permanent_f64, permanent_permutation_sum};
use hypercap::hyperbolicity::{newton_inequalities, restriction_roots};
use hypercap::polynomials::io::{parse_input, LoadedInput};
use hypercap::polynomials::{build_multilinear, NonnegativeMatrix, SparsePolynomial};
use hypercap::structure::{in_support, is_submodular, SupportFunction};

fn positive_matrix(max_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2..=max_n).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0.05f64..5.0, n), n))
}

fn zero_one_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(prop::bool::ANY, n), n).prop_filter_map("zero row", |rows| {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&b| f64::from(u8::from(b))).collect()).collect();
        rows.iter().all(|r| r.iter().any(|&v| v > 0.0)).then_some(rows)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ryser_matches_permutation_sum(rows in positive_matrix(6)) {
        let r = permanent_f64(&rows);
        let q = permanent_permutation_sum(&rows);
        prop_assert!((r - q).abs() <= 1e-12 * q);
    }

    #[test]
    fn homogeneous_of_degree_n(rows in positive_matrix(6), x in prop::collection::vec(0.1f64..3.0, 6), lam in 0.2f64..4.0) {
        let n = rows.len();
        let p = build_multilinear(&NonnegativeMatrix::from_rows(&rows).unwrap()).unwrap();
        let x = &x[..n];
        let xl: Vec<f64> = x.iter().map(|v| v * lam).collect();
        let (a, b) = (p.eval(&xl), lam.powi(n as i32) * p.eval(x));
        prop_assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn capacity_brackets_the_permanent(rows in positive_matrix(5)) {
        let n = rows.len();
        let a = NonnegativeMatrix::from_rows(&rows).unwrap();
        let c = capacity(&build_multilinear(&a).unwrap(), &CapacityOptions::default()).unwrap();
        let per = permanent_f64(&rows);
        let vdw = hypercap::numeric::factorial(n) / (n as f64).powi(n as i32);
        prop_assert!(c.is_converged());
        prop_assert!(vdw * c.cap_lower() <= per * (1.0 + 1e-12));
        prop_assert!(per <= c.cap_estimate * (1.0 + 1e-12));
    }

    #[test]
    fn capacity_is_scaling_equivariant(
        rows in positive_matrix(4),
        d in prop::collection::vec(0.2f64..5.0, 8),
    ) {
        let n = rows.len();
        let a = NonnegativeMatrix::from_rows(&rows).unwrap();
        let scaled = a.scaled(&d[..n], &d[4..4 + n]).unwrap();
        let opts = CapacityOptions::default();
        let c = capacity(&build_multilinear(&a).unwrap(), &opts).unwrap().cap_estimate;
        let cs = capacity(&build_multilinear(&scaled).unwrap(), &opts).unwrap().cap_estimate;
        let factor: f64 = d[..n].iter().chain(&d[4..4 + n]).product();
        prop_assert!((cs - factor * c).abs() <= 1e-7 * cs);
        let sk = sinkhorn_scale(&a, DS_TOL, SINKHORN_MAX_ITERS).unwrap();
        prop_assert!((sk.cap_product - c).abs() <= 1e-7 * c);
    }

    #[test]
    fn restriction_roots_of_linear_forms(rows in positive_matrix(5), x in prop::collection::vec(-2.0f64..2.0, 5)) {
        // p(X - t e) = ∏ (a_i·X - t a_i·e): the roots are the ratios
        let n = rows.len();
        let p = build_multilinear(&NonnegativeMatrix::from_rows(&rows).unwrap()).unwrap();
        let x = &x[..n];
        let mut expected: Vec<f64> = rows
            .iter()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() / r.iter().sum::<f64>())
            .collect();
        expected.sort_by(f64::total_cmp);
        let report = restriction_roots(&p, x, &vec![1.0; n]).unwrap();
        prop_assert!(report.all_real);
        prop_assert_eq!(report.roots.len(), n);
        for (z, e) in report.roots.iter().zip(&expected) {
            prop_assert!((z.re - e).abs() <= 1e-6 * (1.0 + e.abs()), "{:?} vs {:?}", report.roots, expected);
        }
    }

    #[test]
    fn factored_polynomials_satisfy_newton(factors in prop::collection::vec((0.01f64..10.0, 0.01f64..10.0), 1..9)) {
        let mut d = vec![1.0];
        for (a, b) in &factors {
            let mut next = vec![0.0; d.len() + 1];
            for (j, c) in d.iter().enumerate() {
                next[j] += c * b;
                next[j + 1] += c * a;
            }
            d = next;
        }
        let r = newton_inequalities(&d);
        prop_assert!(r.nis_hold);
        prop_assert_eq!(r.wnis_hold, Some(true));
    }

    #[test]
    fn best_ordering_is_optimal(s in prop::collection::vec(1usize..=8, 1..=8)) {
        let n = s.len();
        let s: Vec<usize> = s.iter().map(|&v| v.min(n)).collect();
        let best = generalized_factor(&s, &Ordering::Best).unwrap();
        let id = generalized_factor(&s, &Ordering::Identity).unwrap();
        prop_assert!(best.exact >= id.exact);
        // any explicit ordering is dominated
        let rev: Vec<usize> = (0..n).rev().collect();
        let r = generalized_factor(&s, &Ordering::Explicit(rev)).unwrap();
        prop_assert!(best.exact >= r.exact);
    }

    #[test]
    fn g_is_decreasing(k in 1.0f64..200.0, dk in 0.01f64..10.0) {
        prop_assert!(g(k + dk).unwrap() < g(k).unwrap());
        prop_assert!(g(k).unwrap() > (-1.0f64).exp());
    }

    #[test]
    fn support_matches_expansion(rows in zero_one_matrix(4), r in prop::collection::vec(0u32..=2, 4)) {
        let total: u32 = r.iter().sum();
        prop_assume!(total == 4);
        let expanded = SparsePolynomial::from_linear_forms(&rows).unwrap();
        let p = build_multilinear(&NonnegativeMatrix::from_rows(&rows).unwrap()).unwrap();
        prop_assert_eq!(in_support(&p, &r).unwrap().member, expanded.coefficient(&r) > 0.0);
    }

    #[test]
    fn multilinear_support_is_submodular(rows in zero_one_matrix(5)) {
        let p = build_multilinear(&NonnegativeMatrix::from_rows(&rows).unwrap()).unwrap();
        prop_assert!(is_submodular(&SupportFunction::new(&p).unwrap()).unwrap().submodular);
    }

    #[test]
    fn json_round_trip(rows in positive_matrix(4)) {
        let a = NonnegativeMatrix::from_rows(&rows).unwrap();
        let text = LoadedInput::Matrix(a.clone()).to_json().to_string();
        match parse_input(&text).unwrap() {
            LoadedInput::Matrix(b) => prop_assert_eq!(b.rows(), a.rows()),
            other => prop_assert!(false, "parsed as {}", other.kind()),
        }
    }
}
