//! Capacity `Cap(p) = inf_{x > 0, ∏x = 1} p(x)`, matrix scaling, and the
//! capacity-based coefficient approximations.

mod approx;
mod sinkhorn;
mod solver;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polynomials::{partial_derivatives, PolynomialOracle, ScaledOracle};
use solver::{bfgs, ellipsoid, gradient_gap, Iterate, Objective};

pub use approx::{approximate_coefficient, improved_approximate, Approximation};
pub use sinkhorn::{sinkhorn_scale, ScalingResult, ScalingStatus, DS_TOL, SINKHORN_MAX_ITERS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapacityStatus {
    Converged,
    BudgetExhausted,
    UnboundedBelowSuspected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Quasi-Newton first; the ellipsoid runs only if the gradient certificate is too weak.
    #[default]
    Auto,
    EllipsoidOnly,
    FastOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityOptions {
    /// Target for `gap_bound`, the certified log-gap.
    pub tol: f64,
    pub method: Method,
    pub max_fast_iterations: usize,
    pub max_ellipsoid_iterations: usize,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        CapacityOptions {
            tol: 1e-8,
            method: Method::Auto,
            max_fast_iterations: 2_000,
            max_ellipsoid_iterations: 200_000,
        }
    }
}

impl CapacityOptions {
    pub fn with_tol(tol: f64) -> Self {
        CapacityOptions { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityResult {
    /// `p(e^minimizer)`, an upper estimate of `Cap(p)`.
    pub cap_estimate: f64,
    /// `Cap(p) ≥ cap_estimate · e^{-gap_bound}` over the search ball.
    pub gap_bound: f64,
    pub minimizer: Vec<f64>,
    pub status: CapacityStatus,
    pub iterations: usize,
    /// Radius of the ball the certificate refers to.
    #[serde(skip)]
    pub radius: f64,
}

impl CapacityResult {
    /// `cap_estimate · e^{-gap_bound}`.
    pub fn cap_lower(&self) -> f64 {
        self.cap_estimate * (-self.gap_bound).exp()
    }

    pub fn is_converged(&self) -> bool {
        self.status == CapacityStatus::Converged
    }
}

/// Radius of the starting ball, `√n · log(2 p(1, ..., 1))`, floored at `√n`.
fn start_radius(p: &PolynomialOracle) -> f64 {
    let n = p.num_vars() as f64;
    n.sqrt() * (2.0 * p.at_ones()).ln().abs().max(1.0)
}

/// Lipschitz constant of `φ` on the hyperplane: each `x_i ∂_i p / p` lies in
/// `[0, n]` and they sum to `n`, so the projected gradient has norm at most `√(n(n-1))`.
fn lipschitz(n: usize) -> f64 {
    ((n * (n - 1)) as f64).sqrt()
}

fn finish(
    p: &PolynomialOracle,
    obj: &Objective,
    best: &Iterate,
    gap: f64,
    status: CapacityStatus,
    iterations: usize,
    radius: f64,
) -> CapacityResult {
    let mut y = obj.lift(&best.z);
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    for v in &mut y {
        *v -= mean;
    }
    let x: Vec<f64> = y.iter().map(|v| v.exp()).collect();
    CapacityResult {
        cap_estimate: p.eval(&x),
        gap_bound: gap.max(0.0),
        minimizer: y,
        status,
        iterations,
        radius,
    }
}

/// Minimize `log p(e^y)` over `Σ y = 0`.
///
/// The reported value is always a function value, hence an upper bound on the
/// capacity. The gap certificate is the smaller of the convexity bound at the
/// best point and the ellipsoid volume bound; it refers to the ball around 0
/// whose radius is recorded in the result.
pub fn capacity(p: &PolynomialOracle, opts: &CapacityOptions) -> Result<CapacityResult> {
    p.ensure_square("capacity")?;
    p.ensure_nonzero("capacity")?;
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let n = p.num_vars();
    if n == 1 {
        // p = a x₁ and the only feasible point is x₁ = 1.
        return Ok(CapacityResult {
            cap_estimate: p.eval(&[1.0]),
            gap_bound: 0.0,
            minimizer: vec![0.0],
            status: CapacityStatus::Converged,
            iterations: 0,
            radius: 0.0,
        });
    }
    let mut obj = Objective::new(p);
    let d = obj.dim();
    let r0 = start_radius(p);
    let lip = lipschitz(n);
    let gtol = 1e-13 * (n as f64);

    let mut radius = r0;
    let mut iterations = 0;
    let mut best: Option<Iterate> = None;
    let mut suspected = false;

    if opts.method != Method::EllipsoidOnly {
        let fast = bfgs(&mut obj, vec![0.0; d], opts.max_fast_iterations, gtol);
        iterations += fast.iterations;
        let mut doublings = 0;
        while fast.best.norm() > radius && doublings < 2 {
            radius *= 2.0;
            doublings += 1;
        }
        suspected = fast.best.norm() > radius;
        best = Some(fast.best);
    }

    let grad_gap = |b: &Iterate, r: f64| gradient_gap(b, r, n);
    let mut gap = best.as_ref().map_or(f64::INFINITY, |b| grad_gap(b, radius));

    if suspected {
        let b = best.expect("fast path ran");
        let r = b.norm();
        return Ok(finish(p, &obj, &b, grad_gap(&b, r), CapacityStatus::UnboundedBelowSuspected, iterations, r));
    }

    if gap > opts.tol && opts.method != Method::FastOnly {
        // Volume ratio at which ε · 2R · L reaches the tolerance.
        let mut attempts = 0;
        loop {
            let seed = best.as_ref().map_or_else(|| vec![0.0; d], |b| b.z.clone());
            let seed_norm = seed.iter().map(|v| v * v).sum::<f64>().sqrt();
            let target = 0.5 * opts.tol / (2.0 * radius * lip);
            let run = ellipsoid(
                &mut obj,
                seed,
                radius + seed_norm,
                radius,
                opts.max_ellipsoid_iterations,
                target,
            );
            iterations += run.iterations;
            if let Some(cand) = run.best {
                if best.as_ref().is_none_or(|b| cand.value < b.value) {
                    best = Some(cand);
                }
            }
            let b = best.as_ref().expect("ellipsoid evaluated a feasible center");
            let ell_gap = if run.ratio < 1.0 { run.ratio * 2.0 * radius * lip } else { f64::INFINITY };
            gap = ell_gap.min(grad_gap(b, radius));
            let on_boundary = b.norm() >= 0.99 * radius;
            if opts.method == Method::EllipsoidOnly && on_boundary && attempts < 2 {
                radius *= 2.0;
                attempts += 1;
                continue;
            }
            suspected = opts.method == Method::EllipsoidOnly && on_boundary;
            break;
        }
    }

    let b = best.expect("some solver ran");
    let status = if suspected {
        CapacityStatus::UnboundedBelowSuspected
    } else if gap <= opts.tol {
        CapacityStatus::Converged
    } else {
        CapacityStatus::BudgetExhausted
    };
    Ok(finish(p, &obj, &b, gap, status, iterations, radius))
}

/// `DS(q) = Σ_i (∂_i q(1, ..., 1) - 1)²`.
pub fn ds_defect(p: &PolynomialOracle) -> Result<f64> {
    p.ensure_nonzero("ds_defect")?;
    let ones = vec![1.0; p.num_vars()];
    let partials = match p.log_gradient(&ones) {
        Some(g) => {
            let v = p.at_ones();
            g.into_iter().map(|gi| gi * v).collect()
        }
        None => partial_derivatives(p, &ones),
    };
    Ok(partials.iter().map(|d| (d - 1.0) * (d - 1.0)).sum())
}

/// `β = e^{minimizer}` and `q_β(x) = p(β ∘ x) / p(β)`, which is doubly stochastic
/// up to the solver accuracy.
pub fn scale_to_doubly_stochastic(p: &PolynomialOracle, opts: &CapacityOptions) -> Result<(Vec<f64>, PolynomialOracle)> {
    let cap = capacity(p, opts)?;
    if cap.status != CapacityStatus::Converged {
        return Err(Error::NotConverged(format!(
            "capacity did not converge (status {:?}, gap {:e}); the input may be decomposable",
            cap.status, cap.gap_bound
        )));
    }
    let beta: Vec<f64> = cap.minimizer.iter().map(|v| v.exp()).collect();
    let q = ScaledOracle::new(p.clone(), beta.clone(), cap.cap_estimate)?;
    Ok((beta, PolynomialOracle::new(q)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::{build_determinantal, build_multilinear, HermitianTuple, NonnegativeMatrix};

    fn mul(rows: &[Vec<f64>]) -> PolynomialOracle {
        build_multilinear(&NonnegativeMatrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn doubly_stochastic_has_unit_capacity() {
        let p = mul(&[vec![0.5, 0.5, 0.0], vec![0.25, 0.25, 0.5], vec![0.25, 0.25, 0.5]]);
        let r = capacity(&p, &CapacityOptions::default()).unwrap();
        assert_eq!(r.status, CapacityStatus::Converged);
        assert!((r.cap_estimate - 1.0).abs() < 1e-12);
        assert!(r.minimizer.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn diagonal_two() {
        let p = mul(&[vec![2.0, 0.0], vec![0.0, 2.0]]);
        let r = capacity(&p, &CapacityOptions::default()).unwrap();
        assert!((r.cap_estimate - 4.0).abs() < 1e-12);
        assert!(r.is_converged());
    }

    #[test]
    fn result_invariants() {
        let p = mul(&[vec![3.0, 1.0, 0.2], vec![0.1, 2.0, 1.0], vec![1.0, 0.0, 5.0]]);
        let r = capacity(&p, &CapacityOptions::default()).unwrap();
        assert!(r.minimizer.iter().sum::<f64>().abs() < 1e-12);
        let x: Vec<f64> = r.minimizer.iter().map(|v| v.exp()).collect();
        assert!((p.eval(&x) - r.cap_estimate).abs() <= 1e-10 * r.cap_estimate);
        assert!(r.gap_bound >= 0.0 && r.gap_bound <= 1e-8);
    }

    #[test]
    fn ellipsoid_only_agrees() {
        let p = mul(&[vec![3.0, 1.0, 0.2], vec![0.1, 2.0, 1.0], vec![1.0, 0.0, 5.0]]);
        let fast = capacity(&p, &CapacityOptions::default()).unwrap();
        let opts = CapacityOptions { tol: 1e-6, method: Method::EllipsoidOnly, ..Default::default() };
        let slow = capacity(&p, &opts).unwrap();
        assert!(slow.is_converged(), "{slow:?}");
        assert!(slow.cap_estimate >= fast.cap_estimate * (1.0 - 1e-12));
        assert!(slow.cap_lower() <= fast.cap_estimate);
        assert!((slow.cap_estimate / fast.cap_estimate - 1.0).abs() < 1e-6);
    }

    #[test]
    fn decomposable_input_is_flagged() {
        // x₁(x₁ + x₂): capacity 1 approached only as x₁ → 0
        let p = mul(&[vec![1.0, 0.0], vec![1.0, 1.0]]);
        let r = capacity(&p, &CapacityOptions::default()).unwrap();
        assert_eq!(r.status, CapacityStatus::UnboundedBelowSuspected);
        assert!(r.cap_estimate >= 1.0 && r.cap_estimate < 1.0 + 1e-6);
    }

    #[test]
    fn determinantal_identity() {
        let p = build_determinantal(&HermitianTuple::identity(3)).unwrap();
        let r = capacity(&p, &CapacityOptions::default()).unwrap();
        // (Σ t)³ on ∏t = 1: minimum 27 at the all-ones point
        assert!((r.cap_estimate - 27.0).abs() < 1e-9);
        assert!(r.is_converged());
    }

    #[test]
    fn defects() {
        let ds = mul(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!(ds_defect(&ds).unwrap() < 1e-24);
        assert!((ds_defect(&mul(&[vec![2.0, 0.0], vec![0.0, 2.0]])).unwrap() - 18.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_removes_defect() {
        let p = mul(&[vec![2.0, 0.0], vec![0.0, 2.0]]);
        let (_, q) = scale_to_doubly_stochastic(&p, &CapacityOptions::default()).unwrap();
        assert!(ds_defect(&q).unwrap() < 1e-20);
        let p = mul(&[vec![1.0, 0.0], vec![1.0, 1.0]]);
        assert!(scale_to_doubly_stochastic(&p, &CapacityOptions::default()).is_err());
    }
}
