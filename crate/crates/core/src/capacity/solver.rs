//! Minimization of `φ(y) = log p(e^y)` on the hyperplane `Σ y = 0`.
//!
//! Points of the hyperplane are written `y = U z` with `U` the orthonormal
//! Helmert basis, so both solvers work in plain `ℝ^{n-1}`.

use nalgebra::{DMatrix, DVector};

use crate::polynomials::{log_gradient, PolynomialOracle};

/// Coordinates beyond this make `e^y` overflow.
const EXP_LIMIT: f64 = 600.0;

pub(crate) struct Objective<'a> {
    p: &'a PolynomialOracle,
    n: usize,
    pub(crate) evaluations: usize,
}

impl<'a> Objective<'a> {
    pub(crate) fn new(p: &'a PolynomialOracle) -> Self {
        Objective { p, n: p.num_vars(), evaluations: 0 }
    }

    pub(crate) fn dim(&self) -> usize {
        self.n - 1
    }

    /// `y = U z`, where column `k` of `U` is `(1, ..., 1, -(k+1), 0, ...)/√((k+1)(k+2))`.
    pub(crate) fn lift(&self, z: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        // suffix sums: y_i = Σ_{k ≥ i} z_k c_k  - i · z_{i-1} c_{i-1}
        let mut tail = 0.0;
        for k in (0..n - 1).rev() {
            let c = 1.0 / (((k + 1) * (k + 2)) as f64).sqrt();
            y[k + 1] -= (k + 1) as f64 * z[k] * c;
            tail += z[k] * c;
            y[k] += tail;
        }
        y
    }

    /// `Uᵀ g`.
    pub(crate) fn reduce(&self, g: &[f64]) -> Vec<f64> {
        let mut prefix = 0.0;
        (0..self.n - 1)
            .map(|k| {
                prefix += g[k];
                let c = 1.0 / (((k + 1) * (k + 2)) as f64).sqrt();
                (prefix - (k + 1) as f64 * g[k + 1]) * c
            })
            .collect()
    }

    /// `φ(U z)`, `+∞` outside the representable range.
    pub(crate) fn value(&mut self, z: &[f64]) -> f64 {
        let y = self.lift(z);
        self.value_at(&y)
    }

    pub(crate) fn value_at(&mut self, y: &[f64]) -> f64 {
        if y.iter().any(|v| !v.is_finite() || v.abs() > EXP_LIMIT) {
            return f64::INFINITY;
        }
        self.evaluations += 1;
        let x: Vec<f64> = y.iter().map(|v| v.exp()).collect();
        let v = self.p.eval(&x);
        if v > 0.0 && v.is_finite() {
            v.ln()
        } else {
            f64::INFINITY
        }
    }

    /// Reduced gradient and the Euler residual `|Σ_i x_i ∂_i p / p - n|` of the full one.
    pub(crate) fn gradient(&mut self, z: &[f64]) -> (Vec<f64>, f64) {
        let y = self.lift(z);
        let x: Vec<f64> = y.iter().map(|v| v.exp()).collect();
        self.evaluations += self.n * (self.n + 1);
        let g = log_gradient(self.p, &x);
        let residual = (g.iter().sum::<f64>() - self.n as f64).abs();
        (self.reduce(&g), residual)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Best point seen by a solver together with its gradient data.
#[derive(Debug, Clone)]
pub(crate) struct Iterate {
    pub(crate) z: Vec<f64>,
    pub(crate) value: f64,
    pub(crate) grad: Vec<f64>,
    pub(crate) residual: f64,
}

impl Iterate {
    pub(crate) fn grad_norm(&self) -> f64 {
        norm(&self.grad)
    }

    pub(crate) fn norm(&self) -> f64 {
        norm(&self.z)
    }
}

/// Lower bound on `φ(best) - min_{‖z‖ ≤ r} φ` from convexity:
/// `φ(w) ≥ φ(z) - ‖∇φ(z)‖ ‖w - z‖` and `‖w - z‖ ≤ r + ‖z‖`.
pub(crate) fn gradient_gap(it: &Iterate, radius: f64, n: usize) -> f64 {
    let slack = 10.0 * it.residual + 1e-14 * n as f64;
    (it.grad_norm() + slack) * (radius + it.norm()) + 64.0 * n as f64 * f64::EPSILON
}

pub(crate) struct FastOutcome {
    pub(crate) best: Iterate,
    pub(crate) iterations: usize,
}

/// Quasi-Newton descent (BFGS with Armijo backtracking) from `z0`.
pub(crate) fn bfgs(obj: &mut Objective, z0: Vec<f64>, max_iterations: usize, gtol: f64) -> FastOutcome {
    let d = obj.dim();
    let mut z = z0;
    let mut f = obj.value(&z);
    let (mut g, mut residual) = obj.gradient(&z);
    let mut h = DMatrix::<f64>::identity(d, d);
    let mut iterations = 0;
    let mut first = true;
    while iterations < max_iterations && norm(&g) > gtol {
        iterations += 1;
        let gv = DVector::from_column_slice(&g);
        let mut dir: Vec<f64> = (-&h * &gv).iter().copied().collect();
        let mut slope = dot(&g, &dir);
        if slope >= 0.0 {
            // Lost descent: restart from steepest descent.
            h = DMatrix::identity(d, d);
            dir = g.iter().map(|v| -v).collect();
            slope = dot(&g, &dir);
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = z.iter().zip(&dir).map(|(a, b)| a + t * b).collect();
            let ft = obj.value(&trial);
            if ft <= f + 1e-4 * t * slope {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((znew, fnew)) = accepted else {
            break;
        };
        let (gnew, rnew) = obj.gradient(&znew);
        let s: Vec<f64> = znew.iter().zip(&z).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy > 1e-300 {
            let sv = DVector::from_column_slice(&s);
            let yvv = DVector::from_column_slice(&yv);
            if first {
                h *= sy / dot(&yv, &yv);
                first = false;
            }
            let rho = 1.0 / sy;
            let hy = &h * &yvv;
            let yhy = yvv.dot(&hy);
            // H ← (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ, expanded
            h += (&sv * sv.transpose()) * (rho * rho * yhy + rho);
            h -= (&hy * sv.transpose() + &sv * hy.transpose()) * rho;
        }
        let stalled = f - fnew <= 4.0 * f64::EPSILON * f.abs().max(1.0) && norm(&s) <= 1e-14 * (1.0 + norm(&z));
        z = znew;
        f = fnew;
        g = gnew;
        residual = rnew;
        if stalled {
            break;
        }
    }
    FastOutcome { best: Iterate { z, value: f, grad: g, residual }, iterations }
}

pub(crate) struct EllipsoidOutcome {
    pub(crate) best: Option<Iterate>,
    pub(crate) iterations: usize,
    /// `ε` with `φ(best) - min_B φ ≤ ε (max_B φ - min_B φ)`.
    pub(crate) ratio: f64,
}

/// Central-cut ellipsoid method on the ball `‖z‖ ≤ radius`, starting from the
/// ball of radius `start_radius` around `center` (which must contain it).
/// `target` is the ratio at which to stop.
pub(crate) fn ellipsoid(
    obj: &mut Objective,
    center: Vec<f64>,
    start_radius: f64,
    radius: f64,
    max_iterations: usize,
    target: f64,
) -> EllipsoidOutcome {
    let d = obj.dim();
    let mut best: Option<Iterate> = None;
    let mut c = center;
    let mut iterations = 0;
    if d == 1 {
        // Bisection on an interval; the "ellipsoid" is [lo, hi].
        let (mut lo, mut hi) = (c[0] - start_radius, c[0] + start_radius);
        let mut ratio = (hi - lo) / (2.0 * radius);
        while iterations < max_iterations && ratio > target {
            iterations += 1;
            let mid = 0.5 * (lo + hi);
            if mid.abs() > radius {
                if mid > 0.0 {
                    hi = mid
                } else {
                    lo = mid
                }
            } else {
                let z = vec![mid];
                let value = obj.value(&z);
                let (grad, residual) = obj.gradient(&z);
                let slope = grad[0];
                if best.as_ref().is_none_or(|b| value < b.value) {
                    best = Some(Iterate { z, value, grad, residual });
                }
                if slope == 0.0 {
                    break;
                } else if slope > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            ratio = (hi - lo) / (2.0 * radius);
        }
        return EllipsoidOutcome { best, iterations, ratio };
    }
    let df = d as f64;
    let mut q = DMatrix::<f64>::identity(d, d) * (start_radius * start_radius);
    let mut log_det = 2.0 * df * start_radius.ln();
    let shrink = df * (df * df / (df * df - 1.0)).ln() + (1.0 - 2.0 / (df + 1.0)).ln();
    let ratio_of = |log_det: f64| (log_det / (2.0 * df)).exp() / radius;
    while iterations < max_iterations && ratio_of(log_det) > target {
        iterations += 1;
        let cn = norm(&c);
        let a: Vec<f64> = if cn > radius {
            c.iter().map(|v| v / cn).collect()
        } else {
            let value = obj.value(&c);
            let (grad, residual) = obj.gradient(&c);
            let a = grad.clone();
            if best.as_ref().is_none_or(|b| value < b.value) {
                best = Some(Iterate { z: c.clone(), value, grad, residual });
            }
            a
        };
        let av = DVector::from_column_slice(&a);
        let qa = &q * &av;
        let aqa = av.dot(&qa);
        if !(aqa > 0.0) {
            break;
        }
        let at = qa / aqa.sqrt();
        for (ci, ai) in c.iter_mut().zip(at.iter()) {
            *ci -= ai / (df + 1.0);
        }
        q = (&q - (&at * at.transpose()) * (2.0 / (df + 1.0))) * (df * df / (df * df - 1.0));
        q = (&q + q.transpose()) * 0.5;
        log_det += shrink;
    }
    EllipsoidOutcome { best, iterations, ratio: ratio_of(log_det) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::{build_multilinear, NonnegativeMatrix};

    #[test]
    fn helmert_basis_is_orthonormal() {
        let p = build_multilinear(&NonnegativeMatrix::identity(5)).unwrap();
        let obj = Objective::new(&p);
        for k in 0..4 {
            let mut e = vec![0.0; 4];
            e[k] = 1.0;
            let y = obj.lift(&e);
            assert!(y.iter().sum::<f64>().abs() < 1e-15);
            assert!((norm(&y) - 1.0).abs() < 1e-15);
            let back = obj.reduce(&y);
            for (a, b) in back.iter().zip(&e) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bfgs_finds_balanced_point() {
        let a = NonnegativeMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let p = build_multilinear(&a).unwrap();
        let mut obj = Objective::new(&p);
        let out = bfgs(&mut obj, vec![0.0], 200, 1e-13);
        assert!(out.best.grad_norm() < 1e-12);
        // (4x + y)(x + y) on xy = 1: minimum 5 + 2·√4 = 9 at x² = 1/4
        assert!((out.best.value.exp() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn ellipsoid_matches_bfgs() {
        let a = NonnegativeMatrix::from_rows(&[
            vec![1.0, 2.0, 0.5],
            vec![0.3, 1.0, 1.0],
            vec![2.0, 0.1, 1.0],
        ])
        .unwrap();
        let p = build_multilinear(&a).unwrap();
        let mut obj = Objective::new(&p);
        let fast = bfgs(&mut obj, vec![0.0, 0.0], 200, 1e-13).best.value;
        let slow = ellipsoid(&mut obj, vec![0.0, 0.0], 5.0, 5.0, 5000, 1e-10);
        assert!(slow.ratio <= 1e-10);
        assert!((slow.best.unwrap().value - fast).abs() < 1e-8);
    }
}
