use super::{Polynomial, PolynomialOracle, Provenance};
use crate::error::{Error, Result};
use crate::interp::ChebyshevFit;

/// Maximum `2^k (n + 1)` base evaluations per derivative-oracle evaluation.
pub const DERIVATIVE_BUDGET: f64 = 1e7;

/// Interval `[0, 2‖y‖∞]` for interpolation in a direction orthogonal to `y`.
fn interval_for(y: &[f64]) -> f64 {
    let m = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m > 0.0 {
        2.0 * m
    } else {
        1.0
    }
}

/// Rounding floor of the `t^power` coefficient of a fit on `[0, len]`.
fn floor(power: usize, degree: usize, scale: f64, len: f64) -> f64 {
    16.0 * f64::EPSILON * ((degree + 1) * (degree + 1)) as f64 * scale / len.powi(power as i32)
}

/// Coefficient of `t^k` in the degree-`degree` polynomial `f` on `[0, len]`;
/// `f` returns a value and the magnitude its rounding error scales with.
///
/// With badly scaled points the terms above `k` can dwarf the target on the
/// initial interval; the interval then shrinks to where `|c_j| t^j` balances
/// the lower terms and the fit is repeated. A second fit on half the interval
/// must agree, otherwise the base evaluations are too inaccurate at this
/// point and the result is NaN. Coefficients at the rounding floor snap to 0.
fn low_coefficient(degree: usize, k: usize, mut len: f64, mut f: impl FnMut(f64) -> (f64, f64)) -> f64 {
    let mut fit_on = |len: f64| {
        let mut scale = 0.0f64;
        let fit = ChebyshevFit::new(degree, 0.0, len, |t| {
            let (v, m) = f(t);
            scale = scale.max(m);
            v
        });
        (fit.monomial(), scale)
    };
    let (mut c, mut scale) = fit_on(len);
    for _ in 0..4 {
        let low = |j: usize| c.get(j).map_or(0.0, |v| v.abs());
        let mut target = len;
        for (j, cj) in c.iter().enumerate().skip(k + 1) {
            if *cj == 0.0 {
                continue;
            }
            let by_const = (low(0) / cj.abs()).powf(1.0 / j as f64);
            let by_target = (low(k) / cj.abs()).powf(1.0 / (j - k) as f64);
            let l = by_const.max(by_target);
            if l > 0.0 && l.is_finite() {
                target = target.min(l);
            }
        }
        if target >= len / 4.0 {
            break;
        }
        len = target;
        (c, scale) = fit_on(len);
    }
    let (check, check_scale) = fit_on(len / 2.0);
    let ck = c.get(k).copied().unwrap_or(0.0);
    let ck2 = check.get(k).copied().unwrap_or(0.0);
    let fl = floor(k, degree, scale, len).max(floor(k, degree, check_scale, len / 2.0));
    if (ck - ck2).abs() > 1e-7 * ck.abs() + 64.0 * fl {
        return f64::NAN;
    }
    if ck.abs() <= fl {
        0.0
    } else {
        ck
    }
}

/// `p_{x_i}(x_{≠i}) = ∂/∂x_i p` evaluated at `x_i = 0`.
#[derive(Debug, Clone)]
struct PartialAtZero {
    base: PolynomialOracle,
    index: usize,
}

impl Polynomial for PartialAtZero {
    fn num_vars(&self) -> usize {
        self.base.num_vars() - 1
    }

    fn degree(&self) -> usize {
        self.base.degree() - 1
    }

    fn eval(&self, y: &[f64]) -> f64 {
        let mut x = Vec::with_capacity(y.len() + 1);
        x.extend_from_slice(&y[..self.index]);
        x.push(0.0);
        x.extend_from_slice(&y[self.index..]);
        let degree = self.base.degree();
        low_coefficient(degree, 1, interval_for(y), |t| {
            x[self.index] = t;
            let v = self.base.eval(&x);
            (v, v.abs())
        })
    }

    fn provenance(&self) -> Provenance {
        Provenance::Derivative
    }
}

/// Partial derivative at zero with respect to variable `i` (0-based).
///
/// Sparse inputs are differentiated symbolically; everything else gets an
/// oracle that interpolates `t ↦ p(x with x_i := t)` at `n + 1` nodes per call.
pub fn partial_at_zero(p: &PolynomialOracle, i: usize) -> Result<PolynomialOracle> {
    if i >= p.num_vars() {
        return Err(Error::invalid(format!(
            "variable index {i} out of range for {} variables",
            p.num_vars()
        )));
    }
    if p.degree() == 0 {
        return Err(Error::invalid("cannot differentiate a constant"));
    }
    if let Some(s) = p.as_sparse() {
        return Ok(s.partial_at_zero(i).oracle());
    }
    Ok(PolynomialOracle::new(PartialAtZero { base: p.clone(), index: i }))
}

/// `∂^k / ∂x_{v_1} ⋯ ∂x_{v_k} p` evaluated with those variables set to zero.
#[derive(Debug, Clone)]
struct MixedDerivative {
    base: PolynomialOracle,
    /// Differentiated variables, sorted.
    vars: Vec<usize>,
    /// Remaining variables, sorted; oracle inputs map onto these in order.
    rest: Vec<usize>,
}

impl Polynomial for MixedDerivative {
    fn num_vars(&self) -> usize {
        self.rest.len()
    }

    fn degree(&self) -> usize {
        self.base.degree() - self.vars.len()
    }

    fn eval(&self, y: &[f64]) -> f64 {
        let k = self.vars.len();
        let degree = self.base.degree();
        let mut x = vec![0.0; self.base.num_vars()];
        for (&slot, &v) in self.rest.iter().zip(y) {
            x[slot] = v;
        }
        // F(ε) = 2^{-k} Σ_b (∏ b_i) p(ε Σ b_i e_{v_i} + y); its ε^k coefficient is the derivative.
        low_coefficient(degree, k, interval_for(y), |eps| {
            let mut acc = 0.0;
            let mut max_abs = 0.0f64;
            for mask in 0u64..(1u64 << k) {
                let mut sign = 1.0;
                for (bit, &v) in self.vars.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        x[v] = -eps;
                        sign = -sign;
                    } else {
                        x[v] = eps;
                    }
                }
                let val = self.base.eval(&x);
                max_abs = max_abs.max(val.abs());
                acc += sign * val;
            }
            (acc / (1u64 << k) as f64, max_abs)
        })
    }

    fn provenance(&self) -> Provenance {
        Provenance::Derivative
    }
}

/// `p_k(x_{k+1}, ..., x_n) = ∂^k/∂x_1⋯∂x_k p(0, ..., 0, x_{k+1}, ..., x_n)`.
pub fn derivative_oracle(p: &PolynomialOracle, k: usize) -> Result<PolynomialOracle> {
    let vars: Vec<usize> = (0..k).collect();
    derivative_oracle_over(p, &vars)
}

/// Mixed first derivative at zero over an arbitrary set of variables.
pub fn derivative_oracle_over(p: &PolynomialOracle, vars: &[usize]) -> Result<PolynomialOracle> {
    let n = p.num_vars();
    let mut vars = vars.to_vec();
    vars.sort_unstable();
    vars.dedup();
    if let Some(&bad) = vars.iter().find(|&&v| v >= n) {
        return Err(Error::invalid(format!("variable index {bad} out of range for {n} variables")));
    }
    let k = vars.len();
    if k > p.degree() {
        return Err(Error::invalid(format!(
            "cannot take {k} derivatives of a degree-{} polynomial",
            p.degree()
        )));
    }
    if k == 0 {
        return Ok(p.clone());
    }
    if let Some(s) = p.as_sparse() {
        let mut q = s.clone();
        for &v in vars.iter().rev() {
            q = q.partial_at_zero(v);
        }
        return Ok(q.oracle());
    }
    let calls = 2f64.powi(k as i32) * (p.degree() + 1) as f64;
    if k >= 63 || calls > DERIVATIVE_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "derivative oracle of order {k} needs {calls:.3e} base evaluations per call (cap {DERIVATIVE_BUDGET:e})"
        )));
    }
    let rest = (0..n).filter(|i| !vars.contains(i)).collect();
    Ok(PolynomialOracle::new(MixedDerivative { base: p.clone(), vars, rest }))
}

/// `q(x) = p(β ∘ x) / norm`.
#[derive(Debug, Clone)]
pub struct ScaledOracle {
    base: PolynomialOracle,
    beta: Vec<f64>,
    norm: f64,
}

impl ScaledOracle {
    pub fn new(base: PolynomialOracle, beta: Vec<f64>, norm: f64) -> Result<Self> {
        if beta.len() != base.num_vars() {
            return Err(Error::invalid("scaling vector has the wrong length"));
        }
        if beta.iter().any(|&b| !(b > 0.0 && b.is_finite())) || !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::invalid("scaling must be strictly positive and finite"));
        }
        Ok(ScaledOracle { base, beta, norm })
    }

    fn scale_point(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.beta).map(|(a, b)| a * b).collect()
    }
}

impl Polynomial for ScaledOracle {
    fn num_vars(&self) -> usize {
        self.base.num_vars()
    }

    fn degree(&self) -> usize {
        self.base.degree()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.base.eval(&self.scale_point(x)) / self.norm
    }

    fn provenance(&self) -> Provenance {
        Provenance::Scaled
    }

    fn exact_support_degree(&self, subset: &[bool]) -> Option<usize> {
        self.base.exact_support_degree(subset)
    }

    fn log_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.base.log_gradient(&self.scale_point(x))
    }
}
