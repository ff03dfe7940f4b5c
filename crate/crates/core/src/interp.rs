//! Univariate interpolation on Chebyshev nodes.
//!
//! Every coefficient the library reads off a polynomial oracle (partial
//! derivatives, support degrees, restriction polynomials) goes through this
//! module: sample the univariate restriction at `degree + 1` Chebyshev points
//! of the first kind, recover the Chebyshev series exactly (up to rounding),
//! and convert to a Taylor expansion around whatever point the caller needs.

use std::f64::consts::PI;

/// Chebyshev interpolant of a univariate polynomial on `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct ChebyshevFit {
    /// Series coefficients in `T_k(u)`, `u = (t - center) / half_width`.
    coeffs: Vec<f64>,
    center: f64,
    half_width: f64,
    /// Largest |sample|, a proxy for the rounding floor of the fit.
    sample_scale: f64,
}

/// `count` Chebyshev points of the first kind mapped to `[lo, hi]`.
pub fn chebyshev_nodes(count: usize, lo: f64, hi: f64) -> Vec<f64> {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    (0..count)
        .map(|j| c + h * (PI * (j as f64 + 0.5) / count as f64).cos())
        .collect()
}

impl ChebyshevFit {
    /// Interpolate `f`, assumed polynomial of degree at most `degree`.
    pub fn new(degree: usize, lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> Self {
        let nodes = chebyshev_nodes(degree + 1, lo, hi);
        let values: Vec<f64> = nodes.iter().map(|&t| f(t)).collect();
        Self::from_values(&values, lo, hi)
    }

    /// Build from samples taken at `chebyshev_nodes(values.len(), lo, hi)`.
    pub fn from_values(values: &[f64], lo: f64, hi: f64) -> Self {
        assert!(hi > lo, "empty interpolation interval");
        let n = values.len();
        let mut coeffs = vec![0.0; n];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, v) in values.iter().enumerate() {
                let theta = PI * (j as f64 + 0.5) / n as f64;
                acc += v * (k as f64 * theta).cos();
            }
            *c = 2.0 * acc / n as f64;
        }
        if n > 0 {
            coeffs[0] *= 0.5;
        }
        let sample_scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        ChebyshevFit {
            coeffs,
            center: 0.5 * (lo + hi),
            half_width: 0.5 * (hi - lo),
            sample_scale,
        }
    }

    pub fn chebyshev_coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn sample_scale(&self) -> f64 {
        self.sample_scale
    }

    pub fn eval(&self, t: f64) -> f64 {
        let u = (t - self.center) / self.half_width;
        // Clenshaw
        let (mut b1, mut b2) = (0.0, 0.0);
        for &a in self.coeffs.iter().skip(1).rev() {
            let b0 = a + 2.0 * u * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs.first().copied().unwrap_or(0.0) + u * b1 - b2
    }

    /// Coefficients `c_m` with `f(t) = Σ c_m (t - origin)^m`.
    pub fn taylor(&self, origin: f64) -> Vec<f64> {
        let n = self.coeffs.len();
        if n == 0 {
            return Vec::new();
        }
        let u0 = (origin - self.center) / self.half_width;
        // Clenshaw recurrence carried out on polynomials in w = u - u0.
        let mut b1 = vec![0.0; n];
        let mut b2 = vec![0.0; n];
        for k in (1..n).rev() {
            let mut b0 = vec![0.0; n];
            b0[0] += self.coeffs[k];
            for m in 0..n {
                let v = b1[m];
                if v != 0.0 {
                    b0[m] += 2.0 * u0 * v;
                    if m + 1 < n {
                        b0[m + 1] += 2.0 * v;
                    }
                }
                b0[m] -= b2[m];
            }
            b2 = std::mem::replace(&mut b1, b0);
        }
        let mut out = vec![0.0; n];
        out[0] = self.coeffs[0];
        for m in 0..n {
            out[m] += u0 * b1[m] - b2[m];
            if m + 1 < n {
                out[m + 1] += b1[m];
            }
        }
        let mut scale = 1.0;
        for c in out.iter_mut() {
            *c /= scale;
            scale *= self.half_width;
        }
        out
    }

    /// Monomial coefficients around zero.
    pub fn monomial(&self) -> Vec<f64> {
        self.taylor(0.0)
    }

    /// Derivative at `t`.
    pub fn derivative_at(&self, t: f64) -> f64 {
        self.taylor(t).get(1).copied().unwrap_or(0.0)
    }

    /// Index of the last Chebyshev coefficient above `rel_tol` times the largest one;
    /// `None` when every coefficient is at the rounding floor (zero polynomial).
    pub fn detected_degree(&self, rel_tol: f64) -> Option<usize> {
        let max = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let floor = 64.0 * f64::EPSILON * self.sample_scale * self.coeffs.len() as f64;
        if max <= floor || max == 0.0 {
            return None;
        }
        let thresh = (rel_tol * max).max(floor);
        self.coeffs.iter().rposition(|c| c.abs() > thresh)
    }
}

/// Coefficients of `Σ roots` style expansions: monomial coefficients of `∏ (a_i t + b_i)`.
pub fn expand_linear_factors(factors: &[(f64, f64)]) -> Vec<f64> {
    let mut poly = vec![1.0];
    for &(a, b) in factors {
        let mut next = vec![0.0; poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k] += b * c;
            next[k + 1] += a * c;
        }
        poly = next;
    }
    poly
}
