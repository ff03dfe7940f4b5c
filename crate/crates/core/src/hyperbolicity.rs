//! Restriction roots, sampled POS-hyperbolicity checks, Newton inequalities,
//! the `d₁` lower bound and the Alexandrov–Fenchel check.
//!
//! Every verdict here is evidence from finitely many samples, never a proof.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::g;
use crate::error::{Error, Result};
use crate::interp::ChebyshevFit;
use crate::numeric::binomial;
use crate::polynomials::{mixed_form, PolynomialOracle};

/// Imaginary parts up to this fraction of `1 + max|root|` count as real.
pub const ROOT_IM_TOL: f64 = 1e-7;
/// Roots above `-ROOT_TOL (1 + max|root|)` count as nonnegative.
pub const ROOT_TOL: f64 = 1e-7;
/// Roots below `RANK_TOL (1 + max|root|)` in modulus count as zero.
pub const RANK_TOL: f64 = 1e-8;
/// Relative accuracy assumed for interpolated coefficients when grouping
/// the computed roots into clusters of a multiple root.
const CLUSTER_EPS: f64 = 1e-12;
/// Scaled restriction coefficients below `COEF_TOL · max` are treated as zero
/// when trimming the degree and deflating zero roots. Interpolation noise is
/// far below this, while a root near zero of multiplicity m leaves a constant
/// term of order |root|^m that must survive.
const COEF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootReport {
    /// `c_j` with `p(X - t e) = Σ c_j t^j`, trailing zeros of the detected
    /// degree trimmed.
    pub coefficients: Vec<f64>,
    #[serde(serialize_with = "serialize_complex")]
    pub roots: Vec<Complex64>,
    pub max_imag: f64,
    pub all_real: bool,
    pub all_nonneg: bool,
    /// Half-width of the interpolation interval; `c_j h^j` are the
    /// scale-free coefficients.
    pub scale: f64,
}

fn serialize_complex<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

impl RootReport {
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// `c_j h^j`.
    pub fn scaled_coefficients(&self) -> Vec<f64> {
        let mut f = 1.0;
        self.coefficients
            .iter()
            .map(|c| {
                let v = c * f;
                f *= self.scale;
                v
            })
            .collect()
    }

    /// Roots of modulus above `RANK_TOL (1 + max|root|)`.
    pub fn nonzero_roots(&self) -> usize {
        let max = self.roots.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        self.roots.iter().filter(|z| z.norm() > RANK_TOL * (1.0 + max)).count()
    }
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Diagonal similarity that equalizes row and column norms.
fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    loop {
        let mut done = true;
        for i in 0..n {
            let c: f64 = (0..n).filter(|&j| j != i).map(|j| m[(j, i)].abs()).sum();
            let r: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut c2, mut r2) = (c, r);
            while c2 < r2 / radix {
                f *= radix;
                c2 *= radix;
                r2 /= radix;
            }
            while c2 >= r2 * radix {
                f /= radix;
                c2 /= radix;
                r2 *= radix;
            }
            if (c2 + r2) < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Roots of `Σ a_j s^j` (`a` has nonzero leading and constant terms).
fn polynomial_roots(a: &[f64]) -> Vec<Complex64> {
    let d = a.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        return vec![Complex64::new(-a[0] / a[1], 0.0)];
    }
    let lead = a[d];
    let mut comp = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        comp[(0, j)] = -a[d - 1 - j] / lead;
    }
    for i in 1..d {
        comp[(i, i - 1)] = 1.0;
    }
    balance(&mut comp);
    let eig: Vec<Complex64> = comp.complex_eigenvalues().iter().copied().collect();
    let mut z = cluster(&eig, a);
    let simple: Vec<bool> = (0..z.len()).map(|k| z.iter().filter(|&&w| w == z[k]).count() == 1).collect();
    aberth(a, &mut z, &simple);
    z
}

/// Aberth–Ehrlich iterations on the roots flagged in `active`; a root only
/// moves when its residual decreases. Cluster means stay fixed, since
/// refining their members separately would break the conjugate symmetry.
fn aberth(a: &[f64], z: &mut [Complex64], active: &[bool]) {
    let d = z.len();
    for _ in 0..20 {
        let mut moved = false;
        for k in (0..d).filter(|&k| active[k]) {
            let (p, dp) = horner(a, z[k]);
            if p.norm() == 0.0 || dp.norm() == 0.0 {
                continue;
            }
            let w = p / dp;
            let s: Complex64 = (0..d)
                .filter(|&j| j != k)
                .map(|j| z[k] - z[j])
                .filter(|diff| diff.norm() > 0.0)
                .map(|diff| diff.inv())
                .sum();
            let denom = Complex64::new(1.0, 0.0) - w * s;
            if denom.norm() == 0.0 {
                continue;
            }
            let cand = z[k] - w / denom;
            if !cand.is_finite() {
                continue;
            }
            if horner(a, cand).0.norm() < p.norm() {
                if (cand - z[k]).norm() > 1e-15 * (1.0 + z[k].norm()) {
                    moved = true;
                }
                z[k] = cand;
            }
        }
        if !moved {
            break;
        }
    }
}

/// Replace each group of roots that a multiple root was split into by the
/// group mean, which is well conditioned even when the members are not.
///
/// An `m`-fold root moves by about `(ε ‖a‖ / |a_d|)^{1/m}` under a relative
/// coefficient perturbation `ε`; a group is accepted when its radius is
/// within a small multiple of that. Larger groups are tried first.
fn cluster(roots: &[Complex64], a: &[f64]) -> Vec<Complex64> {
    let norm = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lead = a.last().map_or(1.0, |v| v.abs());
    let spread = CLUSTER_EPS * norm / lead;
    let mut left: Vec<Complex64> = roots.to_vec();
    left.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let mut out = Vec::with_capacity(roots.len());
    while !left.is_empty() {
        let z0 = left[0];
        let mut order: Vec<usize> = (0..left.len()).collect();
        order.sort_by(|&i, &j| (left[i] - z0).norm().total_cmp(&(left[j] - z0).norm()));
        let mut take = 1;
        for m in (2..=left.len()).rev() {
            let group: Vec<Complex64> = order[..m].iter().map(|&i| left[i]).collect();
            let c = group.iter().sum::<Complex64>() / m as f64;
            let radius = group.iter().fold(0.0f64, |r, z| r.max((z - c).norm()));
            // a split multiple root shows up with imaginary parts; all-real groups stay simple
            if group.iter().any(|z| z.im != 0.0) && radius <= 8.0 * spread.powf(1.0 / m as f64) * c.norm().max(1.0) {
                take = m;
                break;
            }
        }
        let mut members: Vec<usize> = order[..take].to_vec();
        let c = members.iter().map(|&i| left[i]).sum::<Complex64>() / take as f64;
        out.extend(std::iter::repeat_n(c, take));
        members.sort_unstable_by(|x, y| y.cmp(x));
        for i in members {
            left.remove(i);
        }
    }
    out
}

/// Coefficients and roots of `t ↦ p(X - t e)`.
pub fn restriction_roots(p: &PolynomialOracle, x: &[f64], e: &[f64]) -> Result<RootReport> {
    let n = p.num_vars();
    if x.len() != n || e.len() != n {
        return Err(Error::invalid(format!("point and direction must have {n} entries")));
    }
    if x.iter().chain(e).any(|v| !v.is_finite()) {
        return Err(Error::invalid("point and direction must be finite"));
    }
    let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let emax = e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if emax == 0.0 {
        return Err(Error::invalid("direction must be nonzero"));
    }
    let h = if xmax == 0.0 { 1.0 } else { 2.0 * xmax / emax };
    let mut point = vec![0.0; n];
    let fit = ChebyshevFit::new(p.degree(), -h, h, |t| {
        for ((pi, xi), ei) in point.iter_mut().zip(x).zip(e) {
            *pi = xi - t * ei;
        }
        p.eval(&point)
    });
    let Some(_) = fit.detected_degree(0.0) else {
        return Err(Error::ZeroPolynomial("restriction vanishes identically".into()));
    };
    let c = fit.monomial();
    let mut scaled = Vec::with_capacity(c.len());
    let mut f = 1.0;
    for v in &c {
        scaled.push(v * f);
        f *= h;
    }
    let max = scaled.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let big = |v: &f64| v.abs() > COEF_TOL * max;
    let degree = scaled.iter().rposition(big).expect("nonzero restriction");
    let zeros = scaled.iter().position(big).expect("nonzero restriction");
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let core: Vec<f64> = scaled[zeros..=degree].to_vec();
    roots.extend(polynomial_roots(&core).into_iter().map(|z| z * h));
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let rmax = roots.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let max_imag = roots.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    let all_real = max_imag <= ROOT_IM_TOL * (1.0 + rmax);
    let all_nonneg = all_real && roots.iter().all(|z| z.re >= -ROOT_TOL * (1.0 + rmax));
    let mut coefficients = c;
    coefficients.truncate(degree + 1);
    for (j, v) in coefficients.iter_mut().enumerate().take(zeros) {
        debug_assert!(j < zeros);
        *v = 0.0;
    }
    Ok(RootReport { coefficients, roots, max_imag, all_real, all_nonneg, scale: h })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonReport {
    pub nis_hold: bool,
    /// `None` when some coefficient is negative (the weak form does not apply).
    pub wnis_hold: Option<bool>,
    pub first_violation: Option<usize>,
    pub first_weak_violation: Option<usize>,
}

/// Newton's inequalities `d_i² ≥ d_{i-1} d_{i+1} C(n,i)² / (C(n,i-1) C(n,i+1))` and
/// the weak form `d_i d₀^{i-1} ≤ (d₁/n)^i C(n,i)`, with relative tolerance `rel`.
pub fn newton_inequalities_with_tol(d: &[f64], rel: f64) -> NewtonReport {
    let n = d.len().saturating_sub(1);
    let close = |lhs: f64, rhs: f64| lhs >= rhs - rel * lhs.abs().max(rhs.abs());
    let first_violation = (1..n).find(|&i| {
        let k = binomial(n, i).powi(2) / (binomial(n, i - 1) * binomial(n, i + 1));
        !close(d[i] * d[i], d[i - 1] * d[i + 1] * k)
    });
    let (wnis_hold, first_weak_violation) = if d.iter().any(|&v| v < 0.0) {
        (None, None)
    } else {
        let v = (2..=n).find(|&i| !close((d[1] / n as f64).powi(i as i32) * binomial(n, i), d[i] * d[0].powi(i as i32 - 1)));
        (Some(v.is_none()), v)
    };
    NewtonReport { nis_hold: first_violation.is_none(), wnis_hold, first_violation, first_weak_violation }
}

pub fn newton_inequalities(d: &[f64]) -> NewtonReport {
    newton_inequalities_with_tol(d, 1e-10)
}

/// `inf_{t > 0} R(t)/t` for nonnegative coefficients, where `R(t)/t` is convex in `log t`.
pub fn ratio_infimum(d: &[f64]) -> Result<f64> {
    if d.iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::invalid("coefficients must be nonnegative"));
    }
    let f = |u: f64| -> f64 { d.iter().enumerate().map(|(k, c)| c * ((k as f64 - 1.0) * u).exp()).sum() };
    let (mut lo, mut hi) = (-60.0f64, 60.0f64);
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..300 {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = f(b);
        }
    }
    let mut best = fa.min(fb);
    // limits at the ends of the range
    if d.len() > 1 && d[0] == 0.0 {
        best = best.min(f(-700.0).max(d[1]));
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma29Report {
    /// The weak Newton inequalities hold, so the bound applies.
    pub applicable: bool,
    pub holds: bool,
    pub d1: f64,
    /// `C · g(n)`.
    pub bound: f64,
}

/// `d₁ ≥ C ((n-1)/n)^{n-1}` whenever the weak Newton inequalities hold and
/// `R(t) ≥ C t` on `t ≥ 0`.
pub fn lemma29_bound(d: &[f64], c: f64) -> Result<Lemma29Report> {
    if d.len() < 2 {
        return Err(Error::invalid("need a polynomial of degree at least 1"));
    }
    let n = d.len() - 1;
    let bound = c * g(n as f64)?;
    let applicable = newton_inequalities(d).wnis_hold == Some(true);
    let holds = d[1] >= bound - 1e-10 * bound.abs().max(d[1].abs());
    Ok(Lemma29Report { applicable, holds, d1: d[1], bound })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Counterexample {
    NonpositiveAtOnes { value: f64 },
    NotRealRooted { point: Vec<f64>, max_imag: f64 },
    NegativeRoot { point: Vec<f64>, root: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicityVerdict {
    pub pass: bool,
    pub trials: usize,
    pub seed: u64,
    pub value_at_ones: f64,
    pub counterexample: Option<Counterexample>,
    /// Real-rooted restrictions whose coefficients violate Newton's inequalities.
    pub newton_violations: usize,
    pub real_rooted_restrictions: usize,
}

enum Sample {
    Ok { real_rooted: bool, newton_ok: bool },
    Fail(Counterexample, bool),
}

/// Sampled POS-hyperbolicity along `e = (1, ..., 1)`.
///
/// `trials` Gaussian points test real-rootedness and `trials` nonnegative
/// points test that the roots are nonnegative. Sample `i` draws from the seed
/// `seed ⊕ i`, so the verdict does not depend on the thread count.
pub fn check_pos_hyperbolic(p: &PolynomialOracle, trials: usize, seed: u64) -> Result<HyperbolicityVerdict> {
    let n = p.num_vars();
    let ones = vec![1.0; n];
    let value = p.at_ones();
    if !(value > 0.0) {
        return Ok(HyperbolicityVerdict {
            pass: false,
            trials,
            seed,
            value_at_ones: value,
            counterexample: Some(Counterexample::NonpositiveAtOnes { value }),
            newton_violations: 0,
            real_rooted_restrictions: 0,
        });
    }
    let samples: Vec<Sample> = (0..2 * trials)
        .into_par_iter()
        .map(|i| -> Result<Sample> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i as u64);
            let nonneg = i >= trials;
            let x: Vec<f64> = if nonneg {
                (0..n).map(|_| rng.random::<f64>()).collect()
            } else {
                (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
            };
            let r = restriction_roots(p, &x, &ones)?;
            let newton_ok = !r.all_real || newton_inequalities_with_tol(&r.scaled_coefficients(), 1e-7).nis_hold;
            if !r.all_real {
                return Ok(Sample::Fail(Counterexample::NotRealRooted { point: x, max_imag: r.max_imag }, newton_ok));
            }
            if nonneg && !r.all_nonneg {
                let root = r.roots.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
                return Ok(Sample::Fail(Counterexample::NegativeRoot { point: x, root }, newton_ok));
            }
            Ok(Sample::Ok { real_rooted: true, newton_ok })
        })
        .collect::<Result<_>>()?;
    let mut counterexample = None;
    let (mut violations, mut real) = (0, 0);
    for s in samples {
        match s {
            Sample::Ok { real_rooted, newton_ok } => {
                real += real_rooted as usize;
                violations += !newton_ok as usize;
            }
            Sample::Fail(c, newton_ok) => {
                if matches!(c, Counterexample::NegativeRoot { .. }) {
                    real += 1;
                    violations += !newton_ok as usize;
                }
                counterexample.get_or_insert(c);
            }
        }
    }
    Ok(HyperbolicityVerdict {
        pass: counterexample.is_none(),
        trials,
        seed,
        value_at_ones: value,
        counterexample,
        newton_violations: violations,
        real_rooted_restrictions: real,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonCheck {
    pub pass: bool,
    pub trials: usize,
    pub seed: u64,
    pub real_rooted: usize,
    pub violations: usize,
    /// First point whose real-rooted restriction violates Newton's inequalities.
    pub counterexample: Option<Vec<f64>>,
}

/// Newton's inequalities on the restrictions `t ↦ p(X - t·1)` at `trials`
/// Gaussian points; restrictions that are not real-rooted are skipped.
pub fn newton_check(p: &PolynomialOracle, trials: usize, seed: u64) -> Result<NewtonCheck> {
    let n = p.num_vars();
    let ones = vec![1.0; n];
    let samples: Vec<(bool, bool, Vec<f64>)> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i as u64);
            let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let r = restriction_roots(p, &x, &ones)?;
            let ok = !r.all_real || newton_inequalities_with_tol(&r.scaled_coefficients(), 1e-7).nis_hold;
            Ok((r.all_real, ok, x))
        })
        .collect::<Result<_>>()?;
    let real_rooted = samples.iter().filter(|s| s.0).count();
    let violations = samples.iter().filter(|s| !s.1).count();
    let counterexample = samples.into_iter().find(|s| !s.1).map(|s| s.2);
    Ok(NewtonCheck { pass: violations == 0, trials, seed, real_rooted, violations, counterexample })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AfVerdict {
    pub pass: bool,
    pub trials: usize,
    pub seed: u64,
    /// Smallest `M(X₁,X₂,…)² / (M(X₁,X₁,…) M(X₂,X₂,…))` seen.
    pub worst_ratio: f64,
    pub counterexample: Option<Vec<Vec<f64>>>,
}

/// Sampled Alexandrov–Fenchel inequality
/// `M(X₁,X₂,X₃,…)² ≥ M(X₁,X₁,X₃,…) M(X₂,X₂,X₃,…)` over nonnegative `X_i`.
pub fn af_inequality_check(p: &PolynomialOracle, trials: usize, seed: u64) -> Result<AfVerdict> {
    p.ensure_square("af_inequality_check")?;
    let n = p.num_vars();
    if n < 2 {
        return Err(Error::invalid("the AF inequality needs at least two variables"));
    }
    let results: Vec<(f64, bool, Vec<Vec<f64>>)> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i as u64);
            let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect();
            let mut v12 = xs.clone();
            let m12 = mixed_form(p, &v12)?;
            v12[1] = xs[0].clone();
            let m11 = mixed_form(p, &v12)?;
            v12[0] = xs[1].clone();
            v12[1] = xs[1].clone();
            let m22 = mixed_form(p, &v12)?;
            let lhs = m12 * m12;
            let rhs = m11 * m22;
            let ok = lhs >= rhs - 1e-9 * lhs.abs().max(rhs.abs()) - 1e-300;
            let ratio = if rhs > 0.0 { lhs / rhs } else { f64::INFINITY };
            Ok((ratio, ok, xs))
        })
        .collect::<Result<_>>()?;
    let worst_ratio = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let counterexample = results.into_iter().find(|r| !r.1).map(|r| r.2);
    Ok(AfVerdict { pass: counterexample.is_none(), trials, seed, worst_ratio, counterexample })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationVerdict {
    pub pass: bool,
    /// Coefficients of `t ↦ p(tZ + Y)`.
    pub coefficients: Vec<f64>,
    pub coefficients_nonneg: bool,
    pub roots_real_nonpositive: bool,
    #[serde(serialize_with = "serialize_complex")]
    pub roots: Vec<Complex64>,
}

/// `p(tZ + Y)` splits into linear factors `a_i t + b_i` with `a_i, b_i ≥ 0`:
/// nonnegative coefficients and real nonpositive roots.
pub fn factorization_check_prop_c1(p: &PolynomialOracle, z: &[f64], y: &[f64]) -> Result<FactorizationVerdict> {
    if z.iter().chain(y).any(|&v| v < 0.0) {
        return Err(Error::invalid("Z and Y must be nonnegative"));
    }
    if z.iter().zip(y).any(|(a, b)| !(a + b > 0.0)) {
        return Err(Error::invalid("Z + Y must be strictly positive"));
    }
    let neg_z: Vec<f64> = z.iter().map(|v| -v).collect();
    let r = restriction_roots(p, y, &neg_z)?;
    let max = r.coefficients.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let coefficients_nonneg = r.coefficients.iter().all(|&c| c >= -1e-9 * max);
    let rmax = r.roots.iter().fold(0.0f64, |m, w| m.max(w.norm()));
    let roots_real_nonpositive = r.all_real && r.roots.iter().all(|w| w.re <= ROOT_TOL * (1.0 + rmax));
    Ok(FactorizationVerdict {
        pass: coefficients_nonneg && roots_real_nonpositive,
        coefficients: r.coefficients,
        coefficients_nonneg,
        roots_real_nonpositive,
        roots: r.roots,
    })
}
