//! Small numeric helpers shared across modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

pub fn big_factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap_or_else(BigRational::zero)
}

/// Correctly rounded (half-even) conversion.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let (num, den) = (r.numer(), r.denom());
    if num.is_zero() {
        return 0.0;
    }
    let limit = BigInt::from(1u64 << 53);
    if num.magnitude() <= limit.magnitude() && den <= &limit {
        return num.to_f64().unwrap_or(f64::NAN) / den.to_f64().unwrap_or(f64::NAN);
    }
    let negative = num.sign() == num_bigint::Sign::Minus;
    let (a, b) = (num.magnitude().clone(), den.magnitude().clone());
    // scale so the quotient has 54 or 55 bits
    let shift = 54 - (a.bits() as i64 - b.bits() as i64);
    let (a, b) = if shift >= 0 { (a << shift as u64, b) } else { (a, b << (-shift) as u64) };
    let (mut q, rem) = (&a / &b, &a % &b);
    let mut exp = -shift;
    let mut sticky = !rem.is_zero();
    // keep 53 bits plus one guard bit
    while q.bits() > 54 {
        sticky |= q.bit(0);
        q >>= 1u32;
        exp += 1;
    }
    let guard = q.bit(0);
    q >>= 1u32;
    exp += 1;
    let mut m = q.to_u64().unwrap_or(u64::MAX);
    if guard && (sticky || m & 1 == 1) {
        m += 1;
    }
    if exp < -1021 {
        // subnormal range: rare enough to accept the library rounding
        return r.to_f64().unwrap_or(f64::NAN);
    }
    let v = m as f64 * 2f64.powi(exp.min(1100) as i32);
    if negative { -v } else { v }
}

/// Parse `"p/q"`, an integer, or a plain decimal such as `"0.125"` exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(i));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let ten = BigInt::from(10);
    let scale = exponent - frac_part.len() as i32;
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// Serialize a rational as `"p/q"`, or `"p"` when it is an integer.
pub fn serialize_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

/// Iterate the members of a bitmask subset in increasing order.
pub fn mask_members(mask: u64, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |&i| mask >> i & 1 == 1)
}
