//! Exact rational scalars and small vector helpers.
//!
//! Every real quantity on the exact path is a [`Scalar`], an arbitrary
//! precision rational kept in reduced form with a positive denominator
//! (the invariants of `num_rational::BigRational`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

pub type Scalar = BigRational;

/// Dense row-major matrix of exact scalars.
pub type Matrix = Vec<Vec<Scalar>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseScalarError(pub String);

impl fmt::Display for ParseScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational literal {:?}", self.0)
    }
}

impl std::error::Error for ParseScalarError {}

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn ints(v: &[i64]) -> Vec<Scalar> {
    v.iter().map(|&n| int(n)).collect()
}

pub fn zeros(n: usize) -> Vec<Scalar> {
    vec![Scalar::zero(); n]
}

pub fn unit(n: usize, i: usize) -> Vec<Scalar> {
    let mut v = zeros(n);
    v[i] = Scalar::one();
    v
}

/// Parses `"3"`, `"-2/7"`, `"0.125"` or `"-1.5e-3"` into an exact rational.
pub fn parse_scalar(s: &str) -> Result<Scalar, ParseScalarError> {
    let err = || ParseScalarError(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = t[pos + 1..].parse().map_err(|_| err())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all: BigInt = format!("{}{}", whole, frac).parse().map_err(|_| err())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(all);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn format_scalar(q: &Scalar) -> String {
    q.to_string()
}

/// `(a, b, c)` with exact rational entries.
pub fn format_vec(v: &[Scalar]) -> String {
    format!("({})", v.iter().map(format_scalar).collect::<Vec<_>>().join(", "))
}

pub fn to_f64(q: &Scalar) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Huge magnitudes: fall back through the integer parts.
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn to_f64_vec(v: &[Scalar]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

/// The exact binary value of a finite float.
pub fn from_f64(x: f64) -> Scalar {
    BigRational::from_float(x).unwrap_or_else(Scalar::zero)
}

/// Nearest rational with denominator `10^digits`.
pub fn round_f64(x: f64, digits: u32) -> Scalar {
    let scale = 10f64.powi(digits as i32);
    let scaled = (x * scale).round();
    let n = BigInt::from(scaled as i128);
    BigRational::new(n, num_traits::pow(BigInt::from(10), digits as usize))
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Scalar::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Scalar], t: &Scalar) -> Vec<Scalar> {
    a.iter().map(|x| x * t).collect()
}

pub fn neg(a: &[Scalar]) -> Vec<Scalar> {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Scalar]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// `M v` for a row-major `M`.
pub fn mat_vec(m: &Matrix, v: &[Scalar]) -> Vec<Scalar> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// `Mᵀ v` for a row-major `M`.
pub fn mat_t_vec(m: &Matrix, v: &[Scalar], cols: usize) -> Vec<Scalar> {
    let mut out = zeros(cols);
    for (row, vi) in m.iter().zip(v) {
        if vi.is_zero() {
            continue;
        }
        for (o, a) in out.iter_mut().zip(row) {
            *o += a * vi;
        }
    }
    out
}

/// Scales `v` by a positive factor so it becomes a primitive integer vector.
/// Zero vectors are returned unchanged.
pub fn primitive(v: &[Scalar]) -> Vec<Scalar> {
    use num_integer::Integer;
    if is_zero_vec(v) {
        return v.to_vec();
    }
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let nums: Vec<BigInt> = v
        .iter()
        .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let gcd = nums
        .iter()
        .fold(BigInt::zero(), |acc, n| acc.gcd(n));
    nums.into_iter()
        .map(|n| BigRational::from_integer(n / &gcd))
        .collect()
}

/// Like [`primitive`] but also flips the sign so the first nonzero entry is positive.
pub fn primitive_signed(v: &[Scalar]) -> Vec<Scalar> {
    let p = primitive(v);
    match p.iter().find(|x| !x.is_zero()) {
        Some(first) if first.is_negative() => neg(&p),
        _ => p,
    }
}

pub fn parse_list(s: &str) -> Result<Vec<Scalar>, ParseScalarError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_scalar).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_scalar("1/3").unwrap(), ratio(1, 3));
        assert_eq!(parse_scalar("-2/4").unwrap(), ratio(-1, 2));
        assert_eq!(parse_scalar("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_scalar("-1.5e-1").unwrap(), ratio(-3, 20));
        assert_eq!(parse_scalar("12").unwrap(), int(12));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("abc").is_err());
        assert!(parse_scalar("").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_scalar(&ratio(6, -4)), "-3/2");
        assert_eq!(format_scalar(&int(5)), "5");
    }

    #[test]
    fn primitive_vectors() {
        let v = vec![ratio(1, 2), ratio(-3, 4)];
        assert_eq!(primitive(&v), ints(&[2, -3]));
        assert_eq!(primitive_signed(&neg(&v)), ints(&[2, -3]));
    }

    #[test]
    fn rounding_to_decimal_grid() {
        assert_eq!(round_f64(0.9999999999997, 9), int(1));
        assert_eq!(round_f64(-0.5, 9), ratio(-1, 2));
    }
}
