//! Small helpers around `BigRational`: parsing, formatting, exact square
//! roots and float conversion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator or denominator beyond f64 range
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact square root when `x` is the square of a rational.
pub fn exact_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

/// `3`, `-3/2`: the usual `numer/denom` text.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `3`, `-3/2`, `+7`, `1.25` (decimal is read exactly).
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let v = Q::new(n, d);
        return Some(if neg { -v } else { v });
    }
    s.parse::<BigInt>().ok().map(Q::from_integer)
}

/// Least common multiple of two positive lengths.
pub fn lcm(a: usize, b: usize) -> usize {
    num_integer::lcm(a, b)
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// Serializes a rational as its text form, e.g. `"3/2"`.
pub fn serialize_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

pub fn serialize_opt_q<S: serde::Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_some(&fmt_q(x)),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_formats() {
        assert_eq!(parse_q("-3/6"), Some(qf(-1, 2)));
        assert_eq!(parse_q("1.25"), Some(qf(5, 4)));
        assert_eq!(parse_q("-0.5"), Some(qf(-1, 2)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(fmt_q(&qf(6, 4)), "3/2");
        assert_eq!(fmt_q(&q(-7)), "-7");
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(exact_sqrt(&qf(9, 4)), Some(qf(3, 2)));
        assert_eq!(exact_sqrt(&q(2)), None);
        assert_eq!(exact_sqrt(&q(-4)), None);
        assert_eq!(exact_sqrt(&q(0)), Some(q(0)));
    }
}
