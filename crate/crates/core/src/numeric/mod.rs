//! Exact rational scalars shared by every other module.
//!
//! All quantities that enter a verdict (defects, tolerances, constraint
//! coefficients, witnesses) are `BigRational`. Floating point never appears on
//! a decision path; the interval submodule covers the transcendental corner.

pub mod interval;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumericError {
    #[error("malformed rational `{input}`: {reason}")]
    ParseRational { input: String, reason: String },
    #[error("zero denominator in `{input}`")]
    ZeroDenominator { input: String },
    #[error("cannot invert zero")]
    ZeroInverse,
}

pub fn rat_i64(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for small literal fractions; panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "rat() requires a nonzero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses "p/q" or a bare integer "p". Whitespace around either part is
/// tolerated; anything else is rejected.
pub fn parse_rational(s: &str) -> Result<Rational, NumericError> {
    let t = s.trim();
    let bad = |reason: &str| NumericError::ParseRational {
        input: s.to_string(),
        reason: reason.to_string(),
    };
    if t.is_empty() {
        return Err(bad("empty string"));
    }
    let (np, dp) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (t, None),
    };
    let numer: BigInt = np.parse().map_err(|_| bad("integer part unreadable"))?;
    let denom: BigInt = match dp {
        Some(b) => b.parse().map_err(|_| bad("denominator unreadable"))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(NumericError::ZeroDenominator {
            input: s.to_string(),
        });
    }
    Ok(Rational::new(numer, denom))
}

/// Canonical serialization: always "p/q", reduced, sign on the numerator.
/// A fixed shape keeps TSV/CSV artifacts byte-reproducible.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Exact integer power with negative exponents allowed (base must then be
/// nonzero).
pub fn pow_rational(base: &Rational, exp: i64) -> Rational {
    if exp == 0 {
        return Rational::one();
    }
    let positive = if exp > 0 {
        base.clone()
    } else {
        assert!(!base.is_zero(), "negative power of zero");
        base.recip()
    };
    let mut acc = Rational::one();
    let mut sq = positive;
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// n^exp as a rational, exp may be negative.
pub fn pow_of(n: u32, exp: i64) -> Rational {
    pow_rational(&rat_i64(i64::from(n)), exp)
}

/// True when `r` can be written with denominator dividing n^j for some j,
/// i.e. r lies in Z[1/n].
pub fn denominator_divides_power(r: &Rational, n: u32) -> bool {
    adic_denominator_exponent(r, n).is_some()
}

/// Least j with denom(r) | n^j, or None if no such j exists.
pub fn adic_denominator_exponent(r: &Rational, n: u32) -> Option<i64> {
    let n_big = BigInt::from(n);
    let mut d = r.denom().abs();
    let mut j = 0i64;
    while !d.is_one() {
        let g = num_integer::gcd(d.clone(), n_big.clone());
        if g.is_one() {
            return None;
        }
        d /= g;
        j += 1;
    }
    Some(j)
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub fn max_rational(a: Rational, b: Rational) -> Rational {
    if a >= b {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-7/2", "5", "0", "-12/8"] {
            let r = parse_rational(s).unwrap();
            let back = parse_rational(&format_rational(&r)).unwrap();
            assert_eq!(r, back);
        }
        assert_eq!(format_rational(&rat(-12, 8)), "-3/2");
        assert_eq!(format_rational(&rat_i64(5)), "5/1");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    #[test]
    fn powers() {
        assert_eq!(pow_rational(&rat(2, 3), 3), rat(8, 27));
        assert_eq!(pow_rational(&rat(2, 3), -2), rat(9, 4));
        assert_eq!(pow_rational(&rat(5, 7), 0), rat_i64(1));
        assert_eq!(pow_of(2, 10), rat_i64(1024));
        assert_eq!(pow_of(3, -2), rat(1, 9));
    }

    #[test]
    fn adic_denominators() {
        assert_eq!(adic_denominator_exponent(&rat(3, 8), 2), Some(3));
        assert_eq!(adic_denominator_exponent(&rat(1, 2), 4), Some(1));
        assert_eq!(adic_denominator_exponent(&rat(5, 1), 2), Some(0));
        assert_eq!(adic_denominator_exponent(&rat(1, 3), 2), None);
        assert_eq!(adic_denominator_exponent(&rat(1, 12), 6), Some(2));
    }
}
