//! Rational interval arithmetic with directed dyadic rounding.
//!
//! The only non-rational quantities in the whole toolkit are logarithms and
//! real powers (the Hölder exponent ln(lambda)/ln(n) and the profile value
//! |x|^beta). Those are evaluated here as enclosures [lo, hi] with both
//! endpoints rational, every partial result rounded outward to a dyadic grid
//! so intermediate numerators stay bounded. Downstream code consumes the
//! midpoint and carries the half-width as a certified error bound.

use super::{pow_rational, rat, rat_i64, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntervalError {
    #[error("logarithm requires a positive argument, got {0}")]
    LogNonPositive(String),
    #[error("power base must be nonnegative, got {0}")]
    NegativeBase(String),
    #[error("0^e needs a positive exponent interval, got [{0}, {1}]")]
    ZeroToNonPositive(String, String),
    #[error("series failed to converge within the iteration cap")]
    NoConvergence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatInterval {
    lo: Rational,
    hi: Rational,
}

impl RatInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RatInterval { lo, hi }
    }

    pub fn point(v: Rational) -> Self {
        RatInterval { lo: v.clone(), hi: v }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn half_width(&self) -> Rational {
        self.width() / rat_i64(2)
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / rat_i64(2)
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn add(&self, other: &Self) -> Self {
        RatInterval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &Self) -> Self {
        RatInterval::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        RatInterval::new(lo, hi)
    }

    /// Multiplication by an exact scalar, endpoint order fixed by the sign.
    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_negative() {
            RatInterval::new(&self.hi * s, &self.lo * s)
        } else {
            RatInterval::new(&self.lo * s, &self.hi * s)
        }
    }

    /// Rounds both endpoints outward onto the 2^-prec grid.
    pub fn round_out(&self, prec: u32) -> Self {
        RatInterval::new(dyadic_floor(&self.lo, prec), dyadic_ceil(&self.hi, prec))
    }
}

/// Largest multiple of 2^-prec that is <= r.
pub fn dyadic_floor(r: &Rational, prec: u32) -> Rational {
    let scale = BigInt::one() << prec;
    let scaled = r * Rational::from_integer(scale.clone());
    Rational::new(scaled.floor().to_integer(), scale)
}

/// Smallest multiple of 2^-prec that is >= r.
pub fn dyadic_ceil(r: &Rational, prec: u32) -> Rational {
    let scale = BigInt::one() << prec;
    let scaled = r * Rational::from_integer(scale.clone());
    Rational::new(scaled.ceil().to_integer(), scale)
}

fn pow2_neg(prec: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << prec)
}

const SERIES_CAP: u64 = 100_000;

/// Enclosure of atanh(z) for 0 <= z < 1/2 via the odd power series.
fn atanh_interval(z: &Rational, prec: u32) -> Result<RatInterval, IntervalError> {
    debug_assert!(!z.is_negative() && z < &rat(1, 2));
    let work = prec + 16;
    let stop = pow2_neg(work + 4);
    let z2 = z * z;
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    let mut zpow_lo = z.clone();
    let mut zpow_hi = z.clone();
    let mut j: u64 = 0;
    loop {
        let k = rat_i64((2 * j + 1) as i64);
        lo = dyadic_floor(&(&lo + &zpow_lo / &k), work);
        hi = dyadic_ceil(&(&hi + &zpow_hi / &k), work);
        zpow_lo = dyadic_floor(&(&zpow_lo * &z2), work + 8);
        zpow_hi = dyadic_ceil(&(&zpow_hi * &z2), work + 8);
        j += 1;
        if zpow_hi < stop {
            break;
        }
        if j > SERIES_CAP {
            return Err(IntervalError::NoConvergence);
        }
    }
    // Remaining terms are bounded by the geometric series z^{2j+1}/(1 - z^2).
    let tail = dyadic_ceil(&(&zpow_hi / (Rational::one() - &z2)), work);
    Ok(RatInterval::new(lo, hi + tail))
}

fn ln2_interval(prec: u32) -> RatInterval {
    static CACHE: OnceLock<Mutex<HashMap<u32, RatInterval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("ln2 cache poisoned");
    guard
        .entry(prec)
        .or_insert_with(|| {
            // ln 2 = 2 atanh(1/3)
            atanh_interval(&rat(1, 3), prec + 4)
                .expect("atanh(1/3) converges")
                .scale(&rat_i64(2))
        })
        .clone()
}

/// Enclosure of ln(m) for a positive integer m.
fn ln_big_uint(m: &BigInt, prec: u32) -> Result<RatInterval, IntervalError> {
    debug_assert!(m.is_positive());
    if m.is_one() {
        return Ok(RatInterval::point(Rational::zero()));
    }
    let s = m.bits() - 1;
    let two_s = BigInt::one() << s;
    // m / 2^s lies in [1, 2); map to atanh with z = (m - 2^s)/(m + 2^s) in [0, 1/3).
    let z = Rational::new(m - &two_s, m + &two_s);
    let frac = atanh_interval(&z, prec)?.scale(&rat_i64(2));
    let whole = ln2_interval(prec).scale(&rat_i64(s as i64));
    Ok(whole.add(&frac).round_out(prec + 8))
}

/// Enclosure of ln(x) for a positive rational x.
pub fn ln_interval(x: &Rational, prec: u32) -> Result<RatInterval, IntervalError> {
    if !x.is_positive() {
        return Err(IntervalError::LogNonPositive(x.to_string()));
    }
    let p = ln_big_uint(x.numer(), prec)?;
    let q = ln_big_uint(x.denom(), prec)?;
    Ok(p.sub(&q))
}

/// Enclosure of ln(a)/ln(b) for rationals a > 0 and b > 1; this is the only
/// quotient of logarithms the toolkit needs (the Hölder exponent).
pub fn log_ratio_interval(a: &Rational, b: &Rational, prec: u32) -> Result<RatInterval, IntervalError> {
    if !a.is_positive() {
        return Err(IntervalError::LogNonPositive(a.to_string()));
    }
    assert!(b > &Rational::one(), "log base must exceed 1");
    let num = ln_interval(a, prec + 8)?;
    let den = ln_interval(b, prec + 8)?;
    debug_assert!(den.lo.is_positive());
    // Reciprocal of a positive interval is exact on endpoints.
    let den_recip = RatInterval::new(den.hi.recip(), den.lo.recip());
    Ok(num.mul(&den_recip).round_out(prec))
}

/// One directed endpoint of exp(x).
fn exp_dir(x: &Rational, prec: u32, upper: bool) -> Result<Rational, IntervalError> {
    if x.is_negative() {
        // exp(x) = 1/exp(-x); rational reciprocal is exact, so the direction
        // simply flips.
        let opposite = exp_dir(&(-x), prec, !upper)?;
        return Ok(opposite.recip());
    }
    let work = prec + 16;
    let stop = pow2_neg(work + 4);
    let half = rat(1, 2);
    let mut y = x.clone();
    let mut halvings = 0u32;
    while y > half {
        y /= rat_i64(2);
        halvings += 1;
    }
    let mut sum = Rational::one();
    let mut term = Rational::one();
    let mut j: u64 = 0;
    loop {
        j += 1;
        term = &term * &y / rat_i64(j as i64);
        term = if upper {
            dyadic_ceil(&term, work + 8)
        } else {
            dyadic_floor(&term, work + 8)
        };
        sum = if upper {
            dyadic_ceil(&(&sum + &term), work)
        } else {
            dyadic_floor(&(&sum + &term), work)
        };
        if term < stop {
            break;
        }
        if j > SERIES_CAP {
            return Err(IntervalError::NoConvergence);
        }
    }
    if upper {
        // With y <= 1/2 the term ratio is below 1/2, so the tail is bounded
        // by the last term.
        sum += &term;
    }
    for _ in 0..halvings {
        let sq = &sum * &sum;
        sum = if upper {
            dyadic_ceil(&sq, work)
        } else {
            dyadic_floor(&sq, work)
        };
    }
    Ok(sum)
}

/// Enclosure of exp over an interval argument.
pub fn exp_interval(x: &RatInterval, prec: u32) -> Result<RatInterval, IntervalError> {
    let lo = exp_dir(&x.lo, prec, false)?;
    let hi = exp_dir(&x.hi, prec, true)?;
    Ok(RatInterval::new(lo, hi))
}

/// Enclosure of base^expo for base >= 0. An exact integer exponent point
/// interval short-circuits to exact rational power.
pub fn pow_interval(base: &Rational, expo: &RatInterval, prec: u32) -> Result<RatInterval, IntervalError> {
    if base.is_negative() {
        return Err(IntervalError::NegativeBase(base.to_string()));
    }
    if base.is_zero() {
        if expo.lo.is_positive() {
            return Ok(RatInterval::point(Rational::zero()));
        }
        return Err(IntervalError::ZeroToNonPositive(
            expo.lo.to_string(),
            expo.hi.to_string(),
        ));
    }
    if base.is_one() {
        return Ok(RatInterval::point(Rational::one()));
    }
    if expo.lo == expo.hi && expo.lo.denom().is_one() {
        let e: i64 = expo
            .lo
            .numer()
            .try_into()
            .map_err(|_| IntervalError::NoConvergence)?;
        return Ok(RatInterval::point(pow_rational(base, e)));
    }
    let l = ln_interval(base, prec + 8)?;
    let prod = l.mul(expo).round_out(prec + 8);
    exp_interval(&prod, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::parse_rational;

    fn approx(digits: &str) -> Rational {
        parse_rational(digits).unwrap()
    }

    /// Checks that `iv` encloses a reference value known to `guard_digits`
    /// decimal digits, and that its width is below 2^-min_width_bits.
    fn assert_tight(iv: &RatInterval, reference: &Rational, guard: &Rational, min_width_bits: u32) {
        assert!(
            iv.lo() <= &(reference + guard) && &(reference - guard) <= iv.hi(),
            "enclosure [{}, {}] misses reference {}",
            iv.lo(),
            iv.hi(),
            reference
        );
        assert!(
            iv.width() < pow2_neg(min_width_bits),
            "enclosure too wide: {}",
            iv.width()
        );
    }

    #[test]
    fn ln_two_matches_reference_digits() {
        // ln 2 to 40 decimal places.
        let reference = approx(
            "6931471805599453094172321214581765680755/10000000000000000000000000000000000000000",
        );
        let guard = approx("1/1000000000000000000000000000000000000000");
        let iv = ln_interval(&rat_i64(2), 192).unwrap();
        assert_tight(&iv, &reference, &guard, 150);
    }

    #[test]
    fn ln_three_matches_reference_digits() {
        let reference = approx(
            "10986122886681096913952452369225257046475/10000000000000000000000000000000000000000",
        );
        let guard = approx("1/1000000000000000000000000000000000000000");
        let iv = ln_interval(&rat_i64(3), 192).unwrap();
        assert_tight(&iv, &reference, &guard, 150);
    }

    #[test]
    fn ln_of_fraction_is_difference() {
        let iv = ln_interval(&rat(3, 2), 128).unwrap();
        let l3 = ln_interval(&rat_i64(3), 128).unwrap();
        let l2 = ln_interval(&rat_i64(2), 128).unwrap();
        let diff = l3.sub(&l2);
        assert!(iv.lo() <= diff.hi() && diff.lo() <= iv.hi());
    }

    #[test]
    fn exp_one_matches_reference_digits() {
        let reference = approx(
            "27182818284590452353602874713526624977572/10000000000000000000000000000000000000000",
        );
        let guard = approx("1/1000000000000000000000000000000000000000");
        let iv = exp_interval(&RatInterval::point(rat_i64(1)), 192).unwrap();
        assert_tight(&iv, &reference, &guard, 150);
    }

    #[test]
    fn exp_negative_argument() {
        let iv = exp_interval(&RatInterval::point(rat_i64(-1)), 128).unwrap();
        let e = exp_interval(&RatInterval::point(rat_i64(1)), 128).unwrap();
        let prod_lo = iv.lo() * e.lo();
        let prod_hi = iv.hi() * e.hi();
        assert!(prod_lo <= Rational::one() && Rational::one() <= prod_hi);
    }

    #[test]
    fn sqrt_two_via_pow() {
        let reference = approx(
            "14142135623730950488016887242096980785697/10000000000000000000000000000000000000000",
        );
        let guard = approx("1/1000000000000000000000000000000000000000");
        let half = RatInterval::point(rat(1, 2));
        let iv = pow_interval(&rat_i64(2), &half, 192).unwrap();
        assert_tight(&iv, &reference, &guard, 120);
    }

    #[test]
    fn log2_of_three_matches_reference_digits() {
        // ln 3 / ln 2 to 40 decimal places.
        let reference = approx(
            "15849625007211561814537389439478165087598/10000000000000000000000000000000000000000",
        );
        let guard = approx("1/1000000000000000000000000000000000000000");
        let iv = log_ratio_interval(&rat_i64(3), &rat_i64(2), 192).unwrap();
        assert_tight(&iv, &reference, &guard, 120);
    }

    #[test]
    fn integer_exponent_short_circuits_exactly() {
        let iv = pow_interval(&rat(3, 2), &RatInterval::point(rat_i64(4)), 64).unwrap();
        assert_eq!(iv, RatInterval::point(rat(81, 16)));
        let neg = pow_interval(&rat_i64(2), &RatInterval::point(rat_i64(-3)), 64).unwrap();
        assert_eq!(neg, RatInterval::point(rat(1, 8)));
    }

    #[test]
    fn pow_of_zero_base() {
        let beta = RatInterval::new(rat(3, 2), rat(8, 5));
        let iv = pow_interval(&Rational::zero(), &beta, 64).unwrap();
        assert_eq!(iv, RatInterval::point(Rational::zero()));
        let bad = RatInterval::new(rat(-1, 2), rat(1, 2));
        assert!(pow_interval(&Rational::zero(), &bad, 64).is_err());
    }

    #[test]
    fn dyadic_rounding_brackets() {
        let r = rat(10, 3);
        let lo = dyadic_floor(&r, 8);
        let hi = dyadic_ceil(&r, 8);
        assert!(lo <= r && r <= hi);
        assert!(&hi - &lo <= pow2_neg(8));
        assert_eq!(dyadic_floor(&rat(3, 4), 2), rat(3, 4));
        assert_eq!(dyadic_ceil(&rat(3, 4), 2), rat(3, 4));
        assert_eq!(dyadic_floor(&rat(-10, 3), 1), rat(-7, 2));
    }

    #[test]
    fn interval_midpoint_and_width() {
        let iv = RatInterval::new(rat(1, 4), rat(3, 4));
        assert_eq!(iv.midpoint(), rat(1, 2));
        assert_eq!(iv.width(), rat(1, 2));
        assert_eq!(iv.half_width(), rat(1, 4));
        assert!(iv.contains(&rat(1, 3)));
        assert!(!iv.contains(&rat_i64(1)));
    }

    #[test]
    fn scale_flips_on_negative() {
        let iv = RatInterval::new(rat(1, 2), rat_i64(2));
        let s = iv.scale(&rat_i64(-3));
        assert_eq!(s.lo(), &rat_i64(-6));
        assert_eq!(s.hi(), &rat(-3, 2));
    }
}
