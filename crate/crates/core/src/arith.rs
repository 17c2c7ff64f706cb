//! Exact scalar arithmetic on arbitrary-precision rationals and integers.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. `BigRational` keeps itself reduced with a positive
/// denominator, and zero is stored as `0/1`.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_biguint(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n.clone()))
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Serializes as `"num/den"`, or just `"num"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest integer, exact halves rounded toward negative infinity.
pub fn round_half_down(r: &Rational) -> BigInt {
    (r - rat(1, 2)).ceil().to_integer()
}

/// Distance from `r` to the nearest integer.
pub fn dist_to_integers(r: &Rational) -> Rational {
    let n = Rational::from_integer(round_half_down(r));
    (r - n).abs()
}

pub fn pow(r: &Rational, e: u32) -> Rational {
    num_traits::pow(r.clone(), e as usize)
}

/// `r^e` for a signed exponent; `r` must be nonzero when `e < 0`.
pub fn pow_signed(r: &Rational, e: i64) -> Rational {
    let p = pow(r, e.unsigned_abs() as u32);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

pub fn lcm(a: &BigUint, b: &BigUint) -> BigUint {
    a.lcm(b)
}

pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Cheap upper bound on `bits(n!)`: the sum of the bit lengths of `2..=n`.
pub fn factorial_bits_upper(n: u64) -> u64 {
    let mut total = 1u64;
    let mut lo = 2u64;
    let mut bits = 2u64;
    while lo <= n {
        let hi = lo.saturating_mul(2).saturating_sub(1).min(n);
        total += (hi - lo + 1) * bits;
        lo = match lo.checked_mul(2) {
            Some(v) => v,
            None => break,
        };
        bits += 1;
    }
    total
}

/// Returns `Some(r^(1/k))` if `r >= 0` is the k-th power of a rational.
pub fn exact_root(r: &Rational, k: u32) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    if k == 1 {
        return Some(r.clone());
    }
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    let rn = n.nth_root(k);
    let rd = d.nth_root(k);
    if num_traits::pow(rn.clone(), k as usize) == *n && num_traits::pow(rd.clone(), k as usize) == *d {
        Some(Rational::new(BigInt::from(rn), BigInt::from(rd)))
    } else {
        None
    }
}

pub fn to_bigint(n: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, n.clone())
}

/// Bit length of the larger of numerator and denominator.
pub fn rational_bits(r: &Rational) -> u64 {
    r.numer().bits().max(r.denom().bits())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_ties_go_down() {
        assert_eq!(round_half_down(&rat(3, 2)), BigInt::from(1));
        assert_eq!(round_half_down(&rat(-3, 2)), BigInt::from(-2));
        assert_eq!(round_half_down(&rat(-17, 10)), BigInt::from(-2));
        assert_eq!(round_half_down(&rat(8, 5)), BigInt::from(2));
        assert_eq!(round_half_down(&int(4)), BigInt::from(4));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&rat(-3, 6)), "-1/2");
        assert_eq!(format_rational(&int(5)), "5");
    }

    #[test]
    fn factorial_bit_bound_is_an_upper_bound() {
        for n in [0u64, 1, 2, 7, 8, 41, 256, 1000] {
            assert!(factorial(n).bits() <= factorial_bits_upper(n), "n = {n}");
        }
    }

    #[test]
    fn exact_roots() {
        assert_eq!(exact_root(&rat(4, 9), 2), Some(rat(2, 3)));
        assert_eq!(exact_root(&rat(3, 4), 2), None);
        assert_eq!(exact_root(&rat(1, 8), 3), Some(rat(1, 2)));
    }
}
