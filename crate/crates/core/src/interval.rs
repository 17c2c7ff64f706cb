//! Outward-rounded enclosures of positive reals with dyadic endpoints.
//!
//! Used only where a threshold is genuinely irrational (fractional powers,
//! logarithms). Every operation widens the result so the true value stays
//! inside; precision is counted in significant bits.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::arith::{rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
}

fn mul_pow2(r: &Rational, e: i64) -> Rational {
    let two = BigInt::from(2u8);
    if e >= 0 {
        r * Rational::from_integer(num_traits::pow(two, e as usize))
    } else {
        r / Rational::from_integer(num_traits::pow(two, e.unsigned_abs() as usize))
    }
}

fn log2_estimate(r: &Rational) -> i64 {
    r.numer().bits() as i64 - r.denom().bits() as i64
}

fn floor_to(r: &Rational, shift: i64) -> Rational {
    mul_pow2(&Rational::from_integer(mul_pow2(r, shift).floor().to_integer()), -shift)
}

fn ceil_to(r: &Rational, shift: i64) -> Rational {
    mul_pow2(&Rational::from_integer(mul_pow2(r, shift).ceil().to_integer()), -shift)
}

impl Enclosure {
    pub fn exact(r: Rational) -> Self {
        Enclosure { lo: r.clone(), hi: r }
    }

    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Enclosure { lo, hi }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, r: &Rational) -> bool {
        &self.lo <= r && r <= &self.hi
    }

    /// Ordering of `r` relative to the enclosed value, if decided.
    pub fn locate(&self, r: &Rational) -> Option<Ordering> {
        if self.lo == self.hi {
            return Some(r.cmp(&self.lo));
        }
        if r < &self.lo {
            Some(Ordering::Less)
        } else if r > &self.hi {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// Rounds both endpoints outward to `prec` significant bits.
    pub fn round_out(self, prec: u32) -> Self {
        if self.lo == self.hi && self.lo.numer().bits() + self.lo.denom().bits() <= prec as u64 {
            return self;
        }
        let lo = if self.lo.is_positive() {
            let shift = prec as i64 - log2_estimate(&self.lo);
            floor_to(&self.lo, shift)
        } else {
            self.lo.clone()
        };
        let hi_shift = prec as i64 - log2_estimate(&self.hi);
        let hi = ceil_to(&self.hi, hi_shift);
        Enclosure { lo, hi }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert!(!self.lo.is_negative() && !other.lo.is_negative());
        Enclosure {
            lo: &self.lo * &other.lo,
            hi: &self.hi * &other.hi,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        debug_assert!(!c.is_negative());
        Enclosure {
            lo: &self.lo * c,
            hi: &self.hi * c,
        }
    }

    pub fn recip(&self) -> Self {
        debug_assert!(self.lo.is_positive());
        Enclosure {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        }
    }

    /// Integer power of a positive enclosure, rounded to `prec` bits.
    pub fn powi(&self, k: i64, prec: u32) -> Self {
        if k == 0 {
            return Enclosure::exact(Rational::one());
        }
        let mut acc = Enclosure::exact(Rational::one());
        let mut base = self.clone();
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).round_out(prec + 8);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).round_out(prec + 8);
            }
        }
        if k < 0 {
            acc.recip().round_out(prec)
        } else {
            acc.round_out(prec)
        }
    }

    /// `v`-th root of a positive enclosure to `prec` bits.
    pub fn root(&self, v: u32, prec: u32) -> Self {
        if v == 1 {
            return self.clone().round_out(prec);
        }
        Enclosure {
            lo: root_floor(&self.lo, v, prec),
            hi: root_ceil(&self.hi, v, prec),
        }
    }
}

fn root_scale(r: &Rational, v: u32, prec: u32) -> i64 {
    prec as i64 - log2_estimate(r) / v as i64
}

fn root_floor(r: &Rational, v: u32, prec: u32) -> Rational {
    if !r.is_positive() {
        return Rational::zero();
    }
    let s = root_scale(r, v, prec);
    let scaled = mul_pow2(r, s * v as i64).floor().to_integer();
    let n: BigUint = scaled.magnitude().nth_root(v);
    mul_pow2(&Rational::from_integer(BigInt::from(n)), -s)
}

fn root_ceil(r: &Rational, v: u32, prec: u32) -> Rational {
    let s = root_scale(r, v, prec);
    let scaled = mul_pow2(r, s * v as i64).ceil().to_integer();
    let m = scaled.magnitude().clone();
    let mut n: BigUint = m.nth_root(v);
    if num_traits::pow(n.clone(), v as usize) < m {
        n += 1u32;
    }
    mul_pow2(&Rational::from_integer(BigInt::from(n)), -s)
}

/// `atanh(z) = Σ z^(2j+1)/(2j+1)` for rational `0 ≤ z ≤ 1/3`, enclosed to
/// roughly `prec` bits absolute. Tail after the last term is bounded by
/// `z^(2m+1) / ((2m+1)(1 - z²))`.
fn atanh_enclosure(z: &Rational, prec: u32) -> Enclosure {
    debug_assert!(!z.is_negative() && *z <= rat(1, 3));
    if z.is_zero() {
        return Enclosure::exact(Rational::zero());
    }
    let work = prec + 32;
    let z2 = Enclosure::exact(z * z);
    let one_minus_z2 = Rational::one() - z * z;
    let target = mul_pow2(&Rational::one(), -(prec as i64 + 8));
    let mut zpow = Enclosure::exact(z.clone()).round_out(work);
    let mut sum = Enclosure::exact(Rational::zero());
    let mut j: u64 = 0;
    loop {
        let denom = Rational::from_integer(BigInt::from(2 * j + 1));
        let term = Enclosure::new(&zpow.lo / &denom, &zpow.hi / &denom);
        sum = Enclosure::new(&sum.lo + &term.lo, &sum.hi + &term.hi);
        sum = round_abs(sum, work);
        zpow = zpow.mul(&z2).round_out(work);
        j += 1;
        let tail = &zpow.hi / (Rational::from_integer(BigInt::from(2 * j + 1)) * &one_minus_z2);
        if tail < target {
            return Enclosure::new(sum.lo, &sum.hi + tail);
        }
    }
}

/// Rounds outward to a fixed absolute grid of `2^-prec`.
fn round_abs(e: Enclosure, prec: u32) -> Enclosure {
    Enclosure {
        lo: floor_to(&e.lo, prec as i64),
        hi: ceil_to(&e.hi, prec as i64),
    }
}

/// Enclosure of `ln q` for an integer `q ≥ 2`.
pub fn ln_enclosure(q: &BigUint, prec: u32) -> Enclosure {
    assert!(*q >= BigUint::from(2u8), "ln enclosure needs q >= 2");
    let k = q.bits() - 1;
    // absolute precision: enough significant bits plus headroom for k·ln2
    let abs_prec = prec + 64 - k.leading_zeros().min(64);
    let ln2 = atanh_enclosure(&rat(1, 3), abs_prec + 8);
    let two = Rational::from_integer(BigInt::from(2u8));
    let ln2 = ln2.scale(&two);
    let y = Rational::new(
        BigInt::from(q.clone()),
        BigInt::from(num_traits::pow(BigUint::from(2u8), k as usize)),
    );
    let z = (&y - Rational::one()) / (&y + Rational::one());
    let lny = atanh_enclosure(&z, abs_prec);
    let kk = Rational::from_integer(BigInt::from(k));
    let lo = &ln2.lo * &kk + &lny.lo * &two;
    let hi = &ln2.hi * &kk + &lny.hi * &two;
    Enclosure::new(lo, hi).round_out(prec)
}
