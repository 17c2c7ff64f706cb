//! Norm selectors, exact distance values and the standard height.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{exact_root, format_rational, lcm, pow, Rational};
use crate::error::{Error, Result};
use crate::vector::{classes_max_abs, classes_pow_sum, BlockVector, CoordinateClass, SparseRationalVector};

/// `ℓ^p` with integer `p ≥ 1`, or the sup norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    Lp(u32),
    Sup,
}

impl Norm {
    /// Exponent used for the stored value: `p`, or 1 for the sup norm.
    pub fn power(self) -> u32 {
        match self {
            Norm::Lp(p) => p,
            Norm::Sup => 1,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" | "infinity" => Ok(Norm::Sup),
            other => {
                let p: u32 = other.parse().map_err(|_| {
                    Error::Parse(format!(
                        "norm exponent must be a positive integer or \"inf\", got {other:?}"
                    ))
                })?;
                if p == 0 {
                    return Err(Error::Parse("norm exponent must be at least 1".into()));
                }
                Ok(Norm::Lp(p))
            }
        }
    }

    /// Norm (in stored form) of the vector whose coordinates are described
    /// by `classes`.
    pub fn measure(self, classes: &[CoordinateClass]) -> DistValue {
        let value = match self {
            Norm::Lp(p) => classes_pow_sum(classes, p),
            Norm::Sup => classes_max_abs(classes),
        };
        DistValue { norm: self, value }
    }

    pub fn of_sparse(self, v: &SparseRationalVector) -> DistValue {
        let value = match self {
            Norm::Lp(p) => v.iter().fold(Rational::zero(), |a, (_, x)| a + pow(&x.abs(), p)),
            Norm::Sup => v.iter().map(|(_, x)| x.abs()).max().unwrap_or_else(Rational::zero),
        };
        DistValue { norm: self, value }
    }

    pub fn of_block(self, v: &BlockVector) -> DistValue {
        self.measure(&v.coordinate_classes())
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::Lp(p) => write!(f, "{p}"),
            Norm::Sup => write!(f, "inf"),
        }
    }
}

impl Serialize for Norm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Norm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Norm::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A distance (or norm) held exactly: `value = dist^p` for finite `p`,
/// `value = dist` for the sup norm.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DistValue {
    pub norm: Norm,
    pub value: Rational,
}

impl DistValue {
    pub fn zero(norm: Norm) -> Self {
        DistValue {
            norm,
            value: Rational::zero(),
        }
    }

    /// The distance-valued form of a rational length `t ≥ 0`.
    pub fn from_length(norm: Norm, t: &Rational) -> Self {
        DistValue {
            norm,
            value: pow(t, norm.power()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Exact comparison of the distance against a rational `t ≥ 0`.
    pub fn cmp_length(&self, t: &Rational) -> Ordering {
        debug_assert!(!t.is_negative());
        self.value.cmp(&pow(t, self.norm.power()))
    }

    /// The distance itself when it is rational.
    pub fn exact_length(&self) -> Option<Rational> {
        exact_root(&self.value, self.norm.power())
    }

    /// Readable string, e.g. `"1/6"` or `"(2/9)^(1/2)"`.
    pub fn display_length(&self) -> String {
        match self.exact_length() {
            Some(r) => format_rational(&r),
            None => format!("({})^(1/{})", format_rational(&self.value), self.norm.power()),
        }
    }
}

impl PartialOrd for DistValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.norm == other.norm).then(|| self.value.cmp(&other.value))
    }
}

#[derive(Serialize)]
struct DistJson<'a> {
    p: Norm,
    value: String,
    dist: &'a str,
}

impl Serialize for DistValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let dist = self.display_length();
        DistJson {
            p: self.norm,
            value: format_rational(&self.value),
            dist: &dist,
        }
        .serialize(s)
    }
}

/// Standard height for the product lattice: the least `q ≥ 1` with `q·r`
/// integral, i.e. the lcm of the reduced denominators.
pub fn height_std(r: &SparseRationalVector) -> BigUint {
    r.iter().fold(BigUint::one(), |acc, (_, x)| lcm(&acc, x.denom().magnitude()))
}

pub fn height_std_block(r: &BlockVector) -> BigUint {
    r.coordinate_classes()
        .iter()
        .fold(BigUint::one(), |acc, c| lcm(&acc, c.value.denom().magnitude()))
}
