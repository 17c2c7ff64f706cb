//! Finitely supported rational vectors.
//!
//! Coordinates are indexed from 1. [`SparseRationalVector`] stores only its
//! nonzero entries. [`BlockVector`] adds constant-valued prefix blocks
//! `c·(e_1 + … + e_L)` whose length `L` may be astronomically large; the
//! far-point construction in `ℓ^p` needs supports of size `2·2^n·N!`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SparseRationalVector {
    entries: BTreeMap<u64, Rational>,
}

impl SparseRationalVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a vector from `(index, value)` pairs. Repeated indices are
    /// summed, zero results dropped.
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, Rational)>,
    {
        let mut v = Self::zero();
        for (i, x) in entries {
            if i == 0 {
                return Err(Error::InvalidArgument("coordinate indices start at 1".into()));
            }
            v.add_at(i, &x);
        }
        Ok(v)
    }

    /// Dense constructor: `values[k]` goes to coordinate `k + 1`.
    pub fn from_dense(values: &[Rational]) -> Self {
        let mut v = Self::zero();
        for (k, x) in values.iter().enumerate() {
            v.add_at(k as u64 + 1, x);
        }
        v
    }

    pub fn unit(i: u64) -> Self {
        Self::scaled_unit(i, Rational::one())
    }

    pub fn scaled_unit(i: u64, c: Rational) -> Self {
        assert!(i >= 1, "coordinate indices start at 1");
        let mut v = Self::zero();
        v.add_at(i, &c);
        v
    }

    pub fn get(&self, i: u64) -> Rational {
        self.entries.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_at(&mut self, i: u64, x: &Rational) {
        if x.is_zero() {
            return;
        }
        let slot = self.entries.entry(i).or_insert_with(Rational::zero);
        *slot += x;
        if slot.is_zero() {
            self.entries.remove(&i);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.entries.iter().map(|(i, x)| (*i, x))
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<u64> {
        self.entries.keys().next_back().copied()
    }

    pub fn is_integral(&self) -> bool {
        self.entries.values().all(|x| x.is_integer())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            entries: self.entries.iter().map(|(i, x)| (*i, x * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, x) in other.iter() {
            out.add_at(i, x);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, x) in other.iter() {
            out.add_at(i, &-x);
        }
        out
    }

    /// Union of both supports, sorted.
    pub fn joint_support(&self, other: &Self) -> Vec<u64> {
        let mut s: Vec<u64> = self.support().chain(other.support()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Lexicographic order on the dense representation, used for
    /// deterministic tie-breaking.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        for i in self.joint_support(other) {
            let o = self.get(i).cmp(&other.get(i));
            if o != std::cmp::Ordering::Equal {
                return o;
            }
        }
        std::cmp::Ordering::Equal
    }
}

/// JSON form: `{"entries":[[index,"num/den"],…]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PointJson {
    pub entries: Vec<(u64, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<(String, String)>,
}

impl From<&SparseRationalVector> for PointJson {
    fn from(v: &SparseRationalVector) -> Self {
        PointJson {
            entries: v.iter().map(|(i, x)| (i, format_rational(x))).collect(),
            blocks: Vec::new(),
        }
    }
}

impl TryFrom<&PointJson> for SparseRationalVector {
    type Error = Error;

    fn try_from(p: &PointJson) -> Result<Self> {
        if !p.blocks.is_empty() {
            return Err(Error::InvalidArgument(
                "point has prefix blocks; expected a sparse point".into(),
            ));
        }
        let mut entries = Vec::with_capacity(p.entries.len());
        for (i, s) in &p.entries {
            entries.push((*i, parse_rational(s)?));
        }
        SparseRationalVector::from_entries(entries)
    }
}

impl Serialize for SparseRationalVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparseRationalVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = PointJson::deserialize(d)?;
        SparseRationalVector::try_from(&p).map_err(serde::de::Error::custom)
    }
}

/// A run of `count` coordinates sharing the same value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateClass {
    pub count: BigUint,
    pub value: Rational,
}

/// Sparse part plus prefix blocks: coordinate `i` holds
/// `sparse[i] + Σ { c : (L, c) ∈ blocks, i ≤ L }`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlockVector {
    sparse: SparseRationalVector,
    // sorted by length, lengths distinct, values nonzero
    blocks: Vec<(BigUint, Rational)>,
}

impl BlockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c·(e_1 + … + e_len)`.
    pub fn prefix_block(len: BigUint, c: Rational) -> Self {
        let mut v = Self::zero();
        v.add_block(len, c);
        v
    }

    pub fn from_sparse(sparse: SparseRationalVector) -> Self {
        Self {
            sparse,
            blocks: Vec::new(),
        }
    }

    pub fn sparse_part(&self) -> &SparseRationalVector {
        &self.sparse
    }

    pub fn blocks(&self) -> &[(BigUint, Rational)] {
        &self.blocks
    }

    /// The plain sparse vector, when there are no blocks.
    pub fn as_sparse(&self) -> Option<&SparseRationalVector> {
        self.blocks.is_empty().then_some(&self.sparse)
    }

    fn add_block(&mut self, len: BigUint, c: Rational) {
        if c.is_zero() || len.is_zero() {
            return;
        }
        match self.blocks.binary_search_by(|(l, _)| l.cmp(&len)) {
            Ok(k) => {
                self.blocks[k].1 += c;
                if self.blocks[k].1.is_zero() {
                    self.blocks.remove(k);
                }
            }
            Err(k) => self.blocks.insert(k, (len, c)),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.sparse = out.sparse.add(&other.sparse);
        for (l, c) in &other.blocks {
            out.add_block(l.clone(), c.clone());
        }
        out
    }

    pub fn add_sparse(&self, other: &SparseRationalVector) -> Self {
        let mut out = self.clone();
        out.sparse = out.sparse.add(other);
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            sparse: self.sparse.scale(c),
            blocks: self.blocks.iter().map(|(l, x)| (l.clone(), x * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    /// Value carried by the blocks alone at coordinate `i`.
    fn block_value_at(&self, i: u64) -> Rational {
        let i = BigUint::from(i);
        self.blocks
            .iter()
            .filter(|(l, _)| *l >= i)
            .fold(Rational::zero(), |acc, (_, c)| acc + c)
    }

    pub fn get(&self, i: u64) -> Rational {
        self.sparse.get(i) + self.block_value_at(i)
    }

    /// Size of the support (may be huge).
    pub fn support_len(&self) -> BigUint {
        self.coordinate_classes()
            .into_iter()
            .fold(BigUint::zero(), |acc, c| acc + c.count)
    }

    /// Partitions the support into runs of equal value. Each class lists
    /// how many coordinates carry that value; zero-valued classes are
    /// omitted. This is what norms and lattice distances are computed from.
    pub fn coordinate_classes(&self) -> Vec<CoordinateClass> {
        let mut classes = Vec::new();
        // segment k covers (prev_len, len_k], value = sum of blocks with len >= len_k
        let mut suffix_sums: Vec<Rational> = vec![Rational::zero(); self.blocks.len() + 1];
        for k in (0..self.blocks.len()).rev() {
            suffix_sums[k] = &suffix_sums[k + 1] + &self.blocks[k].1;
        }
        let mut sparse_iter = self.sparse.iter().peekable();
        let mut prev = BigUint::zero();
        for (k, (len, _)) in self.blocks.iter().enumerate() {
            let value = &suffix_sums[k];
            let mut count = len - &prev;
            while let Some((i, x)) = sparse_iter.peek() {
                let bi = BigUint::from(*i);
                if bi > *len {
                    break;
                }
                count -= BigUint::one();
                let v = *x + value;
                if !v.is_zero() {
                    classes.push(CoordinateClass {
                        count: BigUint::one(),
                        value: v,
                    });
                }
                sparse_iter.next();
            }
            if !value.is_zero() && !count.is_zero() {
                classes.push(CoordinateClass {
                    count,
                    value: value.clone(),
                });
            }
            prev = len.clone();
        }
        for (_, x) in sparse_iter {
            classes.push(CoordinateClass {
                count: BigUint::one(),
                value: x.clone(),
            });
        }
        classes
    }

    /// Expands to a plain sparse vector if the support has at most `limit`
    /// coordinates.
    pub fn expand(&self, limit: u64) -> Option<SparseRationalVector> {
        let mut total = self.sparse.clone();
        for (len, c) in &self.blocks {
            let len: u64 = u64::try_from(len).ok()?;
            if len > limit {
                return None;
            }
            for i in 1..=len {
                total.add_at(i, c);
            }
        }
        (total.nnz() as u64 <= limit).then_some(total)
    }

    pub fn to_json(&self) -> PointJson {
        let mut p = PointJson::from(&self.sparse);
        p.blocks = self
            .blocks
            .iter()
            .map(|(l, c)| (l.to_string(), format_rational(c)))
            .collect();
        p
    }

    pub fn from_json(p: &PointJson) -> Result<Self> {
        let mut sparse_entries = Vec::with_capacity(p.entries.len());
        for (i, s) in &p.entries {
            sparse_entries.push((*i, parse_rational(s)?));
        }
        let mut v = Self::from_sparse(SparseRationalVector::from_entries(sparse_entries)?);
        for (l, c) in &p.blocks {
            let len: BigUint = l
                .parse()
                .map_err(|_| Error::Parse(format!("bad block length {l:?}")))?;
            v.add_block(len, parse_rational(c)?);
        }
        Ok(v)
    }
}

impl From<SparseRationalVector> for BlockVector {
    fn from(v: SparseRationalVector) -> Self {
        Self::from_sparse(v)
    }
}

impl Serialize for BlockVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// Sum of `count · |value|^p` over classes.
pub fn classes_pow_sum(classes: &[CoordinateClass], p: u32) -> BigRational {
    classes.iter().fold(Rational::zero(), |acc, c| {
        acc + crate::arith::pow(&c.value.abs(), p) * crate::arith::from_biguint(&c.count)
    })
}

pub fn classes_max_abs(classes: &[CoordinateClass]) -> BigRational {
    classes
        .iter()
        .map(|c| c.value.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}
