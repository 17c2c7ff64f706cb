//! The four lattice-in-space families and their geometry.
//!
//! | kind | space | lattice |
//! |------|-------|---------|
//! | `FiniteDim{d, p}` | `ℝ^d` with the `ℓ^p` or sup norm | `ℤ^d` |
//! | `LpSequence{p}` | `ℓ^p(ℕ)` | finitely supported integer sequences |
//! | `C0` | `c₀(ℕ)` | finitely supported integer sequences |
//! | `LInfty` | `ℓ^∞(ℕ)` | all bounded integer sequences |
//!
//! All points handled here are finitely supported. All lattices are product
//! lattices, so nearest points are found coordinate by coordinate.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, from_biguint, round_half_down, Rational};
use crate::error::{Error, Result};
use crate::metric::{DistValue, Norm};
use crate::vector::{BlockVector, CoordinateClass, SparseRationalVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceDescriptor {
    FiniteDim { d: u64, norm: Norm },
    LpSequence { p: u32 },
    C0,
    LInfty,
}

/// `{"kind":"fin"|"lp"|"c0"|"linf", "d":int?, "p":"1"|"2"|"inf"}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SpaceJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
}

impl SpaceDescriptor {
    pub fn finite(d: u64, norm: Norm) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        Ok(SpaceDescriptor::FiniteDim { d, norm })
    }

    pub fn lp(p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("p must be at least 1".into()));
        }
        Ok(SpaceDescriptor::LpSequence { p })
    }

    pub fn norm(&self) -> Norm {
        match *self {
            SpaceDescriptor::FiniteDim { norm, .. } => norm,
            SpaceDescriptor::LpSequence { p } => Norm::Lp(p),
            SpaceDescriptor::C0 | SpaceDescriptor::LInfty => Norm::Sup,
        }
    }

    pub fn dimension(&self) -> Option<u64> {
        match *self {
            SpaceDescriptor::FiniteDim { d, .. } => Some(d),
            _ => None,
        }
    }

    pub fn is_infinite_dimensional(&self) -> bool {
        self.dimension().is_none()
    }

    /// Rejects points with coordinates beyond the dimension.
    pub fn check_point(&self, x: &SparseRationalVector) -> Result<()> {
        if let (Some(d), Some(i)) = (self.dimension(), x.max_index()) {
            if i > d {
                return Err(Error::DimensionMismatch { index: i, dim: d });
            }
        }
        Ok(())
    }

    pub fn from_json(j: &SpaceJson) -> Result<Self> {
        let norm = j.p.as_deref().map(Norm::parse).transpose()?;
        match j.kind.as_str() {
            "fin" => {
                let d = j
                    .d
                    .ok_or_else(|| Error::InvalidArgument("finite-dimensional space needs \"d\"".into()))?;
                SpaceDescriptor::finite(d, norm.unwrap_or(Norm::Sup))
            }
            "lp" => match norm {
                Some(Norm::Lp(p)) if j.d.is_none() => SpaceDescriptor::lp(p),
                Some(Norm::Sup) => Err(Error::InvalidArgument(
                    "use kind \"linf\" or \"c0\" for the sup norm on sequences".into(),
                )),
                _ => Err(Error::InvalidArgument("\"lp\" needs a finite \"p\" and no \"d\"".into())),
            },
            "c0" | "linf" => {
                if j.d.is_some() || matches!(norm, Some(Norm::Lp(_))) {
                    return Err(Error::InvalidArgument(format!(
                        "\"{}\" takes no \"d\" and only p = \"inf\"",
                        j.kind
                    )));
                }
                Ok(if j.kind == "c0" {
                    SpaceDescriptor::C0
                } else {
                    SpaceDescriptor::LInfty
                })
            }
            other => Err(Error::InvalidArgument(format!("unknown space kind {other:?}"))),
        }
    }

    pub fn to_json(&self) -> SpaceJson {
        match *self {
            SpaceDescriptor::FiniteDim { d, norm } => SpaceJson {
                kind: "fin".into(),
                d: Some(d),
                p: Some(norm.to_string()),
            },
            SpaceDescriptor::LpSequence { p } => SpaceJson {
                kind: "lp".into(),
                d: None,
                p: Some(p.to_string()),
            },
            SpaceDescriptor::C0 => SpaceJson {
                kind: "c0".into(),
                d: None,
                p: None,
            },
            SpaceDescriptor::LInfty => SpaceJson {
                kind: "linf".into(),
                d: None,
                p: None,
            },
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let j: SpaceJson = serde_json::from_str(s).map_err(|e| Error::Parse(format!("space JSON: {e}")))?;
        Self::from_json(&j)
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_string(&self.to_json()).map_err(|_| fmt::Error)?;
        f.write_str(&s)
    }
}

impl Serialize for SpaceDescriptor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpaceDescriptor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SpaceJson::deserialize(d)?;
        SpaceDescriptor::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// Codiameter `sup_x dist(x, Λ)`, finite exactly for cobounded lattices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Codiameter {
    Finite(DistValue),
    Infinite,
}

impl Codiameter {
    pub fn is_finite(&self) -> bool {
        matches!(self, Codiameter::Finite(_))
    }
}

impl fmt::Display for Codiameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Codiameter::Finite(d) => f.write_str(&d.display_length()),
            Codiameter::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceInfo {
    /// Least norm of a nonzero lattice point.
    pub epsilon_lambda: Rational,
    pub codiameter: Codiameter,
    pub cobounded: bool,
    /// Every ball holds finitely many lattice points.
    pub strongly_discrete: bool,
}

impl Serialize for SpaceInfo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SpaceInfo", 4)?;
        st.serialize_field("epsilon_lambda", &format_rational(&self.epsilon_lambda))?;
        st.serialize_field("codiameter", &self.codiameter.to_string())?;
        st.serialize_field("cobounded", &self.cobounded)?;
        st.serialize_field("strongly_discrete", &self.strongly_discrete)?;
        st.end()
    }
}

pub fn space_info(space: &SpaceDescriptor) -> SpaceInfo {
    let half = Rational::new(1.into(), 2.into());
    let codiameter = match *space {
        // d coordinates each at distance 1/2: codiam^p = d/2^p
        SpaceDescriptor::FiniteDim { d, norm } => {
            let value = match norm {
                Norm::Lp(p) => {
                    Rational::from_integer(d.into()) * crate::arith::pow(&half, p)
                }
                Norm::Sup => half.clone(),
            };
            Codiameter::Finite(DistValue { norm, value })
        }
        SpaceDescriptor::LpSequence { .. } => Codiameter::Infinite,
        SpaceDescriptor::C0 | SpaceDescriptor::LInfty => Codiameter::Finite(DistValue {
            norm: Norm::Sup,
            value: half,
        }),
    };
    SpaceInfo {
        epsilon_lambda: Rational::one(),
        cobounded: codiameter.is_finite(),
        codiameter,
        strongly_discrete: !space.is_infinite_dimensional(),
    }
}

/// Exact distance `‖x − r‖` in the space's norm.
pub fn distance(
    space: &SpaceDescriptor,
    x: &SparseRationalVector,
    r: &SparseRationalVector,
) -> Result<DistValue> {
    space.check_point(x)?;
    space.check_point(r)?;
    Ok(space.norm().of_sparse(&x.sub(r)))
}

pub fn norm_of(space: &SpaceDescriptor, x: &SparseRationalVector) -> Result<DistValue> {
    space.check_point(x)?;
    Ok(space.norm().of_sparse(x))
}

/// Coordinate-wise nearest point of `Λ/q` (as the integer vector `p`) with
/// the exact distance `‖x − p/q‖`. Ties round toward `−∞`.
pub fn nearest_point_scaled(
    space: &SpaceDescriptor,
    x: &SparseRationalVector,
    q: &BigUint,
) -> Result<(SparseRationalVector, DistValue)> {
    if q.is_zero() {
        return Err(Error::InvalidArgument("q must be at least 1".into()));
    }
    space.check_point(x)?;
    let qr = from_biguint(q);
    let mut p = SparseRationalVector::zero();
    let mut residual = SparseRationalVector::zero();
    for (i, xi) in x.iter() {
        let n = round_half_down(&(xi * &qr));
        let nr = Rational::from_integer(n);
        residual.add_at(i, &(xi - &nr / &qr));
        p.add_at(i, &nr);
    }
    Ok((p, space.norm().of_sparse(&residual)))
}

/// Distance from a scalar to `ℤ/q` with the nearest grid point rounding
/// ties toward `−∞`.
fn residual_to_grid(v: &Rational, q: &Rational) -> Rational {
    let n = Rational::from_integer(round_half_down(&(v * q)));
    (v - n / q).abs()
}

/// `dist(x, Λ/q)` for a block vector. Only the distance is returned: the
/// nearest lattice point may have an enormous support.
pub fn dist_block_to_scaled_lattice(
    space: &SpaceDescriptor,
    x: &BlockVector,
    q: &BigUint,
) -> Result<DistValue> {
    if q.is_zero() {
        return Err(Error::InvalidArgument("q must be at least 1".into()));
    }
    if let Some(d) = space.dimension() {
        if !x.blocks().is_empty() {
            return Err(Error::InvalidArgument(format!(
                "block vectors do not fit in dimension {d}"
            )));
        }
        space.check_point(x.sparse_part())?;
    }
    let qr = from_biguint(q);
    let residuals: Vec<CoordinateClass> = x
        .coordinate_classes()
        .into_iter()
        .map(|c| CoordinateClass {
            value: residual_to_grid(&c.value, &qr),
            count: c.count,
        })
        .filter(|c| !c.value.is_zero())
        .collect();
    Ok(space.norm().measure(&residuals))
}

/// Standard basis `e_1, …, e_n`: unit vectors with `‖e_i − e_j‖ ≥ 1`.
pub fn separated_basis(space: &SpaceDescriptor, n: u64) -> Result<Vec<SparseRationalVector>> {
    if let Some(d) = space.dimension() {
        if n > d {
            return Err(Error::InvalidArgument(format!(
                "cannot pick {n} separated unit vectors in dimension {d}"
            )));
        }
    }
    Ok((1..=n).map(SparseRationalVector::unit).collect())
}

/// A point of norm exactly `R` whose distance to the lattice is also `R`,
/// in `ℓ^p(ℕ)`.
///
/// `w = (R/m)·(e_1 + … + e_M)` with `m = ⌈2R⌉` and `M = m^p`, so every
/// entry is at most `1/2`, the nearest lattice point is `0`, and
/// `‖w‖^p = M·(R/m)^p = R^p`. `eps` only has to be positive: the distance
/// meets `R − eps` with room to spare.
pub fn far_point(space: &SpaceDescriptor, radius: &Rational, eps: &Rational) -> Result<BlockVector> {
    let p = match *space {
        SpaceDescriptor::LpSequence { p } => p,
        _ => {
            return Err(Error::Precondition(
                "far points exist only for the non-cobounded ℓ^p lattice".into(),
            ))
        }
    };
    if !radius.is_positive() || !eps.is_positive() {
        return Err(Error::InvalidArgument("radius and eps must be positive".into()));
    }
    let m = (radius * Rational::from_integer(2.into())).ceil().to_integer();
    let m_big = m.magnitude().clone();
    let support = num_traits::pow(m_big, p as usize);
    let entry = radius / Rational::from_integer(m);
    debug_assert!(entry <= Rational::new(1.into(), 2.into()));
    Ok(BlockVector::prefix_block(support, entry))
}


/// `gcd`-based check that `p/q` reduces: returns the reduced height of the
/// vector `p/q`.
pub fn reduced_height(p: &SparseRationalVector, q: &BigUint) -> BigUint {
    let mut g = q.clone();
    for (_, x) in p.iter() {
        g = g.gcd(x.numer().magnitude());
        if g.is_one() {
            break;
        }
    }
    q / g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use std::cmp::Ordering;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn space_json() {
        let s = SpaceDescriptor::parse(r#"{"kind":"c0"}"#).unwrap();
        assert_eq!(s, SpaceDescriptor::C0);
        let s = SpaceDescriptor::parse(r#"{"kind":"fin","d":3,"p":"2"}"#).unwrap();
        assert_eq!(s, SpaceDescriptor::FiniteDim { d: 3, norm: Norm::Lp(2) });
        assert_eq!(SpaceDescriptor::parse(r#"{"kind":"lp","p":"1"}"#).unwrap(), SpaceDescriptor::LpSequence { p: 1 });
        assert!(SpaceDescriptor::parse(r#"{"kind":"lp","p":"inf"}"#).is_err());
        assert!(SpaceDescriptor::parse(r#"{"kind":"lp","p":"3/2"}"#).is_err());
        assert!(SpaceDescriptor::parse(r#"{"kind":"fin","d":0}"#).is_err());
        assert!(SpaceDescriptor::parse(r#"{"kind":"c0","q":1}"#).is_err());
        for s in [
            SpaceDescriptor::C0,
            SpaceDescriptor::LInfty,
            SpaceDescriptor::LpSequence { p: 2 },
            SpaceDescriptor::FiniteDim { d: 2, norm: Norm::Sup },
        ] {
            assert_eq!(SpaceDescriptor::parse(&s.to_string()).unwrap(), s);
        }
    }

    #[test]
    fn info_table() {
        let c0 = space_info(&SpaceDescriptor::C0);
        assert!(c0.cobounded && !c0.strongly_discrete);
        assert_eq!(c0.codiameter.to_string(), "1/2");
        assert_eq!(
            serde_json::to_string(&c0).unwrap(),
            r#"{"epsilon_lambda":"1","codiameter":"1/2","cobounded":true,"strongly_discrete":false}"#
        );
        let lp = space_info(&SpaceDescriptor::LpSequence { p: 1 });
        assert!(!lp.cobounded);
        assert_eq!(lp.codiameter, Codiameter::Infinite);
        for d in [1, 3, 17] {
            let fin = space_info(&SpaceDescriptor::FiniteDim { d, norm: Norm::Sup });
            assert_eq!(fin.codiameter.to_string(), "1/2");
            assert!(fin.strongly_discrete && fin.cobounded);
        }
        let fin = space_info(&SpaceDescriptor::FiniteDim { d: 3, norm: Norm::Lp(2) });
        assert_eq!(fin.codiameter, Codiameter::Finite(DistValue { norm: Norm::Lp(2), value: rat(3, 4) }));
        assert_eq!(fin.epsilon_lambda, int(1));
    }

    #[test]
    fn lp_codiameter_grows_without_bound() {
        // x_k = (1/2, …, 1/2) with k entries sits at distance k/2 from ℤ^∞
        let space = SpaceDescriptor::LpSequence { p: 1 };
        for k in [1u64, 4, 10] {
            let x = SparseRationalVector::from_entries((1..=k).map(|i| (i, rat(1, 2)))).unwrap();
            let (_, d) = nearest_point_scaled(&space, &x, &big(1)).unwrap();
            assert_eq!(d.value, rat(k as i64, 2));
        }
    }

    #[test]
    fn distance_examples() {
        let sup = SpaceDescriptor::FiniteDim { d: 1, norm: Norm::Sup };
        let x = SparseRationalVector::from_dense(&[rat(2, 5)]);
        let r = SparseRationalVector::from_dense(&[rat(1, 2)]);
        assert_eq!(distance(&sup, &x, &r).unwrap().value, rat(1, 10));
        let l2 = SpaceDescriptor::LpSequence { p: 2 };
        let d = distance(&l2, &SparseRationalVector::zero(), &SparseRationalVector::unit(1)).unwrap();
        assert_eq!(d, DistValue { norm: Norm::Lp(2), value: int(1) });
        let l1 = SpaceDescriptor::FiniteDim { d: 2, norm: Norm::Lp(1) };
        let x = SparseRationalVector::from_dense(&[rat(1, 2), rat(1, 2)]);
        assert_eq!(distance(&l1, &x, &SparseRationalVector::zero()).unwrap().value, int(1));
        let out = SparseRationalVector::unit(3);
        assert!(matches!(
            distance(&l1, &out, &x),
            Err(Error::DimensionMismatch { index: 3, dim: 2 })
        ));
    }

    #[test]
    fn nearest_point_examples() {
        let sup2 = SpaceDescriptor::FiniteDim { d: 2, norm: Norm::Sup };
        let x = SparseRationalVector::from_dense(&[rat(2, 5), rat(-17, 10)]);
        let (p, d) = nearest_point_scaled(&sup2, &x, &big(1)).unwrap();
        assert_eq!(p, SparseRationalVector::from_dense(&[int(0), int(-2)]));
        assert_eq!(d.value, rat(2, 5));
        let sup1 = SpaceDescriptor::FiniteDim { d: 1, norm: Norm::Sup };
        let x = SparseRationalVector::from_dense(&[rat(1, 2)]);
        let (p, d) = nearest_point_scaled(&sup1, &x, &big(3)).unwrap();
        assert_eq!(p.get(1), int(1));
        assert_eq!(d.value, rat(1, 6));
    }

    #[test]
    fn linfty_distance_is_max_of_coordinate_distances() {
        let x = SparseRationalVector::from_dense(&[rat(1, 7), rat(5, 9), rat(-3, 11)]);
        let q = 4u64;
        let (_, d) = nearest_point_scaled(&SpaceDescriptor::LInfty, &x, &big(q)).unwrap();
        let expect = x
            .iter()
            .map(|(_, xi)| crate::arith::dist_to_integers(&(xi * int(q as i64))) / int(q as i64))
            .max()
            .unwrap();
        assert_eq!(d.value, expect);
    }

    #[test]
    fn separated_basis_examples() {
        let c0 = SpaceDescriptor::C0;
        let b = separated_basis(&c0, 3).unwrap();
        for i in 0..3 {
            assert_eq!(norm_of(&c0, &b[i]).unwrap().value, int(1));
            for j in 0..i {
                assert_eq!(distance(&c0, &b[i], &b[j]).unwrap().value, int(1));
            }
        }
        let l1 = SpaceDescriptor::LpSequence { p: 1 };
        let b = separated_basis(&l1, 2).unwrap();
        assert_eq!(distance(&l1, &b[0], &b[1]).unwrap().value, int(2));
        let l2 = SpaceDescriptor::LpSequence { p: 2 };
        let b = separated_basis(&l2, 2).unwrap();
        assert_eq!(distance(&l2, &b[0], &b[1]).unwrap().value, int(2));
        let fin = SpaceDescriptor::FiniteDim { d: 2, norm: Norm::Sup };
        assert!(separated_basis(&fin, 3).is_err());
    }

    #[test]
    fn far_point_examples() {
        let l1 = SpaceDescriptor::LpSequence { p: 1 };
        let w = far_point(&l1, &int(2), &rat(1, 10)).unwrap();
        assert_eq!(w.expand(10).unwrap(), SparseRationalVector::from_dense(&vec![rat(1, 2); 4]));
        assert_eq!(dist_block_to_scaled_lattice(&l1, &w, &big(1)).unwrap().value, int(2));

        let w = far_point(&l1, &rat(1, 2), &rat(1, 10)).unwrap();
        assert_eq!(w.expand(10).unwrap(), SparseRationalVector::from_dense(&[rat(1, 2)]));

        let l2 = SpaceDescriptor::LpSequence { p: 2 };
        let w = far_point(&l2, &int(2), &rat(1, 10)).unwrap();
        assert_eq!(w.support_len(), big(16));
        assert_eq!(Norm::Lp(2).of_block(&w).value, int(4));
        let d = dist_block_to_scaled_lattice(&l2, &w, &big(1)).unwrap();
        assert_eq!(d.value, int(4));
        assert_eq!(d.cmp_length(&int(2)), Ordering::Equal);

        assert!(far_point(&SpaceDescriptor::C0, &int(1), &rat(1, 2)).is_err());
    }

    #[test]
    fn block_distance_agrees_with_sparse() {
        let space = SpaceDescriptor::LpSequence { p: 2 };
        let w = BlockVector::prefix_block(big(5), rat(2, 7))
            .add_sparse(&SparseRationalVector::from_entries(vec![(2, rat(1, 3)), (8, rat(-5, 4))]).unwrap());
        let dense = w.expand(100).unwrap();
        for q in 1..12u64 {
            let a = dist_block_to_scaled_lattice(&space, &w, &big(q)).unwrap();
            let (_, b) = nearest_point_scaled(&space, &dense, &big(q)).unwrap();
            assert_eq!(a, b, "q = {q}");
        }
    }

    #[test]
    fn reduced_heights() {
        let p = SparseRationalVector::from_dense(&[int(2), int(4)]);
        assert_eq!(reduced_height(&p, &big(6)), big(3));
        assert_eq!(reduced_height(&SparseRationalVector::zero(), &big(6)), big(1));
    }
}
