//! Approximation engines: best approximations under a height bound,
//! Dirichlet witnesses, rounding witnesses in cobounded spaces, and
//! badly-approximable certificates over height windows.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{exact_root, format_rational, from_biguint, pow, Rational};
use crate::error::{Error, Result};
use crate::function::{compare_threshold, ApproxFunction, ThresholdOrdering};
use crate::interval::Enclosure;
use crate::metric::{height_std, DistValue, Norm};
use crate::spaces::{nearest_point_scaled, space_info, Codiameter, SpaceDescriptor};
use crate::vector::SparseRationalVector;

/// Precision for irrational ratios in certificates.
pub const RATIO_PREC: u32 = 512;

/// Largest support the exhaustive candidate search accepts (3^k candidates
/// per denominator).
pub const MAX_SEARCH_COORDS: usize = 12;

/// The inequality a witness certifies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bound {
    pub statement: String,
    pub holds: bool,
    /// False only if an enclosure comparison hit the equality tolerance.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub r: SparseRationalVector,
    /// Reduced height `H_std(r)`.
    pub height: BigUint,
    pub dist: DistValue,
    pub bound: Option<Bound>,
}

impl Serialize for WitnessReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("WitnessReport", 4)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("height", &self.height.to_string())?;
        st.serialize_field("dist", &self.dist)?;
        st.serialize_field("bound", &self.bound)?;
        st.end()
    }
}

/// A ratio `dist/ψ(h)`: exact when rational, otherwise a 512-bit enclosure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatioValue {
    Exact(Rational),
    Enclosed(Enclosure),
}

impl RatioValue {
    pub fn lower(&self) -> &Rational {
        match self {
            RatioValue::Exact(r) => r,
            RatioValue::Enclosed(e) => &e.lo,
        }
    }

    pub fn upper(&self) -> &Rational {
        match self {
            RatioValue::Exact(r) => r,
            RatioValue::Enclosed(e) => &e.hi,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            RatioValue::Exact(r) => Some(r),
            RatioValue::Enclosed(_) => None,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.lower().is_positive()
    }

    /// Orders two ratios; overlapping enclosures count as equal.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        if let (RatioValue::Exact(a), RatioValue::Exact(b)) = (self, other) {
            return a.cmp(b);
        }
        if self.upper() < other.lower() {
            Ordering::Less
        } else if self.lower() > other.upper() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    }

    /// True when `self ≥ t` is certain.
    pub fn certainly_ge(&self, t: &Rational) -> bool {
        self.lower() >= t
    }

    pub fn certainly_ge_ratio(&self, other: &RatioValue) -> bool {
        self.lower() >= other.upper()
    }
}

impl Serialize for RatioValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        match self {
            RatioValue::Exact(r) => {
                let mut st = s.serialize_struct("RatioValue", 2)?;
                st.serialize_field("exact", &true)?;
                st.serialize_field("value", &format_rational(r))?;
                st.end()
            }
            RatioValue::Enclosed(e) => {
                let mut st = s.serialize_struct("RatioValue", 3)?;
                st.serialize_field("exact", &false)?;
                st.serialize_field("lo", &format_rational(&e.lo))?;
                st.serialize_field("hi", &format_rational(&e.hi))?;
                st.end()
            }
        }
    }
}

/// `f(h)` as used by ratio computations.
#[derive(Debug, Clone)]
enum FValue {
    Exact(Rational),
    Enclosed(Enclosure),
}

fn f_value(f: &ApproxFunction, h: &BigUint) -> Result<FValue> {
    Ok(match f.exact_value(h)? {
        Some(v) => FValue::Exact(v),
        None => FValue::Enclosed(f.enclose(h, RATIO_PREC + 16)?),
    })
}

fn ratio_of(d: &DistValue, fv: &FValue) -> RatioValue {
    let p = d.norm.power();
    match fv {
        FValue::Exact(v) => {
            let r = &d.value / pow(v, p);
            if p == 1 {
                return RatioValue::Exact(r);
            }
            match exact_root(&r, p) {
                Some(x) => RatioValue::Exact(x),
                None => RatioValue::Enclosed(Enclosure::exact(r).root(p, RATIO_PREC)),
            }
        }
        FValue::Enclosed(e) => {
            let ep = e.powi(i64::from(p), RATIO_PREC + 16);
            let raw = Enclosure::new(&d.value / &ep.hi, &d.value / &ep.lo);
            if d.value.is_zero() {
                return RatioValue::Exact(Rational::zero());
            }
            RatioValue::Enclosed(raw.root(p, RATIO_PREC))
        }
    }
}

/// `dist/f(h)` for one witness.
pub fn ratio(d: &DistValue, f: &ApproxFunction, h: &BigUint) -> Result<RatioValue> {
    Ok(ratio_of(d, &f_value(f, h)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateReport {
    pub min_ratio: RatioValue,
    pub witness: WitnessReport,
    pub height_window: (u64, u64),
}

impl Serialize for CertificateReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CertificateReport", 3)?;
        st.serialize_field("min_ratio", &self.min_ratio)?;
        st.serialize_field("witness", &self.witness)?;
        st.serialize_field("height_window", &[self.height_window.0, self.height_window.1])?;
        st.end()
    }
}

/// One coordinate's contribution to a candidate: the integer numerator and
/// the residual `|x_i − p_i/q|` (raised to the norm's power).
struct CoordOption {
    p: BigInt,
    residual: Rational,
    // gcd(q, p)
    g: BigUint,
}

/// Exhaustive candidate enumeration at a fixed denominator `q`: every
/// coordinate ranges over `⌊q·x_i⌋ + {−1, 0, 1}`.
struct CandidateScan<'a> {
    norm: Norm,
    coords: Vec<u64>,
    x: &'a SparseRationalVector,
}

struct Candidate {
    p: Vec<BigInt>,
    height: BigUint,
    dist: DistValue,
}

impl<'a> CandidateScan<'a> {
    fn new(space: &SpaceDescriptor, x: &'a SparseRationalVector) -> Result<Self> {
        space.check_point(x)?;
        let coords: Vec<u64> = match space.dimension() {
            Some(d) => (1..=d).collect(),
            // zeroing an off-support coordinate never increases distance or height
            None => x.support().collect(),
        };
        if coords.len() > MAX_SEARCH_COORDS {
            return Err(Error::InvalidArgument(format!(
                "exhaustive search over {} coordinates exceeds the limit of {MAX_SEARCH_COORDS}",
                coords.len()
            )));
        }
        Ok(CandidateScan {
            norm: space.norm(),
            coords,
            x,
        })
    }

    fn options(&self, q: u64) -> Vec<Vec<CoordOption>> {
        let qb = BigUint::from(q);
        let qr = Rational::from_integer(BigInt::from(q));
        self.coords
            .iter()
            .map(|&i| {
                let xi = self.x.get(i);
                let f = (&xi * &qr).floor().to_integer();
                (-1i32..=1)
                    .map(|k| {
                        let p = &f + BigInt::from(k);
                        let res = (&xi - Rational::new(p.clone(), BigInt::from(q))).abs();
                        CoordOption {
                            g: qb.gcd(p.magnitude()),
                            residual: pow(&res, self.norm.power()),
                            p,
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Calls `visit` for every candidate at denominator `q`, in
    /// lexicographic order of `p`.
    fn for_each(&self, q: u64, mut visit: impl FnMut(Candidate)) {
        let opts = self.options(q);
        let k = opts.len();
        let qb = BigUint::from(q);
        let mut idx = vec![0usize; k];
        loop {
            let mut value = Rational::zero();
            let mut g = qb.clone();
            for (c, &j) in idx.iter().enumerate() {
                let o = &opts[c][j];
                value = match self.norm {
                    Norm::Sup => value.max(o.residual.clone()),
                    Norm::Lp(_) => value + &o.residual,
                };
                g = g.gcd(&o.g);
            }
            visit(Candidate {
                p: idx.iter().enumerate().map(|(c, &j)| opts[c][j].p.clone()).collect(),
                height: &qb / g,
                dist: DistValue {
                    norm: self.norm,
                    value,
                },
            });
            // odometer
            let mut c = k;
            loop {
                if c == 0 {
                    return;
                }
                c -= 1;
                idx[c] += 1;
                if idx[c] < 3 {
                    break;
                }
                idx[c] = 0;
            }
        }
    }

    fn point(&self, p: &[BigInt], q: u64) -> SparseRationalVector {
        let mut r = SparseRationalVector::zero();
        for (&i, pi) in self.coords.iter().zip(p) {
            r.add_at(i, &Rational::new(pi.clone(), BigInt::from(q)));
        }
        r
    }
}

/// Deterministic preference between two equally good witnesses: smaller
/// height, then lexicographically smaller point.
fn prefer(a_height: &BigUint, a: &SparseRationalVector, b_height: &BigUint, b: &SparseRationalVector) -> bool {
    match a_height.cmp(b_height) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.lex_cmp(b) == Ordering::Less,
    }
}

/// Minimizes `‖x − p/q‖` over `q ≤ Q` and the rounding neighbourhood of
/// `q·x`. Infinite-dimensional searches stay inside `supp(x)`.
pub fn best_approx(space: &SpaceDescriptor, x: &SparseRationalVector, max_height: u64) -> Result<WitnessReport> {
    if max_height == 0 {
        return Err(Error::InvalidArgument("height bound must be at least 1".into()));
    }
    let scan = CandidateScan::new(space, x)?;
    let mut best: Option<WitnessReport> = None;
    for q in 1..=max_height {
        scan.for_each(q, |c| {
            let better = match &best {
                None => true,
                Some(b) => match c.dist.value.cmp(&b.dist.value) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => {
                        c.height <= b.height && {
                            let r = scan.point(&c.p, q);
                            prefer(&c.height, &r, &b.height, &b.r)
                        }
                    }
                },
            };
            if better {
                best = Some(WitnessReport {
                    r: scan.point(&c.p, q),
                    height: c.height,
                    dist: c.dist,
                    bound: None,
                });
            }
        });
    }
    Ok(best.expect("at least one candidate"))
}

/// Dirichlet's theorem in `ℝ^d` with the sup norm: some `q ≤ Q` and
/// integer `p` satisfy `‖x − p/q‖^d · q^d · Q ≤ 1`.
///
/// Scans `q = 1..=Q` with coordinate rounding and returns the passing
/// denominator whose approximation is closest (ties: smaller `q`). Finding
/// none means the theorem failed, reported as an invariant violation.
pub fn dirichlet_witness_finite(d: u64, x: &SparseRationalVector, max_height: u64) -> Result<WitnessReport> {
    if max_height == 0 {
        return Err(Error::InvalidArgument("Q must be at least 1".into()));
    }
    let space = SpaceDescriptor::finite(d, Norm::Sup)?;
    space.check_point(x)?;
    // integer form: x_i = a_i / B
    let big_b = height_std(x);
    let b = BigInt::from(big_b.clone());
    let a: Vec<BigInt> = (1..=d)
        .map(|i| (x.get(i) * from_biguint(&big_b)).to_integer())
        .collect();
    let two_b = &b * 2;
    let exp = usize::try_from(d).map_err(|_| Error::InvalidArgument("dimension too large".into()))?;
    let bd = num_traits::pow(b.clone(), exp);
    let big_q = BigInt::from(max_height);
    // best so far: (max residual r, q) with dist = r/(q·B)
    let mut best: Option<(BigInt, u64, Vec<BigInt>)> = None;
    for q in 1..=max_height {
        let qi = BigInt::from(q);
        let mut p = Vec::with_capacity(a.len());
        let mut worst = BigInt::zero();
        for ai in &a {
            // round half down: ceil((2qa − B) / 2B)
            let num: BigInt = &qi * ai * 2 - &b;
            let pi = Integer::div_ceil(&num, &two_b);
            let r = (&qi * ai - &pi * &b).abs();
            worst = worst.max(r);
            p.push(pi);
        }
        if num_traits::pow(worst.clone(), exp) * &big_q > bd {
            continue;
        }
        let better = match &best {
            None => true,
            // worst/q < best_worst/best_q
            Some((bw, bq, _)) => &worst * BigInt::from(*bq) < bw * &qi,
        };
        if better {
            best = Some((worst, q, p));
        }
    }
    let (worst, q, p) = best.ok_or_else(|| {
        Error::InvariantViolation(format!(
            "no q <= {max_height} satisfies the Dirichlet bound for {}",
            serde_json::to_string(x).unwrap_or_default()
        ))
    })?;
    let mut r = SparseRationalVector::zero();
    for (k, pi) in p.into_iter().enumerate() {
        r.add_at(k as u64 + 1, &Rational::new(pi, BigInt::from(q)));
    }
    let dist_value = Rational::new(worst, BigInt::from(q) * &b);
    // re-verify in rationals
    let dist = space.norm().of_sparse(&x.sub(&r));
    if dist.value != dist_value {
        return Err(Error::InvariantViolation("integer and rational distances disagree".into()));
    }
    let lhs = pow(&dist.value, d as u32)
        * pow(&Rational::from_integer(BigInt::from(q)), d as u32)
        * Rational::from_integer(big_q);
    let holds = lhs <= Rational::one();
    if !holds {
        return Err(Error::InvariantViolation("Dirichlet witness failed re-verification".into()));
    }
    Ok(WitnessReport {
        height: height_std(&r),
        r,
        dist,
        bound: Some(Bound {
            statement: format!("‖x − p/q‖_∞^{d} · q^{d} · Q ≤ 1 with q = {q}, Q = {max_height}"),
            holds,
            exact: true,
        }),
    })
}

/// Rounding witness in a cobounded space: `p = round(q·x)` satisfies
/// `‖x − p/q‖ ≤ codiam/q`, which implies `≤ (codiam + eps)/q`.
pub fn dirichlet_rounding(
    space: &SpaceDescriptor,
    x: &SparseRationalVector,
    q: &BigUint,
    eps: &Rational,
) -> Result<WitnessReport> {
    let info = space_info(space);
    let codiam = match &info.codiameter {
        Codiameter::Finite(c) => c.clone(),
        Codiameter::Infinite => {
            return Err(Error::Precondition(format!("{space} is not cobounded")));
        }
    };
    if !eps.is_positive() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let (p, dist) = nearest_point_scaled(space, x, q)?;
    let qr = from_biguint(q);
    let pw = space.norm().power();
    // dist^p ≤ codiam^p / q^p
    let strong = codiam.value.clone() / pow(&qr, pw);
    if dist.value > strong {
        return Err(Error::InvariantViolation(format!(
            "rounding distance exceeds codiam/q for q = {q}"
        )));
    }
    let r = p.scale(&qr.recip());
    Ok(WitnessReport {
        height: height_std(&r),
        r,
        dist,
        bound: Some(Bound {
            statement: format!(
                "‖x − p/q‖ ≤ codiam/q = ({})/{q} ≤ (codiam + {})/q",
                codiam.display_length(),
                format_rational(eps)
            ),
            holds: true,
            exact: true,
        }),
    })
}

/// Smallest `dist(x, r)/f(H(r))` over rationals `r` of reduced height in
/// `[lo, hi]`.
///
/// Candidates come from the rounding neighbourhood of `q·x` for every
/// `q ∈ [lo, hi]`; a candidate found at `q` is attributed to its reduced
/// height. The window must stay below `H_std(x)`, otherwise `r = x` gives
/// ratio zero.
pub fn min_ratio(
    space: &SpaceDescriptor,
    x: &SparseRationalVector,
    f: &ApproxFunction,
    lo: u64,
    hi: u64,
) -> Result<CertificateReport> {
    if lo == 0 || lo > hi {
        return Err(Error::Precondition(format!("bad height window [{lo}, {hi}]")));
    }
    let hx = height_std(x);
    if BigUint::from(hi) >= hx {
        return Err(Error::Precondition(format!(
            "window [{lo}, {hi}] reaches H_std(x) = {hx}: x itself would be a witness"
        )));
    }
    if BigUint::from(lo) < BigUint::from(f.min_argument()) {
        return Err(Error::Precondition(format!(
            "{f} is only defined from q = {}",
            f.min_argument()
        )));
    }
    let scan = CandidateScan::new(space, x)?;
    let mut fcache: HashMap<BigUint, FValue> = HashMap::new();
    let lo_b = BigUint::from(lo);
    let mut best: Option<(RatioValue, WitnessReport)> = None;
    let mut failure: Option<Error> = None;
    for q in lo..=hi {
        scan.for_each(q, |c| {
            if failure.is_some() || c.height < lo_b {
                return;
            }
            let fv = match fcache.get(&c.height) {
                Some(v) => v.clone(),
                None => match f_value(f, &c.height) {
                    Ok(v) => {
                        fcache.insert(c.height.clone(), v.clone());
                        v
                    }
                    Err(e) => {
                        failure = Some(e);
                        return;
                    }
                },
            };
            let rv = ratio_of(&c.dist, &fv);
            let better = match &best {
                None => true,
                Some((br, bw)) => match rv.cmp_value(br) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => {
                        c.height <= bw.height && {
                            let r = scan.point(&c.p, q);
                            prefer(&c.height, &r, &bw.height, &bw.r)
                        }
                    }
                },
            };
            if better {
                let r = scan.point(&c.p, q);
                best = Some((
                    rv,
                    WitnessReport {
                        r,
                        height: c.height,
                        dist: c.dist,
                        bound: None,
                    },
                ));
            }
        });
        if let Some(e) = failure.take() {
            return Err(e);
        }
    }
    let (min_ratio, mut witness) = best.expect("window is nonempty");
    witness.bound = Some(Bound {
        statement: format!(
            "dist(x, r) ≥ ε·{f}(H(r)) for every r with H(r) in [{lo}, {hi}], ε = min ratio"
        ),
        holds: true,
        exact: min_ratio.exact().is_some(),
    });
    Ok(CertificateReport {
        min_ratio,
        witness,
        height_window: (lo, hi),
    })
}

/// Checks that bands are nonempty, disjoint and increasing.
pub fn validate_bands(bands: &[(u64, u64)]) -> Result<()> {
    if bands.is_empty() {
        return Err(Error::Precondition("at least one band is required".into()));
    }
    let mut prev_hi: Option<u64> = None;
    for &(lo, hi) in bands {
        if lo == 0 || lo > hi {
            return Err(Error::Precondition(format!("bad band [{lo}, {hi}]")));
        }
        if let Some(p) = prev_hi {
            if lo <= p {
                return Err(Error::Precondition("bands must be disjoint and increasing".into()));
            }
        }
        prev_hi = Some(hi);
    }
    Ok(())
}

/// Per-band minimal ratios for `φ`.
pub fn banded_min_ratio(
    space: &SpaceDescriptor,
    x: &SparseRationalVector,
    phi: &ApproxFunction,
    bands: &[(u64, u64)],
) -> Result<Vec<CertificateReport>> {
    validate_bands(bands)?;
    bands
        .iter()
        .map(|&(lo, hi)| min_ratio(space, x, phi, lo, hi))
        .collect()
}

/// Lower bound `min_{q ∈ [lo, hi]} ψ(q)/φ(q)` as a rational (exact when
/// every value is rational, otherwise a certified lower endpoint).
pub fn band_min_quotient(psi: &ApproxFunction, phi: &ApproxFunction, lo: u64, hi: u64) -> Result<Rational> {
    let mut best: Option<Rational> = None;
    for q in lo..=hi {
        let qb = BigUint::from(q);
        let num = match psi.exact_value(&qb)? {
            Some(v) => v,
            None => psi.enclose(&qb, RATIO_PREC)?.lo,
        };
        let den = match phi.exact_value(&qb)? {
            Some(v) => v,
            None => phi.enclose(&qb, RATIO_PREC)?.hi,
        };
        let v = num / den;
        best = Some(match best {
            Some(b) if b <= v => b,
            _ => v,
        });
    }
    best.ok_or_else(|| Error::Precondition("empty band".into()))
}

/// Re-verifies a witness's inequality `dist ≤ scale·f(height)`.
pub fn check_witness(w: &WitnessReport, scale: &Rational, f: &ApproxFunction) -> Result<ThresholdOrdering> {
    compare_threshold(&w.dist, scale, f, &w.height)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::function::psi_int;

    fn sup(d: u64) -> SpaceDescriptor {
        SpaceDescriptor::FiniteDim { d, norm: Norm::Sup }
    }

    fn pt(v: &[Rational]) -> SparseRationalVector {
        SparseRationalVector::from_dense(v)
    }

    #[test]
    fn best_approx_examples() {
        let w = best_approx(&sup(1), &pt(&[rat(13, 21)]), 8).unwrap();
        assert_eq!(w.r, pt(&[rat(5, 8)]));
        assert_eq!(w.dist.value, rat(1, 168));
        assert_eq!(w.height, BigUint::from(8u32));

        let w = best_approx(&sup(2), &pt(&[int(3), int(-1)]), 1).unwrap();
        assert!(w.dist.is_zero());

        let w = best_approx(&sup(2), &pt(&[rat(1, 2), rat(1, 3)]), 2).unwrap();
        assert_eq!(w.r, pt(&[rat(1, 2), rat(1, 2)]));
        assert_eq!(w.dist.value, rat(1, 6));
    }

    #[test]
    fn dirichlet_examples() {
        let w = dirichlet_witness_finite(1, &pt(&[rat(3, 10)]), 3).unwrap();
        assert_eq!(w.r, pt(&[rat(1, 3)]));
        assert_eq!(w.dist.value, rat(1, 30));
        assert!(w.bound.as_ref().unwrap().holds);

        let w = dirichlet_witness_finite(1, &pt(&[int(4)]), 5).unwrap();
        assert_eq!(w.height, BigUint::one());
        assert!(w.dist.is_zero());

        let w = dirichlet_witness_finite(2, &pt(&[rat(1, 2), rat(1, 3)]), 2).unwrap();
        assert_eq!(w.height, BigUint::from(2u32));
        assert_eq!(w.dist.value, rat(1, 6));
        // (1/6)^2 ≤ 1/(2^2 · 2)
        assert!(pow(&w.dist.value, 2) <= rat(1, 8));
    }

    #[test]
    fn rounding_examples() {
        let x = pt(&[rat(1, 3)]);
        let w = dirichlet_rounding(&SpaceDescriptor::C0, &x, &BigUint::from(3u32), &rat(1, 100)).unwrap();
        assert!(w.dist.is_zero());

        let x = pt(&[rat(1, 2), rat(1, 5)]);
        let w = dirichlet_rounding(&SpaceDescriptor::C0, &x, &BigUint::from(5u32), &rat(1, 100)).unwrap();
        assert_eq!(w.r, pt(&[rat(2, 5), rat(1, 5)]));
        assert_eq!(w.dist.value, rat(1, 10));

        let x = pt(&[rat(3, 7), rat(-5, 9), rat(1, 8)]);
        let w = dirichlet_rounding(&SpaceDescriptor::LInfty, &x, &BigUint::from(4u32), &rat(1, 2)).unwrap();
        assert!(w.dist.value <= rat(1, 8));

        let err = dirichlet_rounding(&SpaceDescriptor::LpSequence { p: 1 }, &x, &BigUint::from(4u32), &rat(1, 2));
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn min_ratio_examples() {
        let x = pt(&[rat(13, 21)]);
        let c = min_ratio(&sup(1), &x, &psi_int(2), 1, 8).unwrap();
        assert_eq!(c.min_ratio, RatioValue::Exact(rat(8, 21)));
        // attained at q = 1 first (smaller height wins the tie with q = 8)
        assert_eq!(c.witness.height, BigUint::one());

        assert!(matches!(min_ratio(&sup(1), &x, &psi_int(2), 1, 21), Err(Error::Precondition(_))));
        assert!(min_ratio(&sup(1), &x, &psi_int(2), 5, 4).is_err());

        // ψ_0 ≡ 1: min ratio is the best distance
        for q in [3u64, 7, 12] {
            let y = pt(&[rat(29, 97)]);
            let c = min_ratio(&sup(1), &y, &psi_int(0), 1, q).unwrap();
            let b = best_approx(&sup(1), &y, q).unwrap();
            assert_eq!(c.min_ratio, RatioValue::Exact(b.dist.value));
        }
    }

    #[test]
    fn irrational_ratios_are_enclosed() {
        let x = pt(&[rat(13, 21)]);
        let f = ApproxFunction::power_log(int(1), int(2), int(1)).unwrap();
        let c = min_ratio(&sup(1), &x, &f, 2, 8).unwrap();
        match &c.min_ratio {
            RatioValue::Enclosed(e) => assert!(e.lo.is_positive() && e.width() < rat(1, 1 << 30)),
            other => panic!("expected an enclosure, got {other:?}"),
        }
        let l2 = SpaceDescriptor::FiniteDim { d: 2, norm: Norm::Lp(2) };
        let y = pt(&[rat(1, 3), rat(2, 7)]);
        let c = min_ratio(&l2, &y, &psi_int(1), 1, 6).unwrap();
        assert!(c.min_ratio.is_positive());
    }

    #[test]
    fn banded_single_band_equals_min_ratio() {
        let x = pt(&[rat(13, 21)]);
        let banded = banded_min_ratio(&sup(1), &x, &psi_int(3), &[(1, 8)]).unwrap();
        let direct = min_ratio(&sup(1), &x, &psi_int(3), 1, 8).unwrap();
        assert_eq!(banded[0], direct);
        assert!(banded_min_ratio(&sup(1), &x, &psi_int(3), &[(1, 4), (4, 8)]).is_err());
        assert!(banded_min_ratio(&sup(1), &x, &psi_int(3), &[(5, 8), (1, 4)]).is_err());
    }

    #[test]
    fn band_quotients() {
        assert_eq!(band_min_quotient(&psi_int(2), &psi_int(3), 5, 8).unwrap(), int(5));
        assert_eq!(band_min_quotient(&psi_int(2), &psi_int(2), 5, 8).unwrap(), int(1));
    }
}
