//! Approximation functions `ψ` and exact threshold comparisons.
//!
//! Supported shapes are power–log germs `c·q^(-a)·(ln q)^(-b)`, staircases
//! `ψ_Q(q) = 1/(q·Q(q))` built from an increasing height sequence, and
//! pointwise minima of those.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{exact_root, format_rational, from_biguint, parse_rational, pow, pow_signed, Rational};
use crate::error::{Error, Result};
use crate::interval::{ln_enclosure, Enclosure};
use crate::metric::DistValue;

/// Strictly increasing, unbounded sequence `Q_1 < Q_2 < …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QSequence {
    /// `Q_n = 2^(2^(2n + offset))`.
    DoublyExp { offset: u32 },
    /// `Q_n = base^n`, `base ≥ 2`.
    Geometric { base: u32 },
}

impl QSequence {
    /// `Q_n` for `n ≥ 1`.
    pub fn term(&self, n: u32) -> BigUint {
        assert!(n >= 1, "height sequences are indexed from 1");
        match *self {
            QSequence::DoublyExp { offset } => {
                BigUint::one() << (1u64 << (2 * u64::from(n) + u64::from(offset)))
            }
            QSequence::Geometric { base } => num_traits::pow(BigUint::from(base), n as usize),
        }
    }

    /// Bit length of `Q_n` without building it.
    pub fn term_bits(&self, n: u32) -> u64 {
        match *self {
            QSequence::DoublyExp { offset } => {
                let e = 2 * u64::from(n) + u64::from(offset);
                if e >= 63 {
                    u64::MAX
                } else {
                    (1u64 << e) + 1
                }
            }
            QSequence::Geometric { base } => {
                u64::from(n) * (64 - u64::from(base).leading_zeros() as u64)
            }
        }
    }

    /// `(n, Q_n)` for the least `n` with `Q_n ≥ q`.
    pub fn cover(&self, q: &BigUint) -> (u32, BigUint) {
        let mut n = 1;
        loop {
            let t = self.term(n);
            if t >= *q {
                return (n, t);
            }
            n += 1;
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            QSequence::DoublyExp { offset } if offset > 40 => Err(Error::InvalidArgument(
                "doubly exponential offset too large".into(),
            )),
            QSequence::Geometric { base } if base < 2 => {
                Err(Error::InvalidArgument("geometric base must be at least 2".into()))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for QSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QSequence::DoublyExp { offset } => write!(f, "dexp:{offset}"),
            QSequence::Geometric { base } => write!(f, "geom:{base}"),
        }
    }
}

impl QSequence {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad height sequence {s:?}"));
        let (kind, arg) = s.trim().split_once(':').ok_or_else(bad)?;
        let arg: u32 = arg.trim().parse().map_err(|_| bad())?;
        let q = match kind.trim() {
            "dexp" => QSequence::DoublyExp { offset: arg },
            "geom" => QSequence::Geometric { base: arg },
            _ => return Err(bad()),
        };
        q.validate()?;
        Ok(q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ApproxFunction {
    /// `q ↦ c·q^(-a)·(ln q)^(-b)`.
    PowerLog { c: Rational, a: Rational, b: Rational },
    /// `q ↦ 1/(q·Q(q))`, `Q(q)` the least sequence term `≥ q`.
    PsiQ(QSequence),
    MinOf(Box<ApproxFunction>, Box<ApproxFunction>),
}

/// `ψ_s(q) = q^(-s)`.
pub fn psi_s(s: Rational) -> ApproxFunction {
    ApproxFunction::PowerLog {
        c: Rational::one(),
        a: s,
        b: Rational::zero(),
    }
}

pub fn psi_int(s: i64) -> ApproxFunction {
    psi_s(Rational::from_integer(BigInt::from(s)))
}

impl ApproxFunction {
    pub fn power_log(c: Rational, a: Rational, b: Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidArgument("power-log coefficient must be positive".into()));
        }
        Ok(ApproxFunction::PowerLog { c, a, b })
    }

    pub fn psi_q(seq: QSequence) -> Result<Self> {
        seq.validate()?;
        Ok(ApproxFunction::PsiQ(seq))
    }

    pub fn min_of(f: ApproxFunction, g: ApproxFunction) -> Self {
        ApproxFunction::MinOf(Box::new(f), Box::new(g))
    }

    /// Parses the specification grammar:
    /// `pow:<s>`, `powlog:<c>,<a>,<b>`, `psiQ:dexp:<i>`, `psiQ:geom:<b>`,
    /// `min(<spec>,<spec>)`.
    pub fn parse(s: &str) -> Result<Self> {
        let (f, rest) = parse_prefix(s.trim())?;
        if !rest.trim().is_empty() {
            return Err(Error::Parse(format!("trailing input {rest:?} in {s:?}")));
        }
        Ok(f)
    }

    /// Smallest admissible argument: 2 when a log factor is present.
    pub fn min_argument(&self) -> u32 {
        match self {
            ApproxFunction::PowerLog { b, .. } if !b.is_zero() => 2,
            ApproxFunction::PowerLog { .. } | ApproxFunction::PsiQ(_) => 1,
            ApproxFunction::MinOf(f, g) => f.min_argument().max(g.min_argument()),
        }
    }

    fn check_domain(&self, q: &BigUint) -> Result<()> {
        if *q < BigUint::from(self.min_argument()) {
            return Err(Error::Precondition(format!(
                "{self} is only defined for q >= {}, got {q}",
                self.min_argument()
            )));
        }
        Ok(())
    }

    /// True when `ψ(q) → 0`.
    pub fn decays(&self) -> bool {
        match self {
            ApproxFunction::PowerLog { a, b, .. } => a.is_positive() || (a.is_zero() && b.is_positive()),
            ApproxFunction::PsiQ(_) => true,
            ApproxFunction::MinOf(f, g) => f.decays() || g.decays(),
        }
    }

    /// True when `ψ` is nonincreasing on its whole domain.
    pub fn is_nonincreasing(&self) -> bool {
        match self {
            // d/dq log ψ = -(a ln q + b)/(q ln q); need a ln q + b >= 0 for q >= 2
            ApproxFunction::PowerLog { a, b, .. } => {
                if b.is_zero() {
                    !a.is_negative()
                } else if a.is_negative() {
                    false
                } else if !b.is_negative() {
                    true
                } else {
                    // a·ln 2 ≥ -b, decided with a 128-bit lower bound on ln 2
                    let ln2 = ln_enclosure(&BigUint::from(2u8), 128);
                    a * &ln2.lo >= -b.clone()
                }
            }
            ApproxFunction::PsiQ(_) => true,
            ApproxFunction::MinOf(f, g) => f.is_nonincreasing() && g.is_nonincreasing(),
        }
    }

    /// `ψ(q)` when it is rational, `None` when it is irrational.
    pub fn exact_value(&self, q: &BigUint) -> Result<Option<Rational>> {
        self.check_domain(q)?;
        Ok(match self {
            ApproxFunction::PowerLog { c, a, b } => {
                if !b.is_zero() {
                    // ln q is transcendental for integers q >= 2
                    None
                } else {
                    power_of_integer(q, &-a.clone()).map(|v| c * v)
                }
            }
            ApproxFunction::PsiQ(seq) => {
                let (_, big_q) = seq.cover(q);
                Some(Rational::new(BigInt::one(), BigInt::from(q * big_q)))
            }
            ApproxFunction::MinOf(f, g) => match (f.exact_value(q)?, g.exact_value(q)?) {
                (Some(x), Some(y)) => Some(x.min(y)),
                _ => None,
            },
        })
    }

    /// Outward-rounded enclosure of `ψ(q)` to about `prec` significant bits.
    pub fn enclose(&self, q: &BigUint, prec: u32) -> Result<Enclosure> {
        self.check_domain(q)?;
        if let Some(v) = self.exact_value(q)? {
            return Ok(Enclosure::exact(v));
        }
        Ok(match self {
            ApproxFunction::PowerLog { c, a, b } => {
                let work = prec + 16;
                let qpow = power_enclosure(&Enclosure::exact(from_biguint(q)), &-a.clone(), work);
                let lnq = ln_enclosure(q, work);
                let lpow = power_enclosure(&lnq, &-b.clone(), work);
                qpow.mul(&lpow).scale(c).round_out(prec)
            }
            ApproxFunction::PsiQ(_) => unreachable!("staircase values are rational"),
            ApproxFunction::MinOf(f, g) => {
                let x = f.enclose(q, prec)?;
                let y = g.enclose(q, prec)?;
                Enclosure::new(x.lo.min(y.lo), x.hi.min(y.hi))
            }
        })
    }
}

fn take_rational(s: &str) -> Result<(Rational, &str)> {
    let end = s
        .find(|c: char| !(c.is_ascii_digit() || c == '/' || c == '-' || c == '+'))
        .unwrap_or(s.len());
    Ok((parse_rational(&s[..end])?, &s[end..]))
}

fn expect<'a>(s: &'a str, token: &str) -> Result<&'a str> {
    s.trim_start()
        .strip_prefix(token)
        .ok_or_else(|| Error::Parse(format!("expected {token:?} at {s:?}")))
}

/// Parses one function spec from the front of `s`, returning the rest.
fn parse_prefix(s: &str) -> Result<(ApproxFunction, &str)> {
    let s = s.trim_start();
    if let Some(rest) = s.strip_prefix("min(") {
        let (f, rest) = parse_prefix(rest)?;
        let (g, rest) = parse_prefix(expect(rest, ",")?)?;
        let rest = expect(rest, ")")?;
        return Ok((ApproxFunction::min_of(f, g), rest));
    }
    if let Some(rest) = s.strip_prefix("pow:") {
        let (a, rest) = take_rational(rest)?;
        return Ok((psi_s(a), rest));
    }
    if let Some(rest) = s.strip_prefix("powlog:") {
        let (c, rest) = take_rational(rest)?;
        let (a, rest) = take_rational(expect(rest, ",")?)?;
        let (b, rest) = take_rational(expect(rest, ",")?)?;
        return Ok((ApproxFunction::power_log(c, a, b)?, rest));
    }
    if let Some(rest) = s.strip_prefix("psiQ:") {
        let end = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == ':'))
            .unwrap_or(rest.len());
        let seq = QSequence::parse(&rest[..end])?;
        return Ok((ApproxFunction::psi_q(seq)?, &rest[end..]));
    }
    Err(Error::Parse(format!("unknown approximation function {s:?}")))
}

/// `q^e` for a rational exponent, when the result is rational.
fn power_of_integer(q: &BigUint, e: &Rational) -> Option<Rational> {
    let u = e.numer().to_i64()?;
    let v = e.denom().to_u32()?;
    let base = pow_signed(&from_biguint(q), u);
    exact_root(&base, v)
}

/// Enclosure of `x^e` for a positive enclosure and rational exponent.
fn power_enclosure(x: &Enclosure, e: &Rational, prec: u32) -> Enclosure {
    let u = e.numer().to_i64().expect("exponent numerator fits in i64");
    let v = e.denom().to_u32().expect("exponent denominator fits in u32");
    x.powi(u, prec + 8).root(v, prec)
}

impl fmt::Display for ApproxFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApproxFunction::PowerLog { c, a, b } if c.is_one() && b.is_zero() => {
                write!(f, "pow:{}", format_rational(a))
            }
            ApproxFunction::PowerLog { c, a, b } => write!(
                f,
                "powlog:{},{},{}",
                format_rational(c),
                format_rational(a),
                format_rational(b)
            ),
            ApproxFunction::PsiQ(seq) => write!(f, "psiQ:{seq}"),
            ApproxFunction::MinOf(x, y) => write!(f, "min({x},{y})"),
        }
    }
}

impl Serialize for ApproxFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ApproxFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ApproxFunction::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Result of an exact-or-certified threshold comparison. `exact` is false
/// only when refinement hit the tolerance and the ordering was reported as
/// `Equal` without proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdOrdering {
    pub ordering: Ordering,
    pub exact: bool,
}

pub fn ordering_name(o: Ordering) -> &'static str {
    match o {
        Ordering::Less => "less",
        Ordering::Equal => "equal",
        Ordering::Greater => "greater",
    }
}

impl Serialize for ThresholdOrdering {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ThresholdOrdering", 2)?;
        st.serialize_field("ordering", ordering_name(self.ordering))?;
        st.serialize_field("exact", &self.exact)?;
        st.end()
    }
}

impl ThresholdOrdering {
    pub fn exact(ordering: Ordering) -> Self {
        ThresholdOrdering { ordering, exact: true }
    }

    pub fn is_le(&self) -> bool {
        self.ordering != Ordering::Greater
    }

    pub fn is_lt(&self) -> bool {
        self.ordering == Ordering::Less
    }
}

const START_PREC: u32 = 64;
const MAX_PREC: u32 = 8192;
const EQUALITY_TOLERANCE_BITS: i64 = 256;

/// Orders `dist` against `scale·f(q)`.
///
/// Rational thresholds are compared directly. For `b = 0` and `a = u/v`
/// both sides are raised to the `v`-th power so the comparison stays in
/// integers. Log factors fall back to enclosures refined until the
/// enclosure excludes the distance value, or its relative width drops below
/// `2^-256`, in which case the result is `Equal` with `exact = false`.
pub fn compare_threshold(
    d: &DistValue,
    scale: &Rational,
    f: &ApproxFunction,
    q: &BigUint,
) -> Result<ThresholdOrdering> {
    if !scale.is_positive() {
        return Err(Error::InvalidArgument("threshold scale must be positive".into()));
    }
    if q.is_zero() {
        return Err(Error::InvalidArgument("heights start at 1".into()));
    }
    f.check_domain(q)?;
    let p = d.norm.power();
    if let ApproxFunction::MinOf(f1, f2) = f {
        let o1 = compare_threshold(d, scale, f1, q)?;
        let o2 = compare_threshold(d, scale, f2, q)?;
        return Ok(combine_min(o1, o2));
    }
    if let Some(t) = f.exact_value(q)? {
        return Ok(ThresholdOrdering::exact(d.value.cmp(&pow(&(scale * t), p))));
    }
    if let ApproxFunction::PowerLog { c, a, b } = f {
        if b.is_zero() {
            // value^v  vs  (scale·c)^(p·v) · q^(-u·p)
            let u = a.numer().to_i64().ok_or_else(|| Error::InvalidArgument("exponent too large".into()))?;
            let v = a.denom().to_u32().ok_or_else(|| Error::InvalidArgument("exponent too large".into()))?;
            let lhs = pow(&d.value, v);
            let rhs = pow(&(scale * c), p * v) * pow_signed(&from_biguint(q), -u * i64::from(p));
            return Ok(ThresholdOrdering::exact(lhs.cmp(&rhs)));
        }
    }
    let mut prec = START_PREC;
    loop {
        let t = f.enclose(q, prec)?.scale(scale).powi(i64::from(p), prec);
        if let Some(o) = t.locate(&d.value) {
            return Ok(ThresholdOrdering::exact(o));
        }
        let tiny = &t.hi * Rational::new(BigInt::one(), BigInt::one() << EQUALITY_TOLERANCE_BITS);
        if t.width() <= tiny || prec >= MAX_PREC {
            return Ok(ThresholdOrdering {
                ordering: Ordering::Equal,
                exact: false,
            });
        }
        prec *= 2;
    }
}

fn combine_min(o1: ThresholdOrdering, o2: ThresholdOrdering) -> ThresholdOrdering {
    // dist vs min(A, B) is the larger of the two orderings
    let ordering = o1.ordering.max(o2.ordering);
    if ordering == Ordering::Greater {
        return ThresholdOrdering::exact(ordering);
    }
    let exact = [o1, o2].iter().filter(|o| o.ordering == ordering).all(|o| o.exact);
    ThresholdOrdering { ordering, exact }
}

/// Exact comparison of two rationals-or-enclosures: `f(q)` against a
/// rational, used for inverting thresholds.
pub fn cmp_value_to_rational(f: &ApproxFunction, q: &BigUint, t: &Rational) -> Result<ThresholdOrdering> {
    // f(q) vs t  ⇔  reverse of (t vs f(q))
    let d = DistValue {
        norm: crate::metric::Norm::Sup,
        value: t.clone(),
    };
    let o = compare_threshold(&d, &Rational::one(), f, q)?;
    Ok(ThresholdOrdering {
        ordering: o.ordering.reverse(),
        exact: o.exact,
    })
}

/// Limit behaviour of `f/g` as `q → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthVerdict {
    RatioToZero,
    RatioBounded,
    RatioToInfinity,
}

impl GrowthVerdict {
    pub fn mirror(self) -> Self {
        match self {
            GrowthVerdict::RatioToZero => GrowthVerdict::RatioToInfinity,
            GrowthVerdict::RatioBounded => GrowthVerdict::RatioBounded,
            GrowthVerdict::RatioToInfinity => GrowthVerdict::RatioToZero,
        }
    }
}

fn power_log_parts(f: &ApproxFunction) -> Result<(&Rational, &Rational)> {
    match f {
        ApproxFunction::PowerLog { a, b, .. } => Ok((a, b)),
        other => Err(Error::UnsupportedFunction(format!(
            "growth comparison only handles power-log germs, got {other}"
        ))),
    }
}

/// Compares power–log germs: `f/g → 0` iff `(a_f, b_f) > (a_g, b_g)`
/// lexicographically.
pub fn growth_compare(f: &ApproxFunction, g: &ApproxFunction) -> Result<GrowthVerdict> {
    let (af, bf) = power_log_parts(f)?;
    let (ag, bg) = power_log_parts(g)?;
    Ok(match (af, bf).cmp(&(ag, bg)) {
        Ordering::Greater => GrowthVerdict::RatioToZero,
        Ordering::Equal => GrowthVerdict::RatioBounded,
        Ordering::Less => GrowthVerdict::RatioToInfinity,
    })
}

/// Khinchin–Groshev dichotomy for `Σ q^d ψ(q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KhinchinVerdict {
    /// The series diverges: almost every point is `ψ`-approximable.
    SeriesDiverges,
    /// The series converges: the `ψ`-approximable points are Lebesgue null.
    SeriesConverges,
}

pub fn khinchin_classify(f: &ApproxFunction, d: u32) -> Result<KhinchinVerdict> {
    let (a, b) = power_log_parts(f)?;
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let d = Rational::from_integer(BigInt::from(d));
    if *a < d || (*a == d && b.is_negative()) {
        return Err(Error::Precondition(format!(
            "q^d·ψ(q) is not eventually nonincreasing for {f} and d = {d}"
        )));
    }
    let excess = a - &d;
    let converges = excess > Rational::one() || (excess.is_one() && *b > Rational::one());
    Ok(if converges {
        KhinchinVerdict::SeriesConverges
    } else {
        KhinchinVerdict::SeriesDiverges
    })
}
