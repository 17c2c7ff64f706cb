//! Comparing Dirichlet functions: staircase functions `ψ_Q`, the pair of
//! incomparable staircases, finite-scale refutation of faster-decaying
//! candidates, and the cover construction that improves `ψ_1` on `[0, 1]`.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::approx::{
    band_min_quotient, banded_min_ratio, dirichlet_witness_finite, min_ratio, validate_bands, Bound,
    CertificateReport, WitnessReport,
};
use crate::arith::{format_rational, from_biguint, pow, Rational};
use crate::error::{Error, Result};
use crate::function::{compare_threshold, growth_compare, ApproxFunction, GrowthVerdict, QSequence};
use crate::spaces::SpaceDescriptor;
use crate::vector::SparseRationalVector;

/// Largest `Q_n` that a witness scan will walk through.
pub const MAX_SCAN: u64 = 1 << 24;

/// `ψ_Q(q) = 1/(q·Q(q))`, `Q(q)` the least term `≥ q`.
pub fn make_psi_q(seq: QSequence) -> Result<ApproxFunction> {
    ApproxFunction::psi_q(seq)
}

/// A rational `p/q` with `q ≤ Q_n` and `|x − p/q| ≤ 1/(q·Q_n) ≤ ψ_Q(q)`.
pub fn psiq_witness(x: &Rational, seq: &QSequence, n: u32) -> Result<WitnessReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if x.is_negative() || *x > Rational::one() {
        return Err(Error::InvalidArgument("x must lie in [0, 1]".into()));
    }
    let bits = seq.term_bits(n);
    if bits > 64 || seq.term(n) > BigUint::from(MAX_SCAN) {
        return Err(Error::SizeCap {
            needed: bits,
            cap: 64 - MAX_SCAN.leading_zeros() as u64,
        });
    }
    let big_q = seq.term(n);
    let q_scan: u64 = big_q.to_string().parse().expect("fits after the cap check");
    let xv = SparseRationalVector::from_dense(std::slice::from_ref(x));
    let mut w = dirichlet_witness_finite(1, &xv, q_scan)?;
    let psi = ApproxFunction::PsiQ(seq.clone());
    // dist·q·Q_n ≤ 1 comes from the Dirichlet scan; Q(q) ≤ Q_n gives the rest
    let step1 = &w.dist.value * from_biguint(&(&w.height * &big_q)) <= Rational::one();
    let step2 = seq.cover(&w.height).1 <= big_q;
    let o = compare_threshold(&w.dist, &Rational::one(), &psi, &w.height)?;
    let holds = step1 && step2 && o.is_le() && o.exact;
    if !holds {
        return Err(Error::InvariantViolation(format!(
            "ψ_Q witness fails for x = {}",
            format_rational(x)
        )));
    }
    w.bound = Some(Bound {
        statement: format!("|x − p/q| ≤ 1/(q·Q_{n}) ≤ {psi}(q) with Q_{n} = {big_q}"),
        holds,
        exact: true,
    });
    Ok(w)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleRow {
    /// Which sequence `q` is taken from (0 or 1).
    pub sequence: u32,
    pub n: u32,
    pub q: BigUint,
    pub psi0: Rational,
    pub psi1: Rational,
    pub phi: Rational,
    /// `φ(q)·q³`.
    pub phi_q3: Rational,
    pub holds: bool,
}

impl Serialize for CounterexampleRow {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CounterexampleRow", 8)?;
        st.serialize_field("sequence", &self.sequence)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("q", &self.q.to_string())?;
        st.serialize_field("psi_Q0", &format_rational(&self.psi0))?;
        st.serialize_field("psi_Q1", &format_rational(&self.psi1))?;
        st.serialize_field("phi", &format_rational(&self.phi))?;
        st.serialize_field("phi_q3", &format_rational(&self.phi_q3))?;
        st.serialize_field("holds", &self.holds)?;
        st.end()
    }
}

/// Largest `n_max` accepted: `Q_n^{(1)}` has `2^(2n+1)` bits.
pub const MAX_COUNTEREXAMPLE_N: u32 = 10;

/// Tabulates `φ = min(ψ_{Q⁰}, ψ_{Q¹})` with `Q_n^{(i)} = 2^(2^(2n+i))` at
/// every `Q_n^{(i)}`, `n ≤ n_max`, checking `φ(q)·q³ ≤ 1`. Rows are
/// ordered by `q`.
pub fn strong_optimality_counterexample(n_max: u32) -> Result<Vec<CounterexampleRow>> {
    if n_max == 0 || n_max > MAX_COUNTEREXAMPLE_N {
        return Err(Error::InvalidArgument(format!(
            "n_max must be in 1..={MAX_COUNTEREXAMPLE_N}"
        )));
    }
    let s0 = QSequence::DoublyExp { offset: 0 };
    let s1 = QSequence::DoublyExp { offset: 1 };
    let f0 = ApproxFunction::PsiQ(s0.clone());
    let f1 = ApproxFunction::PsiQ(s1.clone());
    let phi = ApproxFunction::min_of(f0.clone(), f1.clone());
    let mut rows = Vec::with_capacity(2 * n_max as usize);
    for n in 1..=n_max {
        for (i, seq) in [(0u32, &s0), (1, &s1)] {
            let q = seq.term(n);
            let value = |f: &ApproxFunction| -> Result<Rational> {
                f.exact_value(&q)?
                    .ok_or_else(|| Error::InvariantViolation("staircase value is not rational".into()))
            };
            let (psi0, psi1, phiv) = (value(&f0)?, value(&f1)?, value(&phi)?);
            let phi_q3 = &phiv * pow(&from_biguint(&q), 3);
            rows.push(CounterexampleRow {
                sequence: i,
                n,
                holds: phi_q3 <= Rational::one(),
                q,
                psi0,
                psi1,
                phi: phiv,
                phi_q3,
            });
        }
    }
    rows.sort_by(|a, b| a.q.cmp(&b.q));
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefutationBand {
    pub band: (u64, u64),
    pub psi_certificate: CertificateReport,
    pub phi_certificate: CertificateReport,
    /// `min_{q ∈ band} ψ(q)/φ(q)` (a certified lower bound when irrational).
    pub quotient: Rational,
    /// `ε·quotient`; the φ-ratio on the band is at least this.
    pub lower_bound: Rational,
    pub holds: bool,
}

impl Serialize for RefutationBand {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RefutationBand", 6)?;
        st.serialize_field("band", &[self.band.0, self.band.1])?;
        st.serialize_field("psi_certificate", &self.psi_certificate)?;
        st.serialize_field("phi_certificate", &self.phi_certificate)?;
        st.serialize_field("quotient", &format_rational(&self.quotient))?;
        st.serialize_field("lower_bound", &format_rational(&self.lower_bound))?;
        st.serialize_field("holds", &self.holds)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefutationReport {
    pub eps: Rational,
    pub bands: Vec<RefutationBand>,
    /// Lower bounds never decrease from band to band.
    pub nondecreasing: bool,
}

impl Serialize for RefutationReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RefutationReport", 3)?;
        st.serialize_field("eps", &format_rational(&self.eps))?;
        st.serialize_field("bands", &self.bands)?;
        st.serialize_field("nondecreasing", &self.nondecreasing)?;
        st.end()
    }
}

/// Finite-scale evidence that `φ` with `φ/ψ → 0` is not a Dirichlet
/// function at `x`: on each band the `φ`-ratio is at least
/// `ε·min ψ/φ`, which grows without bound.
///
/// `eps` must be positive and at most the `ψ`-certificate of every band;
/// `None` uses the smallest certified lower endpoint over the bands.
pub fn refute_candidate(
    space: &SpaceDescriptor,
    x: &SparseRationalVector,
    eps: Option<&Rational>,
    psi: &ApproxFunction,
    phi: &ApproxFunction,
    bands: &[(u64, u64)],
) -> Result<RefutationReport> {
    validate_bands(bands)?;
    if growth_compare(phi, psi)? != GrowthVerdict::RatioToZero {
        return Err(Error::Precondition(format!("{phi}/{psi} does not tend to 0")));
    }
    let psi_certs: Vec<CertificateReport> = bands
        .iter()
        .map(|&(lo, hi)| min_ratio(space, x, psi, lo, hi))
        .collect::<Result<_>>()?;
    let eps = match eps {
        Some(e) => e.clone(),
        None => psi_certs
            .iter()
            .map(|c| c.min_ratio.lower().clone())
            .min()
            .expect("bands are nonempty"),
    };
    if !eps.is_positive() {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    for c in &psi_certs {
        if !c.min_ratio.certainly_ge(&eps) {
            return Err(Error::Precondition(format!(
                "eps = {} exceeds the certificate on band {:?}",
                format_rational(&eps),
                c.height_window
            )));
        }
    }
    let phi_certs = banded_min_ratio(space, x, phi, bands)?;
    let mut out = Vec::with_capacity(bands.len());
    for ((&(lo, hi), pc), fc) in bands.iter().zip(psi_certs).zip(phi_certs) {
        let quotient = band_min_quotient(psi, phi, lo, hi)?;
        let lower_bound = &eps * &quotient;
        let holds = fc.min_ratio.certainly_ge(&lower_bound);
        if !holds {
            return Err(Error::InvariantViolation(format!(
                "φ-ratio on band [{lo}, {hi}] is below ε·min ψ/φ"
            )));
        }
        out.push(RefutationBand {
            band: (lo, hi),
            psi_certificate: pc,
            phi_certificate: fc,
            quotient,
            lower_bound,
            holds,
        });
    }
    let nondecreasing = out.windows(2).all(|w| w[0].lower_bound <= w[1].lower_bound);
    Ok(RefutationReport {
        eps,
        bands: out,
        nondecreasing,
    })
}

/// A finite family of rationals in `[0, 1]` whose open balls
/// `B(r, ψ(H(r))/n)` cover `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverReport {
    pub n: u64,
    /// `(r, H(r))`, sorted by `r`.
    pub family: Vec<(Rational, u64)>,
    /// `Q_n = max H`.
    pub q_n: u64,
    pub verified: bool,
}

impl Serialize for CoverReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CoverReport", 4)?;
        st.serialize_field("n", &self.n)?;
        let fam: Vec<(String, u64)> = self.family.iter().map(|(r, h)| (format_rational(r), *h)).collect();
        st.serialize_field("F_n", &fam)?;
        st.serialize_field("Q_n", &self.q_n)?;
        st.serialize_field("verified", &self.verified)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImproveReport {
    pub psi: ApproxFunction,
    pub covers: Vec<CoverReport>,
    /// `(q, φ(q))` for `q ≤ Q_n`.
    pub phi: Vec<(u64, Rational)>,
}

impl Serialize for ImproveReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ImproveReport", 3)?;
        st.serialize_field("psi", &self.psi)?;
        st.serialize_field("covers", &self.covers)?;
        let phi: Vec<(u64, String)> = self.phi.iter().map(|(q, v)| (*q, format_rational(v))).collect();
        st.serialize_field("phi", &phi)?;
        st.end()
    }
}

/// Whether the open intervals cover `[0, 1]`: sweep by left endpoint,
/// tracking the right end of the covered prefix.
pub fn open_intervals_cover_unit(intervals: &[(Rational, Rational)]) -> bool {
    let mut sorted: Vec<&(Rational, Rational)> = intervals.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    // every point of [0, reach) is covered; `reach` itself still needs an
    // interval starting strictly before it
    let mut reach = Rational::zero();
    for (l, r) in sorted {
        if *l >= reach {
            return false;
        }
        if *r > reach {
            reach = r.clone();
        }
        if reach > Rational::one() {
            return true;
        }
    }
    false
}

/// Least `Q*` such that the rationals of height at most `Q*` in `[0, 1]`
/// cover it with balls of radius `c/(n·q)`, for `ψ = c/q`.
fn cover_for(c: &Rational, n: u64) -> CoverReport {
    let mut family: Vec<(Rational, u64)> = Vec::new();
    let mut q_star = 0u64;
    loop {
        q_star += 1;
        for p in 0..=q_star {
            let r = Rational::new(BigInt::from(p), BigInt::from(q_star));
            if r.denom() == &BigInt::from(q_star) {
                family.push((r, q_star));
            }
        }
        let balls: Vec<(Rational, Rational)> = family
            .iter()
            .map(|(r, h)| {
                let rad = c / Rational::from_integer(BigInt::from(n * h));
                (r - &rad, r + &rad)
            })
            .collect();
        if open_intervals_cover_unit(&balls) {
            family.sort();
            return CoverReport {
                n,
                family,
                q_n: q_star,
                verified: true,
            };
        }
    }
}

/// Covers for `m = 1..=n` and the improved staircase
/// `φ(q) = ψ(q)/min{m ≤ n : Q_m ≥ q}` for `q ≤ Q_n`.
pub fn improve_dirichlet_interval(psi: &ApproxFunction, n: u64) -> Result<ImproveReport> {
    let c = match psi {
        ApproxFunction::PowerLog { c, a, b } if a.is_one() && b.is_zero() => c.clone(),
        _ => return Err(Error::Precondition(format!("{psi} is not of the form c/q"))),
    };
    if n == 0 || n > 64 {
        return Err(Error::InvalidArgument("n must be in 1..=64".into()));
    }
    let covers: Vec<CoverReport> = (1..=n).map(|m| cover_for(&c, m)).collect();
    let q_n = covers.iter().map(|c| c.q_n).max().unwrap_or(1);
    let mut phi = Vec::with_capacity(q_n as usize);
    for q in 1..=q_n {
        let m = covers
            .iter()
            .find(|cv| cv.q_n >= q)
            .map(|cv| cv.n)
            .expect("q ≤ max Q_m");
        let v = psi
            .exact_value(&BigUint::from(q))?
            .expect("c/q is rational")
            / Rational::from_integer(BigInt::from(m));
        phi.push((q, v));
    }
    Ok(ImproveReport {
        psi: psi.clone(),
        covers,
        phi,
    })
}

/// True if `φ/ψ` never increases along the table.
pub fn staircase_nonincreasing(report: &ImproveReport) -> Result<bool> {
    let mut prev: Option<Rational> = None;
    for (q, v) in &report.phi {
        let r = v / report.psi.exact_value(&BigUint::from(*q))?.expect("rational");
        if let Some(p) = &prev {
            if r.cmp(p) == Ordering::Greater {
                return Ok(false);
            }
        }
        prev = Some(r);
    }
    Ok(true)
}
