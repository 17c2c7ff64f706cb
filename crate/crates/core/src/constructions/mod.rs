//! Randomized badly-approximable constructions and the well-approximable
//! series construction.
//!
//! Sampling uses one ChaCha20 generator per sample, seeded with
//! `seed_from_u64(seed)` and switched to stream `t` for trial `t`; level
//! draws are consumed in increasing level order. This fixes every sampled
//! point across platforms.

mod cobounded;
mod noncobounded;
mod wa;

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::arith::{format_rational, Rational};
use crate::error::Result;
use crate::function::{compare_threshold, ApproxFunction};
use crate::metric::{DistValue, Norm};
use crate::vector::BlockVector;

pub use cobounded::{
    claim_count_cobounded, random_center_cobounded, sample_ba_cobounded, schedule_cobounded, CoboundedSchedule,
    LAMBDA,
};
pub use noncobounded::{
    claim_count_noncobounded, random_center_noncobounded, sample_ba_noncobounded, schedule_noncobounded,
    NoncoboundedLevel, NoncoboundedSchedule,
};
pub use wa::{construct_wa, wa_schedule, WASchedule};

/// Default cap on the bit size of schedule constants.
pub const DEFAULT_CAP_BITS: u64 = 1 << 20;

/// A truncated random series point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledPoint {
    pub point: BlockVector,
    /// Per-level draws, level 1 first.
    pub choices: Vec<u64>,
    /// Upper bound on the norm of the omitted tail.
    pub tail_bound: Rational,
}

impl Serialize for SampledPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SampledPoint", 3)?;
        st.serialize_field("point", &self.point)?;
        st.serialize_field("choices", &self.choices)?;
        st.serialize_field("tail_bound", &format_rational(&self.tail_bound))?;
        st.end()
    }
}

/// Result of a ball-counting claim at one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimReport {
    pub n: u32,
    pub count: BigUint,
    pub bound: BigUint,
    pub holds: bool,
}

impl Serialize for ClaimReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ClaimReport", 4)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("count", &self.count.to_string())?;
        st.serialize_field("bound", &self.bound.to_string())?;
        st.serialize_field("holds", &self.holds)?;
        st.end()
    }
}

pub(crate) fn sample_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// True when `t ≤ ψ(q)` is certain. `ψ(1)` with a positive log exponent is
/// `+∞`.
pub(crate) fn at_most_psi(t: &Rational, psi: &ApproxFunction, q: &BigUint) -> Result<bool> {
    if let ApproxFunction::MinOf(f, g) = psi {
        return Ok(at_most_psi(t, f, q)? && at_most_psi(t, g, q)?);
    }
    if q.is_one() {
        if let ApproxFunction::PowerLog { b, .. } = psi {
            if *b > Rational::from_integer(0.into()) {
                return Ok(true);
            }
        }
    }
    let d = DistValue {
        norm: Norm::Sup,
        value: t.clone(),
    };
    let o = compare_threshold(&d, &Rational::one(), psi, q)?;
    Ok(o.ordering == Ordering::Less || (o.ordering == Ordering::Equal && o.exact))
}

/// True when `dist ≤ scale·ψ(q)` is certain.
pub(crate) fn certainly_within(d: &DistValue, scale: &Rational, psi: &ApproxFunction, q: &BigUint) -> Result<bool> {
    let o = compare_threshold(d, scale, psi, q)?;
    Ok(o.ordering == Ordering::Less || (o.ordering == Ordering::Equal && o.exact))
}

/// Either badly-approximable schedule, for the level-event experiments.
#[derive(Debug, Clone)]
pub enum BaSchedule {
    Noncobounded(NoncoboundedSchedule),
    Cobounded(CoboundedSchedule),
}

/// Per-level event frequencies over independent samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelFrequency {
    pub n: u32,
    pub hits: u64,
    pub trials: u64,
    /// `2^-n` or `λ^-n`.
    pub bound: Rational,
}

impl LevelFrequency {
    pub fn frequency(&self) -> Rational {
        Rational::new(self.hits.into(), self.trials.into())
    }

    /// `freq ≤ bound + 3·sqrt(bound/T)`, decided exactly by squaring.
    pub fn within_slack(&self) -> bool {
        let f = self.frequency();
        if f <= self.bound {
            return true;
        }
        let excess = f - &self.bound;
        let t = Rational::from_integer(self.trials.into());
        &excess * &excess <= Rational::from_integer(9.into()) * &self.bound / t
    }
}

impl Serialize for LevelFrequency {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LevelFrequency", 6)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("hits", &self.hits)?;
        st.serialize_field("trials", &self.trials)?;
        st.serialize_field("frequency", &format_rational(&self.frequency()))?;
        st.serialize_field("bound", &format_rational(&self.bound))?;
        st.serialize_field("within_slack", &self.within_slack())?;
        st.end()
    }
}

impl BaSchedule {
    pub fn depth(&self) -> u32 {
        match self {
            BaSchedule::Noncobounded(s) => s.depth(),
            BaSchedule::Cobounded(s) => s.depth,
        }
    }

    /// Draws one sample from `rng`.
    fn draw(&self, rng: &mut ChaCha20Rng) -> Vec<u64> {
        match self {
            BaSchedule::Noncobounded(s) => s.draw(rng),
            BaSchedule::Cobounded(s) => s.draw(rng),
        }
    }

    fn level_term(&self, n: u32, choice: u64) -> BlockVector {
        match self {
            BaSchedule::Noncobounded(s) => s.level_term(n, choice),
            BaSchedule::Cobounded(s) => BlockVector::from_sparse(s.level_vector(choice, n)),
        }
    }

    /// Whether the ball of level `n` around `y` meets the level's scaled
    /// lattice.
    fn level_event(&self, n: u32, y: &BlockVector) -> Result<bool> {
        match self {
            BaSchedule::Noncobounded(s) => s.level_event(n, y),
            BaSchedule::Cobounded(s) => s.level_event(n, y),
        }
    }

    fn level_bound(&self, n: u32) -> Rational {
        let base = match self {
            BaSchedule::Noncobounded(_) => 2u64,
            BaSchedule::Cobounded(_) => LAMBDA,
        };
        Rational::new(1.into(), num_traits::pow(BigInt::from(base), n as usize))
    }
}

/// Monte-Carlo frequencies of the level events `E_n`: the ball around the
/// level-`n` partial sum minus `shift` meets the level-`n` scaled lattice.
///
/// Trial `t` samples with stream `t` of `seed`, so results do not depend on
/// how trials are scheduled across threads.
pub fn transversality_trials(
    schedule: &BaSchedule,
    shift: &BlockVector,
    trials: u64,
    seed: u64,
) -> Result<Vec<LevelFrequency>> {
    use rayon::prelude::*;
    if trials == 0 {
        return Err(crate::error::Error::InvalidArgument("at least one trial is required".into()));
    }
    let k = schedule.depth();
    let per_trial: Vec<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = sample_rng(seed, t);
            let choices = schedule.draw(&mut rng);
            let mut y = shift.neg();
            let mut hits = Vec::with_capacity(k as usize);
            for n in 1..=k {
                y = y.add(&schedule.level_term(n, choices[n as usize - 1]));
                hits.push(schedule.level_event(n, &y)?);
            }
            Ok(hits)
        })
        .collect::<Result<_>>()?;
    Ok((1..=k)
        .map(|n| LevelFrequency {
            n,
            hits: per_trial.iter().filter(|h| h[n as usize - 1]).count() as u64,
            trials,
            bound: schedule.level_bound(n),
        })
        .collect())
}
