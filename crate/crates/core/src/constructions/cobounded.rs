//! Random series points for the cobounded sequence lattices (`c_0`, `ℓ^∞`).

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::{sample_rng, ClaimReport, SampledPoint};
use crate::arith::{format_rational, round_half_down, Rational};
use crate::error::{Error, Result};
use crate::spaces::{dist_block_to_scaled_lattice, nearest_point_scaled, space_info, SpaceDescriptor};
use crate::vector::{BlockVector, SparseRationalVector};

pub const LAMBDA: u64 = 16;

/// `λ^(2K)` must fit in a `u64`.
const MAX_DEPTH: u32 = 7;

/// Level vectors `v(i, n) = ε_Λ·e_i/(4λ^n)` for `i ∈ 1..=λ^(2n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoboundedSchedule {
    pub space: SpaceDescriptor,
    pub depth: u32,
    pub lambda: u64,
    pub eps_lambda: Rational,
}

impl Serialize for CoboundedSchedule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CoboundedSchedule", 5)?;
        st.serialize_field("space", &self.space)?;
        st.serialize_field("K", &self.depth)?;
        st.serialize_field("lambda", &self.lambda)?;
        st.serialize_field("epsilon_lambda", &format_rational(&self.eps_lambda))?;
        let levels: Vec<_> = (1..=self.depth)
            .map(|n| {
                serde_json::json!({
                    "n": n,
                    "count": self.level_count(n).to_string(),
                    "norm": format_rational(&self.level_norm(n)),
                    "radius": format_rational(&self.radius(n)),
                })
            })
            .collect();
        st.serialize_field("levels", &levels)?;
        st.end()
    }
}

pub fn schedule_cobounded(space: &SpaceDescriptor, depth: u32) -> Result<CoboundedSchedule> {
    if !matches!(space, SpaceDescriptor::C0 | SpaceDescriptor::LInfty) {
        return Err(Error::Precondition(format!("{space} is not c0 or ℓ^∞")));
    }
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::InvalidArgument(format!("depth must be in 1..={MAX_DEPTH}")));
    }
    Ok(CoboundedSchedule {
        space: *space,
        depth,
        lambda: LAMBDA,
        eps_lambda: space_info(space).epsilon_lambda,
    })
}

impl CoboundedSchedule {
    fn lambda_pow(&self, n: u32) -> BigInt {
        num_traits::pow(BigInt::from(self.lambda), n as usize)
    }

    /// `λ^(2n)`.
    pub fn level_count(&self, n: u32) -> u64 {
        self.lambda.pow(2 * n)
    }

    /// `‖v(i, n)‖ = ε_Λ/(4λ^n)`.
    pub fn level_norm(&self, n: u32) -> Rational {
        &self.eps_lambda / Rational::from_integer(self.lambda_pow(n) * 4)
    }

    /// `ε_Λ/(16λ^n)`.
    pub fn radius(&self, n: u32) -> Rational {
        &self.eps_lambda / Rational::from_integer(self.lambda_pow(n) * 16)
    }

    pub fn level_vector(&self, i: u64, n: u32) -> SparseRationalVector {
        SparseRationalVector::scaled_unit(i, self.level_norm(n))
    }

    /// `Σ_{n>K} ε_Λ/(4λ^n) = ε_Λ/(4λ^K(λ − 1))`.
    pub fn tail_bound(&self) -> Rational {
        self.level_norm(self.depth) / Rational::from_integer(BigInt::from(self.lambda - 1))
    }

    fn check_level(&self, n: u32) -> Result<()> {
        if n == 0 || n > self.depth {
            return Err(Error::InvalidArgument(format!("level {n} outside 1..={}", self.depth)));
        }
        Ok(())
    }

    pub(super) fn draw(&self, rng: &mut ChaCha20Rng) -> Vec<u64> {
        (1..=self.depth).map(|n| rng.gen_range(1..=self.level_count(n))).collect()
    }

    /// Some `q ≤ λ^n` has `dist(y, Λ/q) ≤ ε_Λ/(16λ^n)`.
    pub(super) fn level_event(&self, n: u32, y: &BlockVector) -> Result<bool> {
        let r = self.radius(n);
        for q in 1..=self.lambda.pow(n) {
            let d = dist_block_to_scaled_lattice(&self.space, y, &BigUint::from(q))?;
            if d.cmp_length(&r) != Ordering::Greater {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// `Σ_{n≤K} v(i_n, n)` with `i_n` uniform in `1..=λ^(2n)`.
pub fn sample_ba_cobounded(schedule: &CoboundedSchedule, seed: u64) -> SampledPoint {
    let mut rng = sample_rng(seed, 0);
    let choices = schedule.draw(&mut rng);
    let mut point = SparseRationalVector::zero();
    for (k, &i) in choices.iter().enumerate() {
        point = point.add(&schedule.level_vector(i, k as u32 + 1));
    }
    SampledPoint {
        point: BlockVector::from_sparse(point),
        choices,
        tail_bound: schedule.tail_bound(),
    }
}

/// Distance from a scalar to `ℤ/q`.
fn grid_residual(v: &Rational, q: u64) -> Rational {
    let qr = Rational::from_integer(BigInt::from(q));
    let n = Rational::from_integer(round_half_down(&(v * &qr)));
    (v - n / qr).abs()
}

/// Counts `i ∈ 1..=λ^(2n)` such that the ball `B(x + v(i, n), ε_Λ/(16λ^n))`
/// meets `Λ/q` for some `q ≤ λ^n`. At most `λ^n` such `i` exist.
///
/// The norm is the sup norm, so for `i` outside `supp(x)` the event only
/// depends on `max_j dist(x_j, ℤ/q)` and on `dist(c, ℤ/q)` with
/// `c = ε_Λ/(4λ^n)`; those indices are counted in bulk and the indices in
/// `supp(x)` one by one.
pub fn claim_count_cobounded(schedule: &CoboundedSchedule, n: u32, x: &SparseRationalVector) -> Result<ClaimReport> {
    schedule.check_level(n)?;
    schedule.space.check_point(x)?;
    let total = schedule.level_count(n);
    let q_max = schedule.lambda.pow(n);
    let r = schedule.radius(n);
    let c = schedule.level_norm(n);

    let mut generic = false;
    for q in 1..=q_max {
        let dx = x
            .iter()
            .map(|(_, v)| grid_residual(v, q))
            .max()
            .unwrap_or_else(Rational::zero);
        if dx <= r && grid_residual(&c, q) <= r {
            generic = true;
            break;
        }
    }
    let in_range: Vec<u64> = x.support().filter(|&i| i <= total).collect();
    let mut count = BigUint::zero();
    if generic {
        count += total - in_range.len() as u64;
    }
    for i in in_range {
        let y = x.add(&schedule.level_vector(i, n));
        for q in 1..=q_max {
            let (_, d) = nearest_point_scaled(&schedule.space, &y, &BigUint::from(q))?;
            if d.cmp_length(&r) != Ordering::Greater {
                count += 1u32;
                break;
            }
        }
    }
    let bound = BigUint::from(q_max);
    Ok(ClaimReport {
        n,
        holds: count <= bound,
        count,
        bound,
    })
}

/// Test centers for the level-`n` claim: generic rational points, and
/// points `y − v(j, n)` with `y ∈ Λ/q`, `q ≤ λ^n` (hit at `i = j`),
/// sometimes nudged by less than the radius.
pub fn random_center_cobounded(
    schedule: &CoboundedSchedule,
    n: u32,
    rng: &mut ChaCha20Rng,
) -> Result<SparseRationalVector> {
    schedule.check_level(n)?;
    let total = schedule.level_count(n);
    let mut x = SparseRationalVector::zero();
    match rng.gen_range(0..3) {
        0 => {
            for _ in 0..rng.gen_range(1..=5) {
                let b: i64 = rng.gen_range(1..=10_000);
                let a: i64 = rng.gen_range(-3 * b..=3 * b);
                x.add_at(rng.gen_range(1..=total.min(512)), &Rational::new(a.into(), b.into()));
            }
        }
        kind => {
            let q = rng.gen_range(1..=schedule.lambda.pow(n)) as i64;
            for _ in 0..rng.gen_range(0..=4) {
                let k: i64 = rng.gen_range(-3 * q..=3 * q);
                x.add_at(rng.gen_range(1..=total.min(512)), &Rational::new(k.into(), q.into()));
            }
            let j = rng.gen_range(1..=total);
            x = x.sub(&schedule.level_vector(j, n));
            if kind == 2 {
                let nudge = schedule.radius(n) / Rational::from_integer(rng.gen_range(2i64..=9).into());
                x.add_at(j, &nudge);
            }
        }
    }
    Ok(x)
}
