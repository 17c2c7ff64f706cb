//! Random series points for the non-cobounded lattice `ℤ^∞ ⊂ ℓ^p`.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::{sample_rng, ClaimReport, SampledPoint};
use crate::arith::{factorial, factorial_bits_upper, format_rational, from_biguint, Rational};
use crate::error::{Error, Result};
use crate::function::{compare_threshold, ApproxFunction};
use crate::metric::{DistValue, Norm};
use crate::spaces::{dist_block_to_scaled_lattice, far_point, SpaceDescriptor};
use crate::vector::{BlockVector, SparseRationalVector};

/// Largest `N_n` the threshold search will try.
const MAX_N: u64 = 1 << 40;

/// Deepest level: draws are `0..2^n` in a `u64`.
const MAX_DEPTH: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoncoboundedLevel {
    pub n: u32,
    pub rho: Rational,
    /// Least `N` with `ψ(N) ≤ ρ_{n+1}/8`.
    pub big_n: u64,
    pub n_factorial: BigUint,
    /// `2^n · N_n!`.
    pub m: BigUint,
    /// Far point of norm `M_n`.
    pub w: BlockVector,
    /// `(ρ_n/M_n)·w_n`, of norm `ρ_n`.
    pub v: BlockVector,
}

impl Serialize for NoncoboundedLevel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("NoncoboundedLevel", 6)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("rho", &format_rational(&self.rho))?;
        st.serialize_field("N", &self.big_n.to_string())?;
        st.serialize_field("M", &self.m.to_string())?;
        st.serialize_field("w", &self.w)?;
        st.serialize_field("v", &self.v)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoncoboundedSchedule {
    pub space: SpaceDescriptor,
    pub psi: ApproxFunction,
    pub levels: Vec<NoncoboundedLevel>,
}

impl Serialize for NoncoboundedSchedule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("NoncoboundedSchedule", 4)?;
        st.serialize_field("space", &self.space)?;
        st.serialize_field("psi", &self.psi)?;
        st.serialize_field("K", &self.depth())?;
        st.serialize_field("levels", &self.levels)?;
        st.end()
    }
}

fn pow2(e: u32) -> BigUint {
    BigUint::one() << e
}

/// `ψ(q) ≤ t`, certain.
fn psi_below(psi: &ApproxFunction, q: u64, t: &Rational) -> Result<bool> {
    let d = DistValue {
        norm: Norm::Sup,
        value: t.clone(),
    };
    let o = compare_threshold(&d, &Rational::one(), psi, &BigUint::from(q))?;
    Ok(o.ordering == Ordering::Greater || (o.ordering == Ordering::Equal && o.exact))
}

/// Least `N ≥ start` with `ψ(N) ≤ t`, for nonincreasing `ψ`.
fn invert_threshold(psi: &ApproxFunction, t: &Rational) -> Result<u64> {
    let start = u64::from(psi.min_argument());
    if psi_below(psi, start, t)? {
        return Ok(start);
    }
    let mut lo = start; // fails
    let mut hi = start.max(2) * 2;
    while !psi_below(psi, hi, t)? {
        lo = hi;
        hi *= 2;
        if hi > MAX_N {
            return Err(Error::Precondition(format!(
                "{psi} stays above {} up to q = {MAX_N}",
                format_rational(t)
            )));
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if psi_below(psi, mid, t)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Builds `ρ_n, N_n, M_n, w_n, v_n` for `n = 1..=K`.
///
/// `ρ_1 = 1`, `ρ_{n+1} = ρ_n/2^(n+5)`, `N_n` is the least integer with
/// `ψ(N_n) ≤ ρ_{n+1}/8`, `M_n = 2^n·N_n!`. Every invariant is re-checked
/// before returning. `cap_bits` bounds the size of `M_n`.
pub fn schedule_noncobounded(
    space: &SpaceDescriptor,
    psi: &ApproxFunction,
    depth: u32,
    cap_bits: u64,
) -> Result<NoncoboundedSchedule> {
    let p = match *space {
        SpaceDescriptor::LpSequence { p } => p,
        _ => return Err(Error::Precondition(format!("{space} is not the ℓ^p sequence lattice"))),
    };
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::InvalidArgument(format!("depth must be in 1..={MAX_DEPTH}")));
    }
    if !psi.decays() || !psi.is_nonincreasing() {
        return Err(Error::Precondition(format!("{psi} must be nonincreasing and tend to 0")));
    }
    let norm = space.norm();
    let mut levels = Vec::with_capacity(depth as usize);
    let mut rho = Rational::one();
    for n in 1..=depth {
        let rho_next = &rho / from_biguint(&pow2(n + 5));
        let target = &rho_next / Rational::from_integer(8.into());
        let big_n = invert_threshold(psi, &target)?;
        let needed = u64::from(p) * (factorial_bits_upper(big_n) + u64::from(n) + 2);
        if needed > cap_bits {
            return Err(Error::SizeCap { needed, cap: cap_bits });
        }
        let n_factorial = factorial(big_n);
        let m = pow2(n) * &n_factorial;
        let m_r = from_biguint(&m);
        let quarter = &rho / Rational::from_integer(4.into());
        let w = far_point(space, &m_r, &quarter)?;
        let v = w.scale(&(&rho / &m_r));

        // self-checks
        if !psi_below(psi, big_n, &target)? {
            return Err(Error::InvariantViolation(format!("ψ(N_{n}) exceeds ρ_{}/8", n + 1)));
        }
        if norm.of_block(&w).cmp_length(&m_r) != Ordering::Equal {
            return Err(Error::InvariantViolation(format!("‖w_{n}‖ differs from M_{n}")));
        }
        let dw = dist_block_to_scaled_lattice(space, &w, &BigUint::one())?;
        if dw.cmp_length(&(&m_r - &quarter)) == Ordering::Less {
            return Err(Error::InvariantViolation(format!("w_{n} is too close to the lattice")));
        }
        if norm.of_block(&v).cmp_length(&rho) != Ordering::Equal {
            return Err(Error::InvariantViolation(format!("‖v_{n}‖ differs from ρ_{n}")));
        }
        levels.push(NoncoboundedLevel {
            n,
            rho: rho.clone(),
            big_n,
            n_factorial,
            m,
            w,
            v,
        });
        rho = rho_next;
    }
    Ok(NoncoboundedSchedule {
        space: *space,
        psi: psi.clone(),
        levels,
    })
}

impl NoncoboundedSchedule {
    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn level(&self, n: u32) -> Result<&NoncoboundedLevel> {
        if n == 0 || n > self.depth() {
            return Err(Error::InvalidArgument(format!("level {n} outside 1..={}", self.depth())));
        }
        Ok(&self.levels[n as usize - 1])
    }

    /// `Σ_{n>K} 2^n ρ_n ≤ (ρ_K/16)/(1 − 2^-(K+5))`: the ratio of
    /// consecutive terms past `K` is at most `2^-(K+5)`.
    pub fn tail_bound(&self) -> Rational {
        let k = self.depth();
        let rho_k = &self.levels[k as usize - 1].rho;
        let r = Rational::new(BigInt::one(), BigInt::from(pow2(k + 5)));
        rho_k / Rational::from_integer(16.into()) / (Rational::one() - r)
    }

    pub(super) fn draw(&self, rng: &mut ChaCha20Rng) -> Vec<u64> {
        (1..=self.depth()).map(|n| rng.gen_range(0..1u64 << n)).collect()
    }

    pub(super) fn level_term(&self, n: u32, i: u64) -> BlockVector {
        self.levels[n as usize - 1].v.scale(&Rational::from_integer(i.into()))
    }

    /// `dist(y, Λ/N_n!) ≤ ρ_n/4`.
    pub(super) fn level_event(&self, n: u32, y: &BlockVector) -> Result<bool> {
        let lv = self.level(n)?;
        let d = dist_block_to_scaled_lattice(&self.space, y, &lv.n_factorial)?;
        Ok(d.cmp_length(&(&lv.rho / Rational::from_integer(4.into()))) != Ordering::Greater)
    }
}

/// `Σ_{n≤K} i_n v_n` with `i_n` uniform in `0..2^n`.
pub fn sample_ba_noncobounded(schedule: &NoncoboundedSchedule, seed: u64) -> SampledPoint {
    let mut rng = sample_rng(seed, 0);
    let choices = schedule.draw(&mut rng);
    let mut point = BlockVector::zero();
    for (k, &i) in choices.iter().enumerate() {
        point = point.add(&schedule.level_term(k as u32 + 1, i));
    }
    SampledPoint {
        point,
        choices,
        tail_bound: schedule.tail_bound(),
    }
}

/// Counts `i ∈ 0..2^n` with `dist(x + i·v_n, Λ/N_n!) ≤ ρ_n/4`. At most one
/// such `i` exists.
pub fn claim_count_noncobounded(schedule: &NoncoboundedSchedule, n: u32, x: &BlockVector) -> Result<ClaimReport> {
    let lv = schedule.level(n)?;
    let mut count = 0u64;
    let mut y = x.clone();
    for i in 0..1u64 << n {
        if i > 0 {
            y = y.add(&lv.v);
        }
        if schedule.level_event(n, &y)? {
            count += 1;
        }
    }
    Ok(ClaimReport {
        n,
        count: count.into(),
        bound: BigUint::one(),
        holds: count <= 1,
    })
}

fn generic_sparse(rng: &mut ChaCha20Rng, scale: &Rational) -> SparseRationalVector {
    let mut x = SparseRationalVector::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let b: i64 = rng.gen_range(1..=1000);
        let a: i64 = rng.gen_range(-2 * b..=2 * b);
        x.add_at(rng.gen_range(1..=6), &(Rational::new(a.into(), b.into()) * scale));
    }
    x
}

/// Test centers for the level-`n` claim: a mix of generic sparse points
/// (within the fine grid `Λ/N_n!`, so `i = 0` hits), points of
/// `Λ/N_n! − j·v_n` and small perturbations of those (hit at `i = j`), and
/// points shifted by `v_n/2` (no hit).
pub fn random_center_noncobounded(schedule: &NoncoboundedSchedule, n: u32, rng: &mut ChaCha20Rng) -> Result<BlockVector> {
    let lv = schedule.level(n)?;
    let q = from_biguint(&lv.n_factorial);
    Ok(match rng.gen_range(0..4) {
        0 => BlockVector::from_sparse(generic_sparse(rng, &Rational::one())),
        // half a step off the grid: no i can hit
        3 => BlockVector::from_sparse(generic_sparse(rng, &lv.rho)).add(&lv.v.scale(&Rational::new(1.into(), 2.into()))),
        kind => {
            let mut y = SparseRationalVector::zero();
            for _ in 0..rng.gen_range(0..=3) {
                let k: i64 = rng.gen_range(-50..=50);
                y.add_at(rng.gen_range(1..=6), &(Rational::from_integer(k.into()) / &q));
            }
            let j = rng.gen_range(0..1u64 << n);
            let mut x = BlockVector::from_sparse(y).add(&lv.v.scale(&-Rational::from_integer(j.into())));
            if kind == 2 {
                let eps = &lv.rho / Rational::from_integer(rng.gen_range(8i64..=64).into());
                x = x.add_sparse(&SparseRationalVector::scaled_unit(rng.gen_range(1..=6), eps));
            }
            x
        }
    })
}
