//! Well-approximable points as series `Σ p_n/q_n` over a divisibility chain.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use super::{at_most_psi, certainly_within, SampledPoint};
use crate::approx::{Bound, WitnessReport};
use crate::arith::{format_rational, from_biguint, Rational};
use crate::error::{Error, Result};
use crate::function::ApproxFunction;
use crate::metric::height_std;
use crate::spaces::{space_info, SpaceDescriptor};
use crate::vector::{BlockVector, SparseRationalVector};

/// `q_0 = 1` and `q_{n+1}` the least proper multiple of `q_n` with
/// `2C/q_{n+1} ≤ min(ψ(q_n)/max(n, 1), ε_Λ/(3q_n))`, `C = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WASchedule {
    pub space: SpaceDescriptor,
    pub psi: ApproxFunction,
    pub c_lambda: Rational,
    pub eps_lambda: Rational,
    /// `q_0, …, q_K`.
    pub q: Vec<BigUint>,
}

impl Serialize for WASchedule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("WASchedule", 5)?;
        st.serialize_field("space", &self.space)?;
        st.serialize_field("psi", &self.psi)?;
        st.serialize_field("C_Lambda", &format_rational(&self.c_lambda))?;
        st.serialize_field("epsilon_lambda", &format_rational(&self.eps_lambda))?;
        let q: Vec<String> = self.q.iter().map(|q| q.to_string()).collect();
        st.serialize_field("q", &q)?;
        st.end()
    }
}

/// Largest bit size accepted for `q_n`.
const MAX_Q_BITS: u64 = 1 << 16;

impl WASchedule {
    pub fn depth(&self) -> u32 {
        self.q.len() as u32 - 1
    }

    /// Whether multiplier `k` satisfies the step inequality at level `n`.
    fn step_ok(&self, n: usize, k: &BigUint) -> Result<bool> {
        let qn = &self.q[n];
        let m = Rational::from_integer(BigInt::from(n.max(1)));
        let two_c = &self.c_lambda * Rational::from_integer(2.into());
        let step = &two_c / from_biguint(&(k * qn));
        let cobound = &self.eps_lambda / from_biguint(&(qn * 3u32));
        Ok(step <= cobound && at_most_psi(&(&step * m), &self.psi, qn)?)
    }
}

/// Builds `q_0, …, q_K`. Each multiplier is the least `k ≥ 2` passing the
/// exact step test, found by doubling and bisection (the test is monotone
/// in `k`), and re-verified.
pub fn wa_schedule(space: &SpaceDescriptor, psi: &ApproxFunction, depth: u32) -> Result<WASchedule> {
    let info = space_info(space);
    if info.strongly_discrete {
        return Err(Error::Precondition(format!("{space} is strongly discrete")));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if !psi.is_nonincreasing() || !psi.decays() {
        return Err(Error::Precondition(format!("{psi} must be nonincreasing and tend to 0")));
    }
    let mut s = WASchedule {
        space: *space,
        psi: psi.clone(),
        c_lambda: Rational::one(),
        eps_lambda: info.epsilon_lambda,
        q: vec![BigUint::one()],
    };
    for n in 0..depth as usize {
        let mut lo = BigUint::one(); // fails: k must be at least 2
        let mut hi = BigUint::from(2u8);
        while !s.step_ok(n, &hi)? {
            lo = hi.clone();
            hi <<= 1;
            if (&hi * &s.q[n]).bits() > MAX_Q_BITS {
                return Err(Error::SizeCap {
                    needed: (&hi * &s.q[n]).bits(),
                    cap: MAX_Q_BITS,
                });
            }
        }
        while &hi - &lo > BigUint::one() {
            let mid: BigUint = (&lo + &hi) >> 1;
            if s.step_ok(n, &mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let next = &s.q[n] * &hi;
        s.q.push(next);
    }
    for n in 0..depth as usize {
        let (a, b) = (&s.q[n], &s.q[n + 1]);
        let k = b / a;
        if !(b % a).is_zero() || k < BigUint::from(2u8) || !s.step_ok(n, &k)? {
            return Err(Error::InvariantViolation(format!("step {n} of the height chain fails")));
        }
    }
    Ok(s)
}

/// `x = Σ_{n=1}^{K} e_{c_n}/q_n`, with witnesses `r_N` (partial sums through
/// `N`) for every `N < K` satisfying `H(r_N) ≤ q_N` and
/// `dist(x, r_N) ≤ ψ(q_N)/max(N, 1)`.
pub fn construct_wa(
    space: &SpaceDescriptor,
    psi: &ApproxFunction,
    depth: u32,
    choices: &[u64],
) -> Result<(WASchedule, SampledPoint, Vec<WitnessReport>)> {
    if depth < 2 {
        return Err(Error::InvalidArgument("depth must be at least 2".into()));
    }
    if choices.len() != depth as usize {
        return Err(Error::InvalidArgument(format!(
            "{} choices given for {depth} levels",
            choices.len()
        )));
    }
    if choices.contains(&0) {
        return Err(Error::InvalidArgument("basis indices start at 1".into()));
    }
    let s = wa_schedule(space, psi, depth)?;
    let terms: Vec<SparseRationalVector> = choices
        .iter()
        .zip(&s.q[1..])
        .map(|(&i, q)| SparseRationalVector::scaled_unit(i, from_biguint(q).recip()))
        .collect();
    let point = terms.iter().fold(SparseRationalVector::zero(), |acc, t| acc.add(t));
    let norm = space.norm();
    let mut witnesses = Vec::with_capacity(depth as usize - 1);
    let mut partial = SparseRationalVector::zero();
    for big_n in 1..depth as usize {
        partial = partial.add(&terms[big_n - 1]);
        let qn = &s.q[big_n];
        let height = height_std(&partial);
        let dist = norm.of_sparse(&point.sub(&partial));
        let scale = Rational::new(BigInt::one(), BigInt::from(big_n));
        let holds = &height <= qn && certainly_within(&dist, &scale, psi, qn)?;
        if !holds {
            return Err(Error::InvariantViolation(format!(
                "witness {big_n} fails: height {height}, distance {}",
                dist.display_length()
            )));
        }
        witnesses.push(WitnessReport {
            r: partial.clone(),
            height,
            dist,
            bound: Some(Bound {
                statement: format!("H(r) ≤ {qn} and ‖x − r‖ ≤ {psi}({qn})/{big_n}"),
                holds,
                exact: true,
            }),
        });
    }
    let tail_bound = &s.c_lambda / from_biguint(&(&s.q[depth as usize] * 5u32));
    Ok((
        s,
        SampledPoint {
            point: BlockVector::from_sparse(point),
            choices: choices.to_vec(),
            tail_bound,
        },
        witnesses,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::function::psi_int;

    fn l1() -> SpaceDescriptor {
        SpaceDescriptor::LpSequence { p: 1 }
    }

    fn qs(s: &WASchedule) -> Vec<u64> {
        s.q.iter().map(|q| q.to_string().parse().unwrap()).collect()
    }

    #[test]
    fn psi1_chain() {
        let s = wa_schedule(&l1(), &psi_int(1), 4).unwrap();
        assert_eq!(qs(&s), vec![1, 6, 36, 216, 1296]);
        let s = wa_schedule(&l1(), &psi_int(2), 2).unwrap();
        assert_eq!(qs(&s)[1], 6);
    }

    #[test]
    fn log_factor_at_one_is_infinite() {
        let f = ApproxFunction::power_log(rat(1, 1), rat(1, 1), rat(1, 1)).unwrap();
        let s = wa_schedule(&SpaceDescriptor::C0, &f, 3).unwrap();
        assert_eq!(qs(&s)[1], 6);
        for w in s.q.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
    }

    #[test]
    fn witnesses() {
        let (s, p, ws) = construct_wa(&l1(), &psi_int(1), 3, &[1, 2, 3]).unwrap();
        assert_eq!(qs(&s), vec![1, 6, 36, 216]);
        let x = p.point.as_sparse().unwrap();
        assert_eq!(x.get(2), rat(1, 36));
        assert_eq!(ws[0].dist.value, rat(7, 216));
        assert_eq!(ws[0].height, BigUint::from(6u8));
        assert_eq!(ws[1].dist.value, rat(1, 216));
        assert_eq!(ws.len(), 2);
    }

    #[test]
    fn rejects() {
        let fin = SpaceDescriptor::FiniteDim {
            d: 2,
            norm: crate::metric::Norm::Sup,
        };
        assert!(wa_schedule(&fin, &psi_int(1), 2).is_err());
        assert!(construct_wa(&l1(), &psi_int(1), 1, &[1]).is_err());
        assert!(construct_wa(&l1(), &psi_int(1), 3, &[1, 2]).is_err());
    }
}
