//! Brute-force oracles and seeded generators shared by the integration
//! tests. Nothing here calls the search code it checks.
#![allow(dead_code)]

use latdioph::arith::{pow, rat, Rational};
use latdioph::{DistValue, Norm, SparseRationalVector};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

pub fn rand_rational(rng: &mut ChaCha20Rng, max_den: i64, max_abs: i64) -> Rational {
    let b = rng.gen_range(1..=max_den);
    let a = rng.gen_range(-max_abs * b..=max_abs * b);
    rat(a, b)
}

pub fn rand_unit_rational(rng: &mut ChaCha20Rng, max_den: i64) -> Rational {
    let b = rng.gen_range(1..=max_den);
    rat(rng.gen_range(0..=b), b)
}

pub fn rand_dense(rng: &mut ChaCha20Rng, d: u64, max_den: i64, max_abs: i64) -> SparseRationalVector {
    let v: Vec<Rational> = (0..d).map(|_| rand_rational(rng, max_den, max_abs)).collect();
    SparseRationalVector::from_dense(&v)
}

/// Random finitely supported point with indices up to `max_index`.
pub fn rand_sparse(rng: &mut ChaCha20Rng, max_index: u64, max_den: i64) -> SparseRationalVector {
    let mut x = SparseRationalVector::zero();
    for _ in 0..rng.gen_range(1..=6) {
        x.add_at(rng.gen_range(1..=max_index), &rand_rational(rng, max_den, 3));
    }
    x
}

/// `Σ|x_i − y_i|^p` or `max|x_i − y_i|`, coordinate by coordinate over
/// `1..=d`.
pub fn dense_dist(norm: Norm, x: &[Rational], y: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (a, b) in x.iter().zip(y) {
        let r = (a - b).abs();
        acc = match norm {
            Norm::Sup => acc.max(r),
            Norm::Lp(p) => acc + pow(&r, p),
        };
    }
    acc
}

fn floor_times(x: &Rational, q: i64) -> i64 {
    let f = (x * Rational::from_integer(BigInt::from(q))).floor().to_integer();
    f.to_string().parse().expect("small test values")
}

/// Every integer vector `p` with `p_i ∈ ⌊q x_i⌋ ± radius`, in lexicographic
/// order.
pub fn box_points(x: &[Rational], q: i64, radius: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for xi in x {
        let f = floor_times(xi, q);
        let mut next = Vec::new();
        for prefix in &out {
            for k in -radius..=radius {
                let mut p = prefix.clone();
                p.push(f + k);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Minimal `dist(x, p/q)` over the full box `⌊q x_i⌋ ± radius`.
pub fn box_min_dist(norm: Norm, x: &[Rational], q: i64, radius: i64) -> Rational {
    box_points(x, q, radius)
        .into_iter()
        .map(|p| {
            let y: Vec<Rational> = p.iter().map(|&pi| rat(pi, q)).collect();
            dense_dist(norm, x, &y)
        })
        .min()
        .expect("box is nonempty")
}

/// Minimal `dist(x, p/q)` over `q ≤ max_q` and the full box.
pub fn box_best(norm: Norm, x: &[Rational], max_q: i64, radius: i64) -> Rational {
    (1..=max_q)
        .map(|q| box_min_dist(norm, x, q, radius))
        .min()
        .expect("q range nonempty")
}

pub fn dense_of(x: &SparseRationalVector, d: u64) -> Vec<Rational> {
    (1..=d).map(|i| x.get(i)).collect()
}

pub fn dist_value(norm: Norm, value: Rational) -> DistValue {
    DistValue { norm, value }
}

/// Independent cover check: every ball endpoint in `[0, 1]`, plus `0` and
/// `1`, must lie strictly inside some open ball. Between two consecutive
/// such points coverage cannot change without passing an endpoint.
pub fn endpoints_cover(balls: &[(Rational, Rational)]) -> bool {
    let zero = Rational::zero();
    let one = rat(1, 1);
    let mut probes: Vec<Rational> = vec![zero.clone(), one.clone()];
    for (l, r) in balls {
        for e in [l, r] {
            if *e >= zero && *e <= one {
                probes.push(e.clone());
            }
        }
    }
    // also midpoints between consecutive probes
    probes.sort();
    probes.dedup();
    let mids: Vec<Rational> = probes.windows(2).map(|w| (&w[0] + &w[1]) / rat(2, 1)).collect();
    probes
        .iter()
        .chain(mids.iter())
        .all(|t| balls.iter().any(|(l, r)| l < t && t < r))
}

pub fn is_nonneg(r: &Rational) -> bool {
    !r.is_negative()
}
