//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//! Runs with `cargo test -p latdioph-core --test acceptance`.

mod common;

use std::time::{Duration, Instant};

use latdioph::approx::{best_approx, dirichlet_rounding, dirichlet_witness_finite, min_ratio, RatioValue};
use latdioph::arith::{int, pow, rat, Rational};
use latdioph::constructions::{
    claim_count_cobounded, claim_count_noncobounded, construct_wa, random_center_cobounded,
    random_center_noncobounded, sample_ba_cobounded, schedule_cobounded, schedule_noncobounded,
    transversality_trials, BaSchedule,
};
use latdioph::function::{compare_threshold, psi_int, QSequence};
use latdioph::optimality::{improve_dirichlet_interval, psiq_witness, strong_optimality_counterexample};
use latdioph::spaces::nearest_point_scaled;
use latdioph::{ApproxFunction, BlockVector, Norm, SpaceDescriptor, SparseRationalVector};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn dirichlet_c1() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let mut cases = 0u64;
    for d in 1..=3u64 {
        for _ in 0..200 {
            let x = rand_dense(&mut rng, d, 1_000_000, 2);
            for big_q in 2..=64u64 {
                let w = dirichlet_witness_finite(d, &x, big_q).map_err(e)?;
                let q = Rational::from_integer(w.height.clone().into());
                // independent re-check of ‖x − r‖^d · q^d · Q ≤ 1
                let dist = dense_dist(Norm::Sup, &dense_of(&x, d), &dense_of(&w.r, d));
                let lhs = pow(&dist, d as u32) * pow(&q, d as u32) * int(big_q as i64);
                ensure(lhs <= int(1) && w.height <= BigUint::from(big_q), || {
                    format!("d = {d}, Q = {big_q}, x = {x:?}")
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases"))
}

fn counterexample() -> Outcome {
    let rows = strong_optimality_counterexample(3).map_err(e)?;
    ensure(rows.len() == 6, || format!("{} rows", rows.len()))?;
    for r in &rows {
        ensure(r.phi_q3 == int(1), || format!("φ(q)·q³ ≠ 1 at q = {}", r.q))?;
    }
    Ok(format!("{} rows, largest q has {} bits", rows.len(), rows.last().unwrap().q.bits()))
}

fn claim_noncobounded() -> Outcome {
    let space = SpaceDescriptor::LpSequence { p: 1 };
    let s = schedule_noncobounded(&space, &psi_int(3), 3, 1 << 20).map_err(e)?;
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let mut tally = [0u64; 2];
    for n in 1..=3 {
        for _ in 0..100 {
            let x = random_center_noncobounded(&s, n, &mut rng).map_err(e)?;
            let c = claim_count_noncobounded(&s, n, &x).map_err(e)?;
            ensure(c.holds, || format!("count {} at level {n}", c.count))?;
            tally[if c.count.is_zero() { 0 } else { 1 }] += 1;
        }
    }
    Ok(format!("300 centers, {} with count 0, {} with count 1", tally[0], tally[1]))
}

fn claim_cobounded() -> Outcome {
    let s = schedule_cobounded(&SpaceDescriptor::C0, 2).map_err(e)?;
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let mut max_count = BigUint::zero();
    for n in 1..=2 {
        for _ in 0..20 {
            let x = random_center_cobounded(&s, n, &mut rng).map_err(e)?;
            let c = claim_count_cobounded(&s, n, &x).map_err(e)?;
            ensure(c.holds, || format!("count {} > {} at level {n}", c.count, c.bound))?;
            max_count = max_count.max(c.count);
        }
    }
    Ok(format!("40 centers, max count {max_count}"))
}

fn borel_cantelli() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let nc = BaSchedule::Noncobounded(
        schedule_noncobounded(&SpaceDescriptor::LpSequence { p: 1 }, &psi_int(3), 3, 1 << 20).map_err(e)?,
    );
    let cb = BaSchedule::Cobounded(schedule_cobounded(&SpaceDescriptor::C0, 2).map_err(e)?);
    // a multiple t·v_1 with t in [1/3, 2/3] moves the non-cobounded
    // events; sparse shifts alone sit inside the fine grid Λ/N!
    let nc_shift = match &nc {
        BaSchedule::Noncobounded(s) => BlockVector::from_sparse(rand_sparse(&mut rng, 6, 1000))
            .add(&s.levels[0].v.scale(&((rand_unit_rational(&mut rng, 1000) + int(1)) / int(3)))),
        _ => unreachable!(),
    };
    let cb_shift = BlockVector::from_sparse(rand_sparse(&mut rng, 300, 16));
    let mut summary = Vec::new();
    for (name, s, shift) in [("noncobounded", &nc, nc_shift), ("cobounded", &cb, cb_shift)] {
        let shifts = [BlockVector::zero(), shift];
        for (k, v) in shifts.iter().enumerate() {
            let freqs = transversality_trials(s, v, 2000, 11).map_err(e)?;
            for f in &freqs {
                ensure(f.within_slack(), || {
                    format!("{name}, shift {k}, level {}: {}/{}", f.n, f.hits, f.trials)
                })?;
            }
            let hits: Vec<String> = freqs.iter().map(|f| f.hits.to_string()).collect();
            summary.push(format!("{name}/{k}: {}", hits.join(",")));
        }
    }
    Ok(format!("hits per level of 2000: {}", summary.join("; ")))
}

fn wa_construction() -> Outcome {
    let space = SpaceDescriptor::LpSequence { p: 1 };
    let choices: Vec<u64> = (1..=8).collect();
    let (s, _, ws) = construct_wa(&space, &psi_int(1), 8, &choices).map_err(e)?;
    let prefix: Vec<BigUint> = s.q[1..4].to_vec();
    ensure(prefix == [6u32, 36, 216].map(BigUint::from), || format!("prefix {prefix:?}"))?;
    ensure(ws.len() == 7, || format!("{} witnesses", ws.len()))?;
    for (k, w) in ws.iter().enumerate() {
        let big_n = k + 1;
        let qn = &s.q[big_n];
        let o = compare_threshold(&w.dist, &rat(1, big_n as i64), &psi_int(1), qn).map_err(e)?;
        ensure(o.is_le() && o.exact && w.height <= *qn, || format!("witness {big_n}"))?;
    }
    Ok("q = 6, 36, 216, …; 7 witnesses verified".into())
}

fn cobounded_rounding() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let mut cases = 0;
    for k in 0..100 {
        let space = if k % 2 == 0 { SpaceDescriptor::C0 } else { SpaceDescriptor::LInfty };
        let x = rand_sparse(&mut rng, 50, 10_000);
        for q in 1..=100u64 {
            let w = dirichlet_rounding(&space, &x, &BigUint::from(q), &rat(1, 1000)).map_err(e)?;
            ensure(w.dist.value <= rat(1, 2 * q as i64), || format!("x = {x:?}, q = {q}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases"))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    for k in 0..500 {
        let d = rng.gen_range(1..=2u64);
        let norm = [Norm::Sup, Norm::Lp(1), Norm::Lp(2)][k % 3];
        let space = SpaceDescriptor::FiniteDim { d, norm };
        let x = rand_dense(&mut rng, d, 60, 2);
        let xd = dense_of(&x, d);
        let q = rng.gen_range(1..=12i64);
        let (_, dn) = nearest_point_scaled(&space, &x, &BigUint::from(q as u64)).map_err(e)?;
        ensure(dn.value == box_min_dist(norm, &xd, q, 2), || format!("nearest, x = {x:?}, q = {q}"))?;
        let big_q = rng.gen_range(1..=12u64);
        let b = best_approx(&space, &x, big_q).map_err(e)?;
        ensure(b.dist.value == box_best(norm, &xd, big_q as i64, 3), || {
            format!("best, x = {x:?}, Q = {big_q}")
        })?;
    }
    Ok("500 instances".into())
}

fn ba_certificates() -> Outcome {
    let sp = SpaceDescriptor::FiniteDim { d: 1, norm: Norm::Sup };
    let c = min_ratio(&sp, &SparseRationalVector::from_dense(&[rat(13, 21)]), &psi_int(2), 1, 8).map_err(e)?;
    ensure(c.min_ratio == RatioValue::Exact(rat(8, 21)), || format!("{:?}", c.min_ratio))?;
    // independent: min over q ≤ 8 of q²·dist(x, ℤ/q)
    let oracle = (1..=8i64)
        .map(|q| box_min_dist(Norm::Sup, &[rat(13, 21)], q, 2) * int(q * q))
        .min()
        .unwrap();
    ensure(oracle == rat(8, 21), || "oracle disagrees".into())?;
    let s = schedule_cobounded(&SpaceDescriptor::C0, 3).map_err(e)?;
    let mut smallest: Option<Rational> = None;
    for seed in 1..=20 {
        let p = sample_ba_cobounded(&s, seed);
        let x = p.point.as_sparse().expect("cobounded samples are sparse");
        let c = min_ratio(&SpaceDescriptor::C0, x, &psi_int(1), 1, 256).map_err(e)?;
        ensure(c.min_ratio.is_positive(), || format!("seed {seed}"))?;
        let lo = c.min_ratio.lower().clone();
        smallest = Some(smallest.map_or(lo.clone(), |s| s.min(lo)));
    }
    Ok(format!(
        "8/21 exact; 20 samples, smallest ratio {}",
        latdioph::arith::format_rational(&smallest.unwrap())
    ))
}

fn interval_improvement() -> Outcome {
    let mut qs = Vec::new();
    for n in 2..=4u64 {
        let r = improve_dirichlet_interval(&psi_int(1), n).map_err(e)?;
        for cv in &r.covers {
            let balls: Vec<(Rational, Rational)> = cv
                .family
                .iter()
                .map(|(c, h)| {
                    let rad = rat(1, (cv.n * h) as i64);
                    (c - &rad, c + &rad)
                })
                .collect();
            ensure(cv.verified && endpoints_cover(&balls), || format!("cover m = {}", cv.n))?;
        }
        let q1 = r.covers[0].q_n;
        for (q, v) in &r.phi {
            if *q > q1 {
                ensure(*v < rat(1, *q as i64), || format!("φ({q}) not below ψ_1"))?;
            }
        }
        qs.push(r.covers.last().unwrap().q_n.to_string());
    }
    Ok(format!("Q_n for n = 2, 3, 4: {}", qs.join(", ")))
}

fn psiq_witnesses() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let seq = QSequence::DoublyExp { offset: 0 };
    let psi = ApproxFunction::PsiQ(seq.clone());
    for _ in 0..50 {
        let x = rand_unit_rational(&mut rng, 1_000_000);
        for n in 1..=2 {
            let w = psiq_witness(&x, &seq, n).map_err(e)?;
            let big_q = Rational::from_integer(seq.term(n).into());
            let q = Rational::from_integer(w.height.clone().into());
            ensure(&w.dist.value * &q * &big_q <= Rational::one(), || format!("x = {x}, n = {n}"))?;
            let o = compare_threshold(&w.dist, &int(1), &psi, &w.height).map_err(e)?;
            ensure(o.is_le() && o.exact, || format!("ψ_Q bound, x = {x}, n = {n}"))?;
        }
    }
    Ok("100 witnesses".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("1 Dirichlet with C = 1, sup norm", dirichlet_c1, Some(Duration::from_secs(60))),
        ("2 strong-optimality counterexample", counterexample, Some(Duration::from_secs(1))),
        ("3 non-cobounded claim count <= 1", claim_noncobounded, None),
        ("4 cobounded claim count <= 16^n", claim_cobounded, None),
        ("5 level-event frequencies", borel_cantelli, Some(Duration::from_secs(300))),
        ("6 WA construction", wa_construction, None),
        ("7 cobounded rounding", cobounded_rounding, None),
        ("8 oracle equivalence", oracle_equivalence, None),
        ("9 BA certificates", ba_certificates, None),
        ("10 interval improvement covers", interval_improvement, None),
        ("11 psi_Q witnesses", psiq_witnesses, None),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let t0 = Instant::now();
        let outcome = run();
        let dt = t0.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if dt > l => Err(format!("took {dt:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name}  ({dt:.2?})  {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}  ({dt:.2?})  {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 11 criteria passed");
}
