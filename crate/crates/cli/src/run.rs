//! Dispatch from a validated configuration to the library.

use std::collections::BTreeMap;

use latdioph::approx::{banded_min_ratio, Bound};
use latdioph::constructions::{
    claim_count_cobounded, claim_count_noncobounded, construct_wa, random_center_cobounded,
    random_center_noncobounded, sample_ba_cobounded, sample_ba_noncobounded, schedule_cobounded,
    schedule_noncobounded, transversality_trials, BaSchedule,
};
use latdioph::optimality::{improve_dirichlet_interval, psiq_witness, refute_candidate, strong_optimality_counterexample};
use latdioph::{
    best_approx, dirichlet_rounding, dirichlet_witness_finite, growth_compare, khinchin_classify, min_ratio,
    space_info, Norm, QSequence, SpaceDescriptor,
};
use num_bigint::BigUint;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Mode, Params};
use crate::Failure;

/// Every command path, as written in configs.
pub const COMMANDS: &[&str] = &[
    "space info",
    "approx best",
    "approx dirichlet",
    "approx rounding",
    "approx certify",
    "construct ba",
    "construct wa",
    "claims",
    "transversality",
    "optimality counterexample",
    "optimality psiq",
    "optimality improve",
    "optimality refute",
    "growth compare",
    "khinchin",
];

/// Operation output plus whether a checked postcondition came out false.
pub struct Outcome {
    pub results: Value,
    pub violated: bool,
}

impl Outcome {
    fn ok<T: Serialize>(v: T) -> Result<Self, Failure> {
        Self::flagged(v, false)
    }

    fn flagged<T: Serialize>(v: T, violated: bool) -> Result<Self, Failure> {
        let results = serde_json::to_value(v).map_err(|e| Failure::Usage(format!("serializing results: {e}")))?;
        Ok(Outcome { results, violated })
    }
}

fn bound_fails(b: &Option<Bound>) -> bool {
    b.as_ref().is_some_and(|b| !b.holds)
}

/// Validates `p` for its command, normalizes it in place so the echo
/// reproduces the run, and executes.
pub fn run(p: &mut Params) -> Result<Outcome, Failure> {
    match p.command.as_str() {
        "space info" => {
            p.allow(&["space"])?;
            Outcome::ok(space_info(&p.space()?))
        }
        "approx best" => {
            p.allow(&["space", "point", "max-height"])?;
            let (space, x) = (p.space()?, p.point()?);
            let w = best_approx(&space, &x, Params::req(p.max_height, "max-height")?)?;
            let bad = bound_fails(&w.bound);
            Outcome::flagged(w, bad)
        }
        "approx dirichlet" => {
            p.allow(&["space", "point", "max-height"])?;
            let (space, x) = (p.space()?, p.point()?);
            let d = match space {
                SpaceDescriptor::FiniteDim { d, norm: Norm::Sup } => d,
                _ => return Err(Failure::Usage("approx dirichlet needs a finite space with the sup norm".into())),
            };
            let w = dirichlet_witness_finite(d, &x, Params::req(p.max_height, "max-height")?)?;
            let bad = bound_fails(&w.bound);
            Outcome::flagged(w, bad)
        }
        "approx rounding" => {
            p.allow(&["space", "point", "q", "eps"])?;
            let (space, x, q) = (p.space()?, p.point()?, p.q()?);
            let eps = Params::rational(&p.eps, "eps")?.ok_or_else(|| Failure::Usage("--eps is required".into()))?;
            let w = dirichlet_rounding(&space, &x, &q, &eps)?;
            let bad = bound_fails(&w.bound);
            Outcome::flagged(w, bad)
        }
        "approx certify" => {
            p.allow(&["space", "point", "psi", "window", "bands"])?;
            let (space, x, f) = (p.space()?, p.point()?, p.psi()?);
            match (&p.window, &p.bands) {
                (Some(_), None) => {
                    let (lo, hi) = p.window()?;
                    Outcome::ok(min_ratio(&space, &x, &f, lo, hi)?)
                }
                (None, Some(_)) => Outcome::ok(banded_min_ratio(&space, &x, &f, &p.bands()?)?),
                _ => Err(Failure::Usage("give exactly one of --window and --bands".into())),
            }
        }
        "construct ba" => construct_ba(p),
        "construct wa" => {
            p.allow(&["space", "psi", "levels", "choices"])?;
            let (space, f) = (p.space()?, p.psi()?);
            let (s, point, witnesses) = construct_wa(&space, &f, Params::req(p.levels, "levels")?, &p.choices()?)?;
            let bad = witnesses.iter().any(|w| bound_fails(&w.bound));
            Outcome::flagged(json!({ "schedule": s, "point": point, "witnesses": witnesses }), bad)
        }
        "claims" => claims(p),
        "transversality" => {
            p.allow(&["mode", "space", "psi", "levels", "trials", "shift"])?;
            let schedule = ba_schedule(p, Params::req(p.levels, "levels")?)?;
            let shift = p.shift()?;
            let freqs = transversality_trials(&schedule, &shift, Params::req(p.trials, "trials")?, p.seed)?;
            let within = freqs.iter().all(|f| f.within_slack());
            Outcome::ok(json!({ "levels": freqs, "all_within_slack": within }))
        }
        "optimality counterexample" => {
            p.allow(&["n-max"])?;
            let rows = strong_optimality_counterexample(Params::req(p.n_max, "n-max")?)?;
            let bad = rows.iter().any(|r| !r.holds);
            Outcome::flagged(rows, bad)
        }
        "optimality psiq" => {
            p.allow(&["x", "n", "preset"])?;
            let x = Params::rational(&p.x, "x")?.ok_or_else(|| Failure::Usage("--x is required".into()))?;
            let preset = p.preset.as_deref().ok_or_else(|| Failure::Usage("--preset is required".into()))?;
            let seq = QSequence::parse(preset)?;
            p.preset = Some(seq.to_string());
            let n = Params::req(p.n, "n")?;
            let n = u32::try_from(n).map_err(|_| Failure::Usage("--n is too large".into()))?;
            let w = psiq_witness(&x, &seq, n)?;
            let bad = bound_fails(&w.bound);
            Outcome::flagged(w, bad)
        }
        "optimality improve" => {
            p.allow(&["psi", "n"])?;
            if p.psi.is_none() {
                p.psi = Some("pow:1".into());
            }
            let f = p.psi()?;
            let r = improve_dirichlet_interval(&f, Params::req(p.n, "n")?)?;
            let bad = r.covers.iter().any(|c| !c.verified);
            Outcome::flagged(r, bad)
        }
        "optimality refute" => {
            p.allow(&["space", "point", "psi", "phi", "bands", "eps"])?;
            let (space, x, psi, phi) = (p.space()?, p.point()?, p.psi()?, p.phi()?);
            let eps = Params::rational(&p.eps, "eps")?;
            let r = refute_candidate(&space, &x, eps.as_ref(), &psi, &phi, &p.bands()?)?;
            let bad = r.bands.iter().any(|b| !b.holds);
            Outcome::flagged(r, bad)
        }
        "growth compare" => {
            p.allow(&["psi", "phi"])?;
            let (f, g) = (p.psi()?, p.phi()?);
            Outcome::ok(json!({ "verdict": growth_compare(&f, &g)? }))
        }
        "khinchin" => {
            p.allow(&["psi", "space"])?;
            let f = p.psi()?;
            let d = match p.space {
                None => 1,
                Some(_) => match p.space()? {
                    SpaceDescriptor::FiniteDim { d, .. } => d,
                    _ => return Err(Failure::Usage("khinchin needs a finite-dimensional space".into())),
                },
            };
            let d = u32::try_from(d).map_err(|_| Failure::Usage("dimension is too large".into()))?;
            Outcome::ok(json!({ "d": d, "verdict": khinchin_classify(&f, d)? }))
        }
        other => Err(Failure::Usage(format!(
            "unknown command {other:?}; expected one of: {}",
            COMMANDS.join(", ")
        ))),
    }
}

/// The schedule named by `--mode`; `--psi` only feeds the non-cobounded one.
fn ba_schedule(p: &mut Params, depth: u32) -> Result<BaSchedule, Failure> {
    let space = p.space()?;
    Ok(match p.mode()? {
        Mode::Noncobounded => BaSchedule::Noncobounded(schedule_noncobounded(&space, &p.psi()?, depth, p.cap_bits)?),
        Mode::Cobounded => {
            if p.psi.is_some() {
                return Err(Failure::Usage("--psi is not used in cobounded mode".into()));
            }
            BaSchedule::Cobounded(schedule_cobounded(&space, depth)?)
        }
    })
}

fn construct_ba(p: &mut Params) -> Result<Outcome, Failure> {
    p.allow(&["mode", "space", "psi", "levels"])?;
    let schedule = ba_schedule(p, Params::req(p.levels, "levels")?)?;
    Outcome::ok(match &schedule {
        BaSchedule::Noncobounded(s) => json!({ "schedule": s, "sample": sample_ba_noncobounded(s, p.seed) }),
        BaSchedule::Cobounded(s) => json!({ "schedule": s, "sample": sample_ba_cobounded(s, p.seed) }),
    })
}

/// Counts at level `n` around `--trials` random centres drawn from one
/// seeded stream.
fn claims(p: &mut Params) -> Result<Outcome, Failure> {
    p.allow(&["mode", "space", "psi", "n", "trials"])?;
    let n = Params::req(p.n, "n")?;
    let n = u32::try_from(n).map_err(|_| Failure::Usage("--n is too large".into()))?;
    let trials = Params::req(p.trials, "trials")?;
    let schedule = ba_schedule(p, n)?;
    let mut rng = ChaCha20Rng::seed_from_u64(p.seed);
    let mut histogram: BTreeMap<String, u64> = BTreeMap::new();
    let mut max_count = BigUint::zero();
    let mut bound = BigUint::zero();
    let mut failures = 0u64;
    for _ in 0..trials {
        let c = match &schedule {
            BaSchedule::Noncobounded(s) => {
                let x = random_center_noncobounded(s, n, &mut rng)?;
                claim_count_noncobounded(s, n, &x)?
            }
            BaSchedule::Cobounded(s) => {
                let x = random_center_cobounded(s, n, &mut rng)?;
                claim_count_cobounded(s, n, &x)?
            }
        };
        *histogram.entry(c.count.to_string()).or_default() += 1;
        failures += u64::from(!c.holds);
        max_count = max_count.max(c.count);
        bound = c.bound;
    }
    Outcome::flagged(
        json!({
            "n": n,
            "trials": trials,
            "bound": bound.to_string(),
            "max_count": max_count.to_string(),
            "count_histogram": histogram,
            "failures": failures,
        }),
        failures > 0,
    )
}
