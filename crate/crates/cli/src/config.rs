//! Experiment configuration: the flag set shared by every subcommand, its
//! JSON form, and the parsers that turn flag strings into library values.

use std::path::PathBuf;

use clap::Args;
use latdioph::arith::parse_rational;
use latdioph::{ApproxFunction, BlockVector, Rational, SpaceDescriptor, SparseRationalVector};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::Failure;

fn default_cap_bits() -> u64 {
    1 << 20
}

/// Every flag any subcommand accepts. Serialized as the config echo of a
/// report; a saved echo runs again through `latdioph run --config`.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Subcommand path, e.g. "approx best". Filled in from the command line.
    #[arg(skip)]
    #[serde(default)]
    pub command: String,

    /// Space as JSON, e.g. '{"kind":"lp","p":"1"}', or a file holding it.
    #[arg(long, global = true, value_parser = json_arg)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<Value>,

    /// Point as JSON, e.g. '{"entries":[[1,"13/21"]]}', or a file holding it.
    #[arg(long, global = true, value_parser = json_arg)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Value>,

    /// Approximation function, e.g. pow:1, powlog:1,1,2, psiQ:dexp:0, min(pow:1,pow:2).
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,

    /// Second approximation function, same grammar as --psi.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,

    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_height: Option<u64>,

    /// Height window lo:hi.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,

    /// Disjoint increasing height bands, e.g. 1:10,11:100.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<String>,

    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<u32>,

    #[arg(long, global = true, default_value_t = 0)]
    #[serde(default)]
    pub seed: u64,

    /// noncobounded or cobounded.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,

    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,

    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,

    /// Shift point as JSON (prefix blocks allowed), or a file holding it.
    #[arg(long, global = true, value_parser = json_arg)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<Value>,

    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,

    /// Rational in [0, 1], e.g. 1/3.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,

    /// Height sequence preset, e.g. dexp:0.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,

    /// Basis indices, e.g. 1,2,3.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choices: Option<String>,

    /// Largest big integer a schedule may build, in bits.
    #[arg(long, global = true, default_value_t = default_cap_bits())]
    #[serde(default = "default_cap_bits")]
    pub cap_bits: u64,

    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,

    /// Denominator for rounding, any size.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,

    /// Write the report here instead of stdout. Not echoed, so the report
    /// does not depend on where it was written.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

/// Inline JSON, or the path of a file holding it.
fn json_arg(s: &str) -> Result<Value, String> {
    let t = s.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        s.to_string()
    } else {
        std::fs::read_to_string(s).map_err(|e| format!("cannot read {s}: {e}"))?
    };
    serde_json::from_str(&text).map_err(|e| format!("bad JSON: {e}"))
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn missing(flag: &str) -> Failure {
    usage(format!("--{flag} is required"))
}

impl Params {
    /// Names of the optional flags that were given.
    pub fn given(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut add = |set: bool, name| {
            if set {
                out.push(name)
            }
        };
        add(self.space.is_some(), "space");
        add(self.point.is_some(), "point");
        add(self.psi.is_some(), "psi");
        add(self.phi.is_some(), "phi");
        add(self.max_height.is_some(), "max-height");
        add(self.window.is_some(), "window");
        add(self.bands.is_some(), "bands");
        add(self.levels.is_some(), "levels");
        add(self.mode.is_some(), "mode");
        add(self.n.is_some(), "n");
        add(self.trials.is_some(), "trials");
        add(self.shift.is_some(), "shift");
        add(self.n_max.is_some(), "n-max");
        add(self.x.is_some(), "x");
        add(self.preset.is_some(), "preset");
        add(self.choices.is_some(), "choices");
        add(self.eps.is_some(), "eps");
        add(self.q.is_some(), "q");
        out
    }

    /// Rejects flags the command does not read.
    pub fn allow(&self, allowed: &[&str]) -> Result<(), Failure> {
        match self.given().into_iter().find(|f| !allowed.contains(f)) {
            Some(f) => Err(usage(format!("--{f} is not used by `{}`", self.command))),
            None => Ok(()),
        }
    }

    pub fn space(&mut self) -> Result<SpaceDescriptor, Failure> {
        let v = self.space.as_ref().ok_or_else(|| missing("space"))?;
        let s: SpaceDescriptor = serde_json::from_value(v.clone()).map_err(|e| usage(format!("--space: {e}")))?;
        self.space = Some(serde_json::to_value(s).expect("space serializes"));
        Ok(s)
    }

    pub fn point(&mut self) -> Result<SparseRationalVector, Failure> {
        let v = self.point.as_ref().ok_or_else(|| missing("point"))?;
        let p: SparseRationalVector =
            serde_json::from_value(v.clone()).map_err(|e| usage(format!("--point: {e}")))?;
        self.point = Some(serde_json::to_value(&p).expect("point serializes"));
        Ok(p)
    }

    /// The shift for transversality trials; zero when absent.
    pub fn shift(&mut self) -> Result<BlockVector, Failure> {
        let Some(v) = self.shift.as_ref() else {
            return Ok(BlockVector::zero());
        };
        let j = serde_json::from_value(v.clone()).map_err(|e| usage(format!("--shift: {e}")))?;
        let b = BlockVector::from_json(&j).map_err(|e| usage(format!("--shift: {e}")))?;
        self.shift = Some(serde_json::to_value(&b).expect("shift serializes"));
        Ok(b)
    }

    fn function(slot: &mut Option<String>, flag: &str) -> Result<ApproxFunction, Failure> {
        let s = slot.as_ref().ok_or_else(|| missing(flag))?;
        let f = ApproxFunction::parse(s).map_err(|e| usage(format!("--{flag}: {e}")))?;
        *slot = Some(f.to_string());
        Ok(f)
    }

    pub fn psi(&mut self) -> Result<ApproxFunction, Failure> {
        Self::function(&mut self.psi, "psi")
    }

    pub fn phi(&mut self) -> Result<ApproxFunction, Failure> {
        Self::function(&mut self.phi, "phi")
    }

    pub fn mode(&self) -> Result<Mode, Failure> {
        match self.mode.as_deref() {
            Some("noncobounded") => Ok(Mode::Noncobounded),
            Some("cobounded") => Ok(Mode::Cobounded),
            Some(m) => Err(usage(format!("--mode must be noncobounded or cobounded, not {m:?}"))),
            None => Err(missing("mode")),
        }
    }

    pub fn window(&self) -> Result<(u64, u64), Failure> {
        parse_range(self.window.as_deref().ok_or_else(|| missing("window"))?, "window")
    }

    pub fn bands(&self) -> Result<Vec<(u64, u64)>, Failure> {
        let s = self.bands.as_deref().ok_or_else(|| missing("bands"))?;
        s.split(',').map(|b| parse_range(b, "bands")).collect()
    }

    pub fn choices(&self) -> Result<Vec<u64>, Failure> {
        let s = self.choices.as_deref().ok_or_else(|| missing("choices"))?;
        s.split(',')
            .map(|c| c.trim().parse().map_err(|_| usage(format!("--choices: bad index {c:?}"))))
            .collect()
    }

    pub fn rational(slot: &Option<String>, flag: &str) -> Result<Option<Rational>, Failure> {
        slot.as_deref()
            .map(|s| parse_rational(s).map_err(|e| usage(format!("--{flag}: {e}"))))
            .transpose()
    }

    pub fn q(&self) -> Result<BigUint, Failure> {
        let s = self.q.as_deref().ok_or_else(|| missing("q"))?;
        s.trim().parse().map_err(|_| usage(format!("--q: bad integer {s:?}")))
    }

    pub fn req<T: Copy>(v: Option<T>, flag: &str) -> Result<T, Failure> {
        v.ok_or_else(|| missing(flag))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Noncobounded,
    Cobounded,
}

fn parse_range(s: &str, flag: &str) -> Result<(u64, u64), Failure> {
    let bad = || usage(format!("--{flag}: expected lo:hi, got {s:?}"));
    let (lo, hi) = s.trim().split_once(':').ok_or_else(bad)?;
    let lo = lo.trim().parse().map_err(|_| bad())?;
    let hi = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range(" 3:40", "w").unwrap(), (3, 40));
        assert!(parse_range("3-40", "w").is_err());
        let p = Params {
            bands: Some("1:10,11:100".into()),
            ..Default::default()
        };
        assert_eq!(p.bands().unwrap(), vec![(1, 10), (11, 100)]);
    }

    #[test]
    fn unknown_config_fields_are_rejected() {
        let e = serde_json::from_str::<Params>(r#"{"command":"khinchin","colour":"red"}"#);
        assert!(e.is_err());
        let p: Params = serde_json::from_str(r#"{"command":"khinchin","psi":"pow:1"}"#).unwrap();
        assert_eq!(p.cap_bits, 1 << 20);
        assert_eq!(p.seed, 0);
    }

    #[test]
    fn functions_are_normalized() {
        let mut p = Params {
            psi: Some("powlog:1,1,0".into()),
            ..Default::default()
        };
        p.psi().unwrap();
        assert_eq!(p.psi.as_deref(), Some("pow:1"));
    }
}
