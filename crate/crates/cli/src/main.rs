//! `latdioph`: run one experiment and print a JSON report.
//!
//! Exit codes: 0 on success, 1 on a usage error, 2 when a checked
//! postcondition fails.

mod config;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use config::Params;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Violation(String),
}

impl From<latdioph::Error> for Failure {
    fn from(e: latdioph::Error) -> Self {
        if e.is_invariant_violation() {
            Failure::Violation(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "latdioph", version, about = "Exact Diophantine approximation experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    params: Params,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Lattice constants of a space.
    Space {
        #[command(subcommand)]
        op: SpaceOp,
    },
    /// Approximation searches and certificates.
    Approx {
        #[command(subcommand)]
        op: ApproxOp,
    },
    /// Badly and well approximable point constructions.
    Construct {
        #[command(subcommand)]
        op: ConstructOp,
    },
    /// Counting claims at one level around random centres.
    Claims,
    /// Level-event frequencies over seeded random samples.
    Transversality,
    /// Optimality of Dirichlet functions.
    Optimality {
        #[command(subcommand)]
        op: OptimalityOp,
    },
    /// Growth comparison of two functions.
    Growth {
        #[command(subcommand)]
        op: GrowthOp,
    },
    /// Convergence of the Khinchin series.
    Khinchin,
    /// Run a saved config, e.g. the "config" object of an earlier report.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum SpaceOp {
    Info,
}

#[derive(Subcommand, Debug)]
enum ApproxOp {
    Best,
    Dirichlet,
    Rounding,
    Certify,
}

#[derive(Subcommand, Debug)]
enum ConstructOp {
    Ba,
    Wa,
}

#[derive(Subcommand, Debug)]
enum OptimalityOp {
    Counterexample,
    Psiq,
    Improve,
    Refute,
}

#[derive(Subcommand, Debug)]
enum GrowthOp {
    Compare,
}

impl Cmd {
    fn path(&self) -> &'static str {
        match self {
            Cmd::Space { op: SpaceOp::Info } => "space info",
            Cmd::Approx { op } => match op {
                ApproxOp::Best => "approx best",
                ApproxOp::Dirichlet => "approx dirichlet",
                ApproxOp::Rounding => "approx rounding",
                ApproxOp::Certify => "approx certify",
            },
            Cmd::Construct { op: ConstructOp::Ba } => "construct ba",
            Cmd::Construct { op: ConstructOp::Wa } => "construct wa",
            Cmd::Claims => "claims",
            Cmd::Transversality => "transversality",
            Cmd::Optimality { op } => match op {
                OptimalityOp::Counterexample => "optimality counterexample",
                OptimalityOp::Psiq => "optimality psiq",
                OptimalityOp::Improve => "optimality improve",
                OptimalityOp::Refute => "optimality refute",
            },
            Cmd::Growth { op: GrowthOp::Compare } => "growth compare",
            Cmd::Khinchin => "khinchin",
            Cmd::Run { .. } => "run",
        }
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    config: &'a Params,
    results: Value,
    version: &'static str,
    invariant_violation: bool,
}

fn load_config(path: &PathBuf) -> Result<Params, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
}

fn emit(line: &str, output: Option<&PathBuf>) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Usage(format!("writing report: {e}"));
    match output {
        Some(path) => std::fs::write(path, format!("{line}\n")).map_err(io),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{line}").map_err(io)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut params = match &cli.cmd {
        Cmd::Run { config } => match load_config(config) {
            Ok(mut p) => {
                if cli.params.output.is_some() {
                    p.output = cli.params.output.clone();
                }
                p
            }
            Err(Failure::Usage(m) | Failure::Violation(m)) => {
                eprintln!("error: {m}");
                return ExitCode::from(1);
            }
        },
        cmd => Params {
            command: cmd.path().to_string(),
            ..cli.params.clone()
        },
    };

    let start = Instant::now();
    let outcome = run::run(&mut params);
    eprintln!("{}: {:.3}s", params.command, start.elapsed().as_secs_f64());

    let (results, violated) = match outcome {
        Ok(o) => (o.results, o.violated),
        Err(Failure::Violation(m)) => (json!({ "error": m }), true),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(1);
        }
    };
    let report = RunReport {
        config: &params,
        results,
        version: latdioph::VERSION,
        invariant_violation: violated,
    };
    let line = serde_json::to_string(&report).expect("report serializes");
    if let Err(Failure::Usage(m) | Failure::Violation(m)) = emit(&line, params.output.as_ref()) {
        eprintln!("error: {m}");
        return ExitCode::from(1);
    }
    if violated {
        eprintln!("invariant violation: a checked postcondition failed");
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
