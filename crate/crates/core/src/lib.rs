//! Diophantine approximation over lattices in sequence spaces, computed
//! exactly.
//!
//! Points are finitely supported rational vectors, heights are the standard
//! (lcm of denominators) height, and every inequality is decided in exact
//! arithmetic, falling back to certified enclosures only where a threshold
//! is irrational.

pub mod approx;
pub mod arith;
pub mod constructions;
pub mod error;
pub mod function;
pub mod interval;
pub mod metric;
pub mod optimality;
pub mod spaces;
pub mod vector;

pub use approx::{best_approx, dirichlet_rounding, dirichlet_witness_finite, min_ratio, CertificateReport, RatioValue, WitnessReport};
pub use arith::Rational;
pub use error::{Error, Result};
pub use function::{
    compare_threshold, growth_compare, khinchin_classify, psi_int, psi_s, ApproxFunction, GrowthVerdict,
    KhinchinVerdict, QSequence, ThresholdOrdering,
};
pub use metric::{height_std, DistValue, Norm};
pub use spaces::{space_info, SpaceDescriptor, SpaceInfo};
pub use vector::{BlockVector, SparseRationalVector};

/// Library version, echoed in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
