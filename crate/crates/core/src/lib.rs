//! Strong p-Cesàro summability, statistical convergence and natural density
//! for sequences in `R^d`, with the series spaces built on them.
//!
//! Every analysis runs on a finite prefix sampled at geometric checkpoints
//! ([`CheckpointPolicy`]) and returns a [`Verdict`] carrying the evidence.
//! Arithmetic is generic over [`Scalar`]: exact rationals or `f64`.

pub mod cli;
pub mod density;
pub mod dsl;
pub mod error;
pub mod numeric;
pub mod point;
pub mod report;
pub mod sequence;
pub mod series;
pub mod summability;
pub mod table;

pub use density::{density_verdict, prefix_density, DensityEstimate, DensityOutcome, IndexSet};
pub use error::{Error, Result};
pub use numeric::{Exponent, Mode, Num, Rational, Scalar};
pub use point::{NormKind, Point};
pub use sequence::SequenceSpec;
pub use series::{CoefficientSpec, SeriesSpec};
pub use summability::{CheckpointPolicy, Outcome, OutcomeKind, Verdict};
