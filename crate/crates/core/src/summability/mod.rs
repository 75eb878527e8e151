//! Cesàro means, strong p-Cesàro residuals and the checkpoint verdicts built
//! on them.

pub(crate) mod cluster;
pub mod means;
pub mod policy;
pub mod statistical;
pub mod stolz;
pub mod strong;
pub mod verdict;

pub use means::{cesaro_mean, strong_p_residual};
pub use policy::CheckpointPolicy;
pub use statistical::{statistical_cauchy_check, statistical_verdict, CauchyReport, EpsSchedule};
pub use stolz::{stolz_cesaro_check, Direction, StolzReport};
pub use strong::{connor_cross_check, divergence_witness, wp_membership, wp_verdict, ConsistencyReport};
pub use verdict::{Certificate, Checkpoint, Outcome, OutcomeKind, SubsequenceRule, Verdict, Witness};
