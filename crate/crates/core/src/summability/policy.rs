use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::point::NormKind;

/// Geometric evaluation schedule plus the thresholds every asymptotic claim
/// is decided with.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckpointPolicy {
    /// First checkpoint.
    pub n0: u64,
    /// Ratio between consecutive checkpoints.
    pub growth: f64,
    pub count: usize,
    /// A vanishing quantity must end below this.
    pub abs_tol: f64,
    /// ...and end below this fraction of its first checkpoint value.
    pub decay_ratio: f64,
    /// A divergent quantity must end above this.
    pub div_threshold: f64,
    /// Plateau width for stabilizing quantities.
    pub band: f64,
    /// Norm used for every distance.
    pub norm: NormKind,
}

/// Largest final checkpoint a policy may request.
pub const MAX_CHECKPOINT: u64 = 100_000_000;

impl Default for CheckpointPolicy {
    fn default() -> Self {
        CheckpointPolicy {
            n0: 64,
            growth: 2.0,
            count: 14,
            abs_tol: 0.1,
            decay_ratio: 0.2,
            div_threshold: 10.0,
            band: 0.02,
            norm: NormKind::Max,
        }
    }
}

impl CheckpointPolicy {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::invalid(format!("checkpoint policy: {msg}")));
        if self.n0 < 1 {
            return fail("n0 must be at least 1");
        }
        if !(self.growth > 1.0) || !self.growth.is_finite() {
            return fail("growth must be a finite ratio > 1");
        }
        if self.count < 3 {
            return fail("count must be at least 3");
        }
        if !(self.abs_tol > 0.0) {
            return fail("abs_tol must be positive");
        }
        if !(self.div_threshold > self.abs_tol) {
            return fail("div_threshold must exceed abs_tol");
        }
        if !(self.decay_ratio > 0.0 && self.decay_ratio <= 1.0) {
            return fail("decay_ratio must lie in (0, 1]");
        }
        if !(self.band > 0.0) {
            return fail("band must be positive");
        }
        let last = self.n0 as f64 * self.growth.powi(self.count as i32 - 1);
        if last > MAX_CHECKPOINT as f64 {
            return fail("final checkpoint exceeds 10^8");
        }
        Ok(())
    }

    /// `round(n0 · growth^i)` for `i < count`, bumped where rounding would
    /// repeat a value so the list is strictly increasing.
    pub fn checkpoints(&self) -> Vec<u64> {
        let mut out: Vec<u64> = Vec::with_capacity(self.count);
        for i in 0..self.count {
            let raw = (self.n0 as f64 * self.growth.powi(i as i32)).round() as u64;
            let n = match out.last() {
                Some(&prev) if raw <= prev => prev + 1,
                _ => raw.max(1),
            };
            out.push(n);
        }
        out
    }

    pub fn final_n(&self) -> u64 {
        *self.checkpoints().last().expect("count >= 3")
    }

    /// Minimum ratio between the last two increments of a divergent trend.
    /// A quantity approaching a finite limit like `1/n` has increments that
    /// shrink by `1/growth` per checkpoint and stays below it.
    pub(crate) fn min_increment_ratio(&self) -> f64 {
        (1.0 + 1.0 / self.growth) / 2.0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n0": self.n0,
            "growth": self.growth,
            "count": self.count,
            "abs_tol": self.abs_tol,
            "decay_ratio": self.decay_ratio,
            "div_threshold": self.div_threshold,
            "band": self.band,
            "norm": self.norm.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule() {
        let p = CheckpointPolicy::default();
        p.validate().unwrap();
        let cps = p.checkpoints();
        assert_eq!(cps.len(), 14);
        assert_eq!(cps[0], 64);
        assert_eq!(*cps.last().unwrap(), 524_288);
    }

    #[test]
    fn rounding_collisions_are_bumped() {
        let p = CheckpointPolicy {
            n0: 1,
            growth: 1.1,
            count: 5,
            ..Default::default()
        };
        assert_eq!(p.checkpoints(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn invalid_policies() {
        let bad = [
            CheckpointPolicy { n0: 0, ..Default::default() },
            CheckpointPolicy { growth: 1.0, ..Default::default() },
            CheckpointPolicy { count: 2, ..Default::default() },
            CheckpointPolicy { abs_tol: 0.0, ..Default::default() },
            CheckpointPolicy { div_threshold: 0.05, ..Default::default() },
            CheckpointPolicy { band: 0.0, ..Default::default() },
            CheckpointPolicy { count: 40, ..Default::default() },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }
}
