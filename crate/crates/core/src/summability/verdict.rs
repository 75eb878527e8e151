use std::fmt;

use serde_json::{json, Value};

use crate::numeric::Scalar;
use crate::point::Point;
use crate::summability::policy::CheckpointPolicy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    ConvergesTo,
    Diverges,
    Inconclusive,
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutcomeKind::ConvergesTo => "ConvergesTo",
            OutcomeKind::Diverges => "Diverges",
            OutcomeKind::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome<T> {
    ConvergesTo(Point<T>),
    Diverges,
    Inconclusive,
}

impl<T: Scalar> Outcome<T> {
    pub fn kind(&self) -> OutcomeKind {
        match self {
            Outcome::ConvergesTo(_) => OutcomeKind::ConvergesTo,
            Outcome::Diverges => OutcomeKind::Diverges,
            Outcome::Inconclusive => OutcomeKind::Inconclusive,
        }
    }

    pub fn limit(&self) -> Option<&Point<T>> {
        match self {
            Outcome::ConvergesTo(l) => Some(l),
            _ => None,
        }
    }

    pub fn converges(&self) -> bool {
        matches!(self, Outcome::ConvergesTo(_))
    }

    pub fn diverges(&self) -> bool {
        matches!(self, Outcome::Diverges)
    }
}

/// What a verdict actually certifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Behavior observed up to the final checkpoint only.
    Truncation,
    /// A subsequence along which the p-th power averages blow up; rules out
    /// every limit.
    Witness,
    /// Growth of a residual for one particular candidate limit.
    Trend,
    None,
}

impl Certificate {
    pub fn name(&self) -> &'static str {
        match self {
            Certificate::Truncation => "truncation",
            Certificate::Witness => "witness",
            Certificate::Trend => "trend",
            Certificate::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint<T> {
    pub n: u64,
    pub value: T,
}

impl<T: Scalar> Checkpoint<T> {
    pub fn new(n: u64, value: T) -> Self {
        Checkpoint { n, value }
    }

    pub fn to_json(&self) -> Value {
        json!([self.n, self.value.to_json()])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsequenceRule {
    Squares,
    Cubes,
    Checkpoints,
}

impl SubsequenceRule {
    pub fn name(&self) -> &'static str {
        match self {
            SubsequenceRule::Squares => "squares",
            SubsequenceRule::Cubes => "cubes",
            SubsequenceRule::Checkpoints => "checkpoints",
        }
    }
}

/// Indices `n_j` with the averages `(1/n_j) Σ_{k ≤ n_j} ‖x_k‖^p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness<T> {
    pub rule: SubsequenceRule,
    pub terms: Vec<Checkpoint<T>>,
}

impl<T: Scalar> Witness<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule.name(),
            "terms": self.terms.iter().map(Checkpoint::to_json).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict<T> {
    pub outcome: Outcome<T>,
    pub evidence: Vec<Checkpoint<T>>,
    pub certificate: Certificate,
    /// Limit candidate the verdict was evaluated against, if any.
    pub candidate: Option<Point<T>>,
    /// Fraction of the tail window held by the densest cluster.
    pub cluster_mass: Option<T>,
    pub witness: Option<Witness<T>>,
    pub notes: Vec<String>,
}

impl<T: Scalar> Verdict<T> {
    pub fn new(outcome: Outcome<T>, evidence: Vec<Checkpoint<T>>) -> Self {
        let certificate = match outcome {
            Outcome::ConvergesTo(_) => Certificate::Truncation,
            Outcome::Diverges => Certificate::Trend,
            Outcome::Inconclusive => Certificate::None,
        };
        Verdict {
            outcome,
            evidence,
            certificate,
            candidate: None,
            cluster_mass: None,
            witness: None,
            notes: Vec::new(),
        }
    }

    pub fn inconclusive(note: impl Into<String>) -> Self {
        let mut v = Verdict::new(Outcome::Inconclusive, Vec::new());
        v.notes.push(note.into());
        v
    }

    pub fn kind(&self) -> OutcomeKind {
        self.outcome.kind()
    }

    pub fn final_value(&self) -> Option<&T> {
        self.evidence.last().map(|c| &c.value)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "outcome": self.kind().to_string(),
            "limit": self.outcome.limit().map(Point::to_json),
            "certificate": self.certificate.name(),
            "checkpoints": self.evidence.iter().map(Checkpoint::to_json).collect::<Vec<_>>(),
            "candidate_L": self.candidate.as_ref().map(Point::to_json),
            "cluster_mass": self.cluster_mass.as_ref().map(Scalar::to_json),
            "witness": self.witness.as_ref().map(Witness::to_json),
            "notes": self.notes,
        })
    }
}

fn last3<T: Scalar>(ev: &[Checkpoint<T>]) -> Option<[f64; 3]> {
    let n = ev.len();
    (n >= 3).then(|| {
        [
            ev[n - 3].value.to_f64(),
            ev[n - 2].value.to_f64(),
            ev[n - 1].value.to_f64(),
        ]
    })
}

/// Final value below `abs_tol` and below `decay_ratio` times the largest
/// checkpoint value.
pub(crate) fn decays<T: Scalar>(ev: &[Checkpoint<T>], policy: &CheckpointPolicy) -> bool {
    let Some(last) = ev.last().map(|c| c.value.to_f64()) else {
        return false;
    };
    if !(last < policy.abs_tol) {
        return false;
    }
    let peak = ev.iter().map(|c| c.value.to_f64()).fold(0.0, f64::max);
    last == 0.0 || (peak > 0.0 && last / peak < policy.decay_ratio)
}

/// Final value above `div_threshold`, strictly increasing over the last three
/// checkpoints, and the last increment not shrinking the way a convergent
/// approach would.
pub(crate) fn grows<T: Scalar>(ev: &[Checkpoint<T>], policy: &CheckpointPolicy) -> bool {
    let Some([a, b, c]) = last3(ev) else {
        return false;
    };
    c > policy.div_threshold && a < b && b < c && (c - b) >= policy.min_increment_ratio() * (b - a)
}

/// Last three values within `band` of the final one.
pub(crate) fn plateaus<T: Scalar>(ev: &[Checkpoint<T>], policy: &CheckpointPolicy) -> bool {
    let Some([a, b, c]) = last3(ev) else {
        return false;
    };
    c.is_finite() && (a - c).abs() <= policy.band && (b - c).abs() <= policy.band
}
