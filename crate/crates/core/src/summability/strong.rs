use num_integer::Roots;
use serde_json::{json, Value};

use crate::error::Result;
use crate::numeric::{Exponent, Scalar};
use crate::point::Point;
use crate::sequence::SequenceSpec;
use crate::summability::means::residual_table;
use crate::summability::policy::CheckpointPolicy;
use crate::summability::statistical::{statistical_on, EpsSchedule};
use crate::summability::verdict::{
    decays, grows, Certificate, Checkpoint, Outcome, OutcomeKind, SubsequenceRule, Verdict, Witness,
};

/// Strong p-Cesàro verdict. Without a hint the limit candidate comes from the
/// statistical verdict.
pub fn wp_verdict<T: Scalar>(
    seq: &SequenceSpec,
    p: Exponent,
    policy: &CheckpointPolicy,
    hint: Option<&Point<T>>,
) -> Result<Verdict<T>> {
    policy.validate()?;
    let values = seq.prefix::<T>(policy.final_n())?;
    wp_on(&values, p, policy, hint)
}

pub(crate) fn wp_on<T: Scalar>(
    values: &[Point<T>],
    p: Exponent,
    policy: &CheckpointPolicy,
    hint: Option<&Point<T>>,
) -> Result<Verdict<T>> {
    if let Some(l) = hint {
        let mut v = wp_around(values, l, p, policy)?;
        v.notes.push("limit candidate supplied by caller".into());
        return Ok(v);
    }
    let stat = statistical_on(values, policy, &EpsSchedule::default())?;
    wp_from_stat(values, &stat, p, policy)
}

fn wp_from_stat<T: Scalar>(
    values: &[Point<T>],
    stat: &Verdict<T>,
    p: Exponent,
    policy: &CheckpointPolicy,
) -> Result<Verdict<T>> {
    match &stat.candidate {
        Some(l) => {
            let mut v = wp_around(values, l, p, policy)?;
            v.cluster_mass = stat.cluster_mass.clone();
            if !stat.outcome.converges() {
                v.notes.push("limit candidate is not a statistical limit".into());
            }
            Ok(v)
        }
        None => {
            let mut v = Verdict::inconclusive("no statistical limit candidate");
            v.cluster_mass = stat.cluster_mass.clone();
            v.notes.extend(stat.notes.iter().cloned());
            Ok(v)
        }
    }
}

fn wp_around<T: Scalar>(
    values: &[Point<T>],
    center: &Point<T>,
    p: Exponent,
    policy: &CheckpointPolicy,
) -> Result<Verdict<T>> {
    let evidence = residual_table(values, center, p, &policy.checkpoints(), policy.norm)?;
    let outcome = if decays(&evidence, policy) {
        Outcome::ConvergesTo(center.clone())
    } else if grows(&evidence, policy) {
        Outcome::Diverges
    } else {
        Outcome::Inconclusive
    };
    let mut v = Verdict::new(outcome, evidence);
    v.candidate = Some(center.clone());
    Ok(v)
}

/// Looks for a subsequence `n_j` (squares, cubes, then the checkpoints) along
/// which `(1/n_j) Σ_{k ≤ n_j} ‖x_k‖^p` keeps growing past the divergence
/// threshold. Such a subsequence rules out every limit.
pub fn divergence_witness<T: Scalar>(
    seq: &SequenceSpec,
    p: Exponent,
    policy: &CheckpointPolicy,
) -> Result<Option<Witness<T>>> {
    policy.validate()?;
    let values = seq.prefix::<T>(policy.final_n())?;
    witness_on(&values, p, policy)
}

pub(crate) fn witness_on<T: Scalar>(
    values: &[Point<T>],
    p: Exponent,
    policy: &CheckpointPolicy,
) -> Result<Option<Witness<T>>> {
    let cps = policy.checkpoints();
    let mut sums = Vec::with_capacity(values.len());
    let mut acc = T::zero();
    for x in values {
        if !x.is_zero() {
            acc = acc + x.norm_pow(policy.norm, p)?;
        }
        sums.push(acc.clone());
    }
    let average = |n: u64| Checkpoint::new(n, sums[(n - 1) as usize].clone() / T::from_i64(n as i64));
    let len = values.len() as u64;
    let squares: Vec<u64> = (1..=len.sqrt()).map(|j| j * j).collect();
    let cubes: Vec<u64> = (1..=len.cbrt()).map(|r| r * r * r).collect();
    let rules = [
        (SubsequenceRule::Squares, squares),
        (SubsequenceRule::Cubes, cubes),
        (SubsequenceRule::Checkpoints, cps.clone()),
    ];
    for (rule, indices) in rules {
        let terms: Vec<Checkpoint<T>> = indices.iter().map(|&n| average(n)).collect();
        let sampled: Option<Vec<Checkpoint<T>>> = cps[cps.len() - 3..]
            .iter()
            .map(|&c| terms.iter().rev().find(|t| t.n <= c).cloned())
            .collect();
        match sampled {
            Some(s) if s.windows(2).all(|w| w[0].n < w[1].n) && grows(&s, policy) => {
                return Ok(Some(Witness { rule, terms }));
            }
            _ => {}
        }
    }
    Ok(None)
}

/// `wp_verdict`, falling back to a divergence witness when no limit is
/// confirmed.
pub fn wp_membership<T: Scalar>(
    seq: &SequenceSpec,
    p: Exponent,
    policy: &CheckpointPolicy,
) -> Result<Verdict<T>> {
    policy.validate()?;
    let values = seq.prefix::<T>(policy.final_n())?;
    membership_on(&values, p, policy)
}

pub(crate) fn membership_on<T: Scalar>(
    values: &[Point<T>],
    p: Exponent,
    policy: &CheckpointPolicy,
) -> Result<Verdict<T>> {
    let mut v = wp_on(values, p, policy, None)?;
    if !v.outcome.converges() {
        if let Some(w) = witness_on(values, p, policy)? {
            v.outcome = Outcome::Diverges;
            v.certificate = Certificate::Witness;
            v.witness = Some(w);
        }
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyReport<T> {
    pub stat: Verdict<T>,
    pub wp: Verdict<T>,
    /// Whether the sup of `‖x_k‖` settled over the last checkpoints.
    pub bounded: bool,
    pub sup_norm: f64,
    /// Number of terms the sup was taken over.
    pub sample_bound: u64,
    pub consistent: bool,
    pub notes: Vec<String>,
}

impl<T: Scalar> ConsistencyReport<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "stat": self.stat.to_json(),
            "wp": self.wp.to_json(),
            "bounded": self.bounded,
            "sup_norm": self.sup_norm,
            "sample_bound": self.sample_bound,
            "consistent": self.consistent,
            "notes": self.notes,
        })
    }
}

/// Growth allowed in the running sup of `‖x_k‖` between the third-to-last and
/// the last checkpoint for the prefix to count as bounded.
const SUP_SLACK: f64 = 1.05;

/// Runs the statistical and strong p-Cesàro verdicts against the same
/// candidate and checks they agree where boundedness forces them to.
pub fn connor_cross_check<T: Scalar>(
    seq: &SequenceSpec,
    p: Exponent,
    policy: &CheckpointPolicy,
) -> Result<ConsistencyReport<T>> {
    policy.validate()?;
    let cps = policy.checkpoints();
    let values = seq.prefix::<T>(*cps.last().expect("count >= 3"))?;
    let stat = statistical_on(&values, policy, &EpsSchedule::default())?;
    let wp = wp_from_stat(&values, &stat, p, policy)?;

    let two = Exponent::integer(2)?;
    let mut sup = 0.0f64;
    let mut sup_at = Vec::with_capacity(cps.len());
    let mut next = 0;
    for (i, x) in values.iter().enumerate() {
        sup = sup.max(x.norm_pow(policy.norm, two)?.to_f64().sqrt());
        if i as u64 + 1 == cps[next] {
            sup_at.push(sup);
            next += 1;
        }
    }
    let earlier = sup_at[sup_at.len() - 3];
    let bounded = sup <= SUP_SLACK * earlier;

    let disagree = matches!(
        (stat.kind(), wp.kind()),
        (OutcomeKind::ConvergesTo, OutcomeKind::Diverges) | (OutcomeKind::Diverges, OutcomeKind::ConvergesTo)
    );
    let consistent = !(bounded && disagree);
    let mut notes = Vec::new();
    if !bounded && stat.kind() != wp.kind() {
        notes.push(format!(
            "sup of the norms grows from {earlier} to {sup} over the last checkpoints; \
             boundedness is necessary for the converse"
        ));
    }
    if !consistent {
        notes.push("bounded sequence with contradicting statistical and strong verdicts".into());
    }
    Ok(ConsistencyReport {
        stat,
        wp,
        bounded,
        sup_norm: sup,
        sample_bound: values.len() as u64,
        consistent,
        notes,
    })
}
