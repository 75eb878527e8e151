use serde_json::{json, Value};

use crate::density::{classify_density, exceed_tables, DensityOutcome};
use crate::error::{Error, Result};
use crate::numeric::{Num, Rational, Scalar};
use crate::point::Point;
use crate::sequence::SequenceSpec;
use crate::summability::cluster::densest_cluster;
use crate::summability::policy::CheckpointPolicy;
use crate::summability::verdict::{Checkpoint, Outcome, Verdict};

/// Strictly decreasing positive radii for the exceed-sets.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsSchedule(Vec<Num>);

impl EpsSchedule {
    pub fn new(eps: Vec<Num>) -> Result<Self> {
        if eps.is_empty() {
            return Err(Error::invalid("eps schedule is empty"));
        }
        if eps.iter().any(|e| !e.is_positive()) {
            return Err(Error::invalid("eps values must be positive"));
        }
        if eps.windows(2).any(|w| w[1].exact() >= w[0].exact()) {
            return Err(Error::invalid("eps schedule must be strictly decreasing"));
        }
        Ok(EpsSchedule(eps))
    }

    pub fn values(&self) -> &[Num] {
        &self.0
    }

    pub fn smallest(&self) -> &Num {
        self.0.last().expect("nonempty")
    }
}

impl Default for EpsSchedule {
    fn default() -> Self {
        EpsSchedule(vec![Num::int(1), Num::ratio(1, 2), Num::ratio(1, 4), Num::ratio(1, 8)])
    }
}

pub fn statistical_verdict<T: Scalar>(
    seq: &SequenceSpec,
    policy: &CheckpointPolicy,
    eps: &EpsSchedule,
) -> Result<Verdict<T>> {
    policy.validate()?;
    let values = seq.prefix::<T>(policy.final_n())?;
    statistical_on(&values, policy, eps)
}

fn density_to_checkpoints<T: Scalar>(table: &[(u64, Rational)]) -> Vec<Checkpoint<T>> {
    table
        .iter()
        .map(|(n, d)| Checkpoint::new(*n, T::from_rational(d)))
        .collect()
}

/// Clusters the tail window `(n/2, n]` of the final checkpoint, then checks
/// that every exceed-set around the centroid has density 0.
pub(crate) fn statistical_on<T: Scalar>(
    values: &[Point<T>],
    policy: &CheckpointPolicy,
    eps: &EpsSchedule,
) -> Result<Verdict<T>> {
    let cps = policy.checkpoints();
    let n = values.len();
    let radius = T::from_num(eps.smallest());
    let Some(cluster) = densest_cluster(&values[n / 2..], &radius) else {
        return Ok(Verdict::inconclusive("empty prefix"));
    };
    let mass = cluster.size as f64 / cluster.total as f64;
    let mass_t = T::from_ratio(cluster.size as i64, cluster.total as u64);
    if mass < 1.0 - policy.band {
        let mut v = Verdict::inconclusive(format!(
            "densest cluster of radius {} holds {} of the tail window ({} of {} terms)",
            eps.smallest(),
            mass_t.render(),
            cluster.size,
            cluster.total
        ));
        v.cluster_mass = Some(mass_t);
        return Ok(v);
    }
    let center = cluster.centroid;
    let radii: Vec<T> = eps.values().iter().map(T::from_num).collect();
    let tables = exceed_tables(values, &center, &radii, &cps, policy.norm)?;
    let mut failing = Vec::new();
    for (e, table) in eps.values().iter().zip(&tables) {
        let (outcome, _) = classify_density(table, Some(&Rational::from_i64(0)), policy);
        if outcome != DensityOutcome::ConvergesTo(Rational::from_i64(0)) {
            failing.push(e.to_string());
        }
    }
    let evidence = density_to_checkpoints(tables.last().expect("nonempty schedule"));
    let mut v = if failing.is_empty() {
        Verdict::new(Outcome::ConvergesTo(center.clone()), evidence)
    } else {
        let mut v = Verdict::new(Outcome::Inconclusive, evidence);
        v.notes.push(format!("exceed-set density is not 0 for eps in [{}]", failing.join(", ")));
        v
    };
    v.candidate = Some(center);
    v.cluster_mass = Some(mass_t);
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CauchyReport<T> {
    pub found_p0: Option<u64>,
    pub anchor: Option<Point<T>>,
    /// Exceed-set densities for the found anchor, or for the anchor with the
    /// smallest final density when none qualified.
    pub density_evidence: Vec<(u64, Rational)>,
    pub min_density: Rational,
    pub candidates_checked: usize,
}

impl<T: Scalar> CauchyReport<T> {
    pub fn to_json(&self) -> Value {
        let d = |q: &Rational| T::from_rational(q).to_json();
        json!({
            "found_p0": self.found_p0,
            "anchor": self.anchor.as_ref().map(Point::to_json),
            "checkpoints": self.density_evidence.iter().map(|(n, q)| json!([n, d(q)])).collect::<Vec<_>>(),
            "min_density": d(&self.min_density),
            "candidates_checked": self.candidates_checked,
        })
    }
}

/// Searches an anchor `p0` among `n, ..., n + n0` and the checkpoints `≥ n`
/// whose exceed-set `{k : ‖x_k − x_p0‖ ≥ eps}` has density 0.
pub fn statistical_cauchy_check<T: Scalar>(
    seq: &SequenceSpec,
    eps: &Num,
    n: u64,
    policy: &CheckpointPolicy,
) -> Result<CauchyReport<T>> {
    policy.validate()?;
    if !eps.is_positive() {
        return Err(Error::invalid("eps must be positive"));
    }
    if n == 0 {
        return Err(Error::invalid("indices start at 1"));
    }
    let cps = policy.checkpoints();
    let values = seq.prefix::<T>(*cps.last().expect("count >= 3"))?;
    let mut candidates: Vec<u64> = (n..=n + policy.n0).collect();
    candidates.extend(cps.iter().copied().filter(|&c| c > n + policy.n0));
    let radius = [T::from_num(eps)];
    let zero = Rational::from_i64(0);
    let mut seen: Vec<Point<T>> = Vec::new();
    let mut best: Option<(Rational, Vec<(u64, Rational)>)> = None;
    for &p0 in &candidates {
        let anchor = match values.get((p0 - 1) as usize) {
            Some(x) => x.clone(),
            None => seq.eval(p0)?,
        };
        if seen.contains(&anchor) {
            continue;
        }
        seen.push(anchor.clone());
        let table = exceed_tables(&values, &anchor, &radius, &cps, policy.norm)?.remove(0);
        let (outcome, _) = classify_density(&table, Some(&zero), policy);
        if outcome.is_zero() {
            return Ok(CauchyReport {
                found_p0: Some(p0),
                anchor: Some(anchor),
                min_density: table.last().expect("count >= 3").1.clone(),
                density_evidence: table,
                candidates_checked: seen.len(),
            });
        }
        let last = table.last().expect("count >= 3").1.clone();
        if best.as_ref().is_none_or(|(d, _)| last < *d) {
            best = Some((last, table));
        }
    }
    let (min_density, density_evidence) = best.expect("at least one candidate");
    Ok(CauchyReport {
        found_p0: None,
        anchor: None,
        min_density,
        density_evidence,
        candidates_checked: seen.len(),
    })
}
