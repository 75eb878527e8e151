//! Index sets, their prefix densities `card{k ≤ n : k ∈ A} / n`, and the
//! checkpoint estimate of the asymptotic density.

use std::sync::Arc;

use num_integer::Roots;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numeric::{Exponent, Num, Rational, Scalar};
use crate::point::{NormKind, Point};
use crate::sequence::SequenceSpec;
use crate::summability::policy::CheckpointPolicy;

#[derive(Clone, Debug)]
pub enum IndexSet {
    All,
    Cubes,
    Squares,
    /// `start, start + step, start + 2·step, ...`
    Progression { start: u64, step: u64 },
    Evens,
    Odds,
    /// Sorted, deduplicated, all positive.
    Explicit(Arc<[u64]>),
    /// `{k : ‖x_k − center‖ ≥ eps}`.
    Exceed {
        seq: SequenceSpec,
        center: Vec<Num>,
        eps: Num,
        norm: NormKind,
    },
    Complement(Box<IndexSet>),
    Union(Box<IndexSet>, Box<IndexSet>),
}

pub type MembershipStream<'a> = Box<dyn Iterator<Item = Result<bool>> + 'a>;

impl IndexSet {
    pub fn progression(start: u64, step: u64) -> Result<Self> {
        if start == 0 || step == 0 {
            return Err(Error::invalid("progression needs start >= 1 and step >= 1"));
        }
        Ok(IndexSet::Progression { start, step })
    }

    pub fn explicit(indices: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut v: Vec<u64> = indices.into_iter().collect();
        if v.contains(&0) {
            return Err(Error::invalid("indices start at 1"));
        }
        v.sort_unstable();
        v.dedup();
        Ok(IndexSet::Explicit(v.into()))
    }

    pub fn empty() -> Self {
        IndexSet::Explicit(Arc::from(Vec::new()))
    }

    pub fn exceed(seq: SequenceSpec, center: Vec<Num>, eps: Num, norm: NormKind) -> Result<Self> {
        if center.len() != seq.dim() {
            return Err(Error::Dimension {
                expected: seq.dim(),
                got: center.len(),
            });
        }
        if !eps.is_positive() {
            return Err(Error::invalid("eps must be positive"));
        }
        Ok(IndexSet::Exceed {
            seq,
            center,
            eps,
            norm,
        })
    }

    pub fn complement(self) -> Self {
        IndexSet::Complement(Box::new(self))
    }

    pub fn union(self, other: IndexSet) -> Self {
        IndexSet::Union(Box::new(self), Box::new(other))
    }

    pub fn contains<T: Scalar>(&self, k: u64) -> Result<bool> {
        Ok(match self {
            IndexSet::All => true,
            IndexSet::Cubes => k.cbrt().pow(3) == k,
            IndexSet::Squares => k.sqrt().pow(2) == k,
            IndexSet::Progression { start, step } => k >= *start && (k - start).is_multiple_of(*step),
            IndexSet::Evens => k.is_multiple_of(2),
            IndexSet::Odds => k % 2 == 1,
            IndexSet::Explicit(v) => v.binary_search(&k).is_ok(),
            IndexSet::Exceed {
                seq,
                center,
                eps,
                norm,
            } => {
                let c = Point::from_nums(center);
                exceeds(&seq.eval::<T>(k)?, &c, &T::from_num(eps), *norm)?
            }
            IndexSet::Complement(a) => !a.contains::<T>(k)?,
            IndexSet::Union(a, b) => a.contains::<T>(k)? || b.contains::<T>(k)?,
        })
    }

    pub fn is_random_access(&self) -> bool {
        match self {
            IndexSet::Exceed { seq, .. } => seq.is_random_access(),
            IndexSet::Complement(a) => a.is_random_access(),
            IndexSet::Union(a, b) => a.is_random_access() && b.is_random_access(),
            _ => true,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            IndexSet::Explicit(_) => true,
            IndexSet::Union(a, b) => a.is_finite() && b.is_finite(),
            _ => false,
        }
    }

    /// Exact density for the structured rules.
    pub fn closed_form_density(&self) -> Option<Rational> {
        let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
        match self {
            IndexSet::All => Some(Rational::one()),
            IndexSet::Cubes | IndexSet::Squares | IndexSet::Explicit(_) => Some(Rational::zero()),
            IndexSet::Progression { step, .. } => Some(Rational::new(1.into(), (*step).into())),
            IndexSet::Evens | IndexSet::Odds => Some(q(1, 2)),
            IndexSet::Complement(a) => a.closed_form_density().map(|d| Rational::one() - d),
            IndexSet::Union(a, b) if a.is_finite() => b.closed_form_density(),
            IndexSet::Union(a, b) if b.is_finite() => a.closed_form_density(),
            IndexSet::Union(..) | IndexSet::Exceed { .. } => None,
        }
    }

    /// `card{k ≤ n : k ∈ A}` without enumeration, where a formula exists.
    fn closed_count(&self, n: u64) -> Option<u64> {
        match self {
            IndexSet::All => Some(n),
            IndexSet::Cubes => Some(n.cbrt()),
            IndexSet::Squares => Some(n.sqrt()),
            IndexSet::Progression { start, step } => {
                Some(if n < *start { 0 } else { (n - start) / step + 1 })
            }
            IndexSet::Evens => Some(n / 2),
            IndexSet::Odds => Some(n.div_ceil(2)),
            IndexSet::Explicit(v) => Some(v.partition_point(|&k| k <= n) as u64),
            IndexSet::Complement(a) => a.closed_count(n).map(|c| n - c),
            IndexSet::Union(..) | IndexSet::Exceed { .. } => None,
        }
    }

    /// Membership of `1, 2, 3, ...` in order.
    pub fn membership_stream<T: Scalar>(&self) -> MembershipStream<'_> {
        match self {
            IndexSet::Exceed {
                seq,
                center,
                eps,
                norm,
            } => {
                let c = Point::<T>::from_nums(center);
                let eps = T::from_num(eps);
                let norm = *norm;
                Box::new(
                    seq.stream::<T>()
                        .map(move |x| exceeds(&x?, &c, &eps, norm)),
                )
            }
            IndexSet::Complement(a) if !a.is_random_access() => {
                Box::new(a.membership_stream::<T>().map(|m| m.map(|b| !b)))
            }
            IndexSet::Union(a, b) if !self.is_random_access() => Box::new(
                a.membership_stream::<T>()
                    .zip(b.membership_stream::<T>())
                    .map(|(x, y)| Ok(x? || y?)),
            ),
            _ => Box::new((1u64..).map(move |k| self.contains::<T>(k))),
        }
    }

    pub fn count_upto<T: Scalar>(&self, n: u64) -> Result<u64> {
        if let Some(c) = self.closed_count(n) {
            return Ok(c);
        }
        let mut count = 0;
        for m in self.membership_stream::<T>().take(n as usize) {
            count += u64::from(m?);
        }
        Ok(count)
    }
}

/// `‖x − center‖ ≥ eps`, compared through squares so the euclidean case
/// needs no root.
pub(crate) fn exceeds<T: Scalar>(x: &Point<T>, center: &Point<T>, eps: &T, norm: NormKind) -> Result<bool> {
    x.check_dim(center.dim())?;
    let two = Exponent::integer(2)?;
    Ok(x.distance_pow(center, norm, two)? >= eps.clone() * eps.clone())
}

pub fn prefix_density<T: Scalar>(set: &IndexSet, n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::invalid("prefix density needs n >= 1"));
    }
    Ok(Rational::new(set.count_upto::<T>(n)?.into(), n.into()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum DensityOutcome {
    ConvergesTo(Rational),
    Inconclusive,
}

impl DensityOutcome {
    pub fn is_zero(&self) -> bool {
        matches!(self, DensityOutcome::ConvergesTo(d) if d.is_zero())
    }

    pub fn limit(&self) -> Option<&Rational> {
        match self {
            DensityOutcome::ConvergesTo(d) => Some(d),
            DensityOutcome::Inconclusive => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityEstimate {
    pub table: Vec<(u64, Rational)>,
    pub outcome: DensityOutcome,
    pub closed_form: Option<Rational>,
    pub notes: Vec<String>,
}

impl DensityEstimate {
    /// `T` picks how densities render: exact fractions or decimals.
    pub fn to_json<T: Scalar>(&self) -> Value {
        let render = |d: &Rational| T::from_rational(d).to_json();
        json!({
            "outcome": match self.outcome {
                DensityOutcome::ConvergesTo(_) => "ConvergesTo",
                DensityOutcome::Inconclusive => "Inconclusive",
            },
            "limit": self.outcome.limit().map(render),
            "closed_form": self.closed_form.as_ref().map(render),
            "checkpoints": self.table.iter().map(|(n, d)| json!([n, render(d)])).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

pub fn density_verdict<T: Scalar>(set: &IndexSet, policy: &CheckpointPolicy) -> Result<DensityEstimate> {
    policy.validate()?;
    let cps = policy.checkpoints();
    let table = density_table::<T>(set, &cps)?;
    let closed_form = set.closed_form_density();
    let (outcome, notes) = classify_density(&table, closed_form.as_ref(), policy);
    Ok(DensityEstimate {
        table,
        outcome,
        closed_form,
        notes,
    })
}

fn density_table<T: Scalar>(set: &IndexSet, cps: &[u64]) -> Result<Vec<(u64, Rational)>> {
    if let Some(counts) = cps.iter().map(|&n| set.closed_count(n)).collect::<Option<Vec<_>>>() {
        return Ok(cps
            .iter()
            .zip(counts)
            .map(|(&n, c)| (n, Rational::new(c.into(), n.into())))
            .collect());
    }
    let mut counts = vec![0u64; cps.len()];
    let mut count = 0u64;
    let mut next = 0usize;
    let last = *cps.last().unwrap_or(&0);
    for (i, m) in set.membership_stream::<T>().take(last as usize).enumerate() {
        count += u64::from(m?);
        if i as u64 + 1 == cps[next] {
            counts[next] = count;
            next += 1;
        }
    }
    Ok(cps
        .iter()
        .zip(counts)
        .map(|(&n, c)| (n, Rational::new(c.into(), n.into())))
        .collect())
}

/// Density tables of several exceed-sets `{k : ‖x_k − center‖ ≥ eps}` over a
/// materialized prefix, one table per radius.
pub(crate) fn exceed_tables<T: Scalar>(
    values: &[Point<T>],
    center: &Point<T>,
    radii: &[T],
    cps: &[u64],
    norm: NormKind,
) -> Result<Vec<Vec<(u64, Rational)>>> {
    let two = Exponent::integer(2)?;
    let squares: Vec<T> = radii.iter().map(|e| e.clone() * e.clone()).collect();
    let mut counts = vec![0u64; radii.len()];
    let mut tables = vec![Vec::with_capacity(cps.len()); radii.len()];
    let mut next = 0usize;
    for (i, x) in values.iter().enumerate() {
        if next == cps.len() {
            break;
        }
        let d = x.distance_pow(center, norm, two)?;
        for (c, e2) in counts.iter_mut().zip(&squares) {
            if d >= *e2 {
                *c += 1;
            }
        }
        let n = i as u64 + 1;
        if n == cps[next] {
            for (t, &c) in tables.iter_mut().zip(&counts) {
                t.push((n, Rational::new(c.into(), n.into())));
            }
            next += 1;
        }
    }
    Ok(tables)
}

const ZERO_DENSITY_CUTOFF: f64 = 0.01;

/// Decides the limit of a prefix-density table. Density 0 needs the last
/// value below 0.01 and a nonincreasing, overall decreasing run over the last
/// three checkpoints. A known closed form must be matched within `band`.
pub(crate) fn classify_density(
    table: &[(u64, Rational)],
    closed: Option<&Rational>,
    policy: &CheckpointPolicy,
) -> (DensityOutcome, Vec<String>) {
    let mut notes = Vec::new();
    if table.len() < 3 {
        notes.push("fewer than 3 checkpoints".to_string());
        return (DensityOutcome::Inconclusive, notes);
    }
    let tail = &table[table.len() - 3..];
    let last = &tail[2].1;
    let within_band = |c: &Rational| {
        tail.iter()
            .all(|(_, d)| Scalar::abs(&(d - c)).to_f64() <= policy.band)
    };
    let zero_ok = last.to_f64() < ZERO_DENSITY_CUTOFF
        && tail.windows(2).all(|w| w[1].1 <= w[0].1)
        && (last.is_zero() || *last < tail[0].1);
    let outcome = match closed {
        Some(c) if c.is_zero() => {
            if zero_ok {
                DensityOutcome::ConvergesTo(Rational::zero())
            } else {
                notes.push("prefix densities disagree with closed-form density 0".to_string());
                DensityOutcome::Inconclusive
            }
        }
        Some(c) => {
            if within_band(c) {
                DensityOutcome::ConvergesTo(c.clone())
            } else {
                notes.push(format!("prefix densities disagree with closed-form density {c}"));
                DensityOutcome::Inconclusive
            }
        }
        None if zero_ok => DensityOutcome::ConvergesTo(Rational::zero()),
        None if within_band(last) => DensityOutcome::ConvergesTo(last.clone()),
        None => {
            notes.push("prefix densities did not stabilize".to_string());
            DensityOutcome::Inconclusive
        }
    };
    (outcome, notes)
}
