//! Series `Σ a_i x_i` with bounded coefficients: the wuc bound `H`, membership
//! of a coefficient sequence in the summability space of a series, and the
//! weak and weak* variants.

pub mod construct;
pub mod operator;
pub mod panels;

use crate::error::{Error, Result};
use crate::numeric::{Exponent, Num, Scalar};
use crate::point::{NormKind, Point};
use crate::sequence::SequenceSpec;
use crate::summability::policy::CheckpointPolicy;
use crate::summability::strong::wp_membership;
use crate::summability::verdict::{grows, plateaus, Certificate, Checkpoint, Outcome, Verdict};

pub use construct::{build_blocks, construct_divergent_coeffs, Block, Construction, DEFAULT_BUDGET};
pub use operator::{operator_norm_check, OperatorReport, OperatorSample};
pub use panels::{
    default_functionals, default_points, subset_sum_wp, weak_star_wp_membership, weak_wp_membership, FunctionalSpec,
    PanelReport, PanelRow, DEFAULT_PANEL_SEED,
};

#[derive(Clone, Debug)]
pub struct SeriesSpec {
    terms: SequenceSpec,
    norm: NormKind,
}

impl SeriesSpec {
    pub fn new(terms: SequenceSpec, norm: NormKind) -> Self {
        SeriesSpec { terms, norm }
    }

    /// `x_i = base^i · dir`.
    pub fn geometric(base: Num, dir: Vec<Num>) -> Result<Self> {
        Ok(SeriesSpec::new(SequenceSpec::geometric(dir, base)?, NormKind::Max))
    }

    pub fn harmonic(dir: Vec<Num>) -> Result<Self> {
        Ok(SeriesSpec::new(SequenceSpec::harmonic(dir)?, NormKind::Max))
    }

    pub fn alt_harmonic(dir: Vec<Num>) -> Result<Self> {
        Ok(SeriesSpec::new(SequenceSpec::alt_harmonic(dir)?, NormKind::Max))
    }

    pub fn with_norm(mut self, norm: NormKind) -> Self {
        self.norm = norm;
        self
    }

    pub fn terms(&self) -> &SequenceSpec {
        &self.terms
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    pub fn dim(&self) -> usize {
        self.terms.dim()
    }

    /// The partial sums `S_n = Σ_{i ≤ n} a_i x_i` as a sequence.
    pub fn partial_sums(&self, coeffs: &CoefficientSpec) -> Result<SequenceSpec> {
        Ok(self.terms.times(coeffs.rule())?.partial_sums())
    }
}

/// Samples checked against the declared bound of a coefficient rule.
pub const BOUND_CHECK_TERMS: u64 = 100_000;

#[derive(Clone, Debug)]
pub struct CoefficientSpec {
    rule: SequenceSpec,
    bound: Num,
}

impl CoefficientSpec {
    /// Checks `|a_i| ≤ bound` for `i ≤ 10^5` (or the whole rule when it is
    /// shorter).
    pub fn new(rule: SequenceSpec, bound: Num) -> Result<Self> {
        if rule.dim() != 1 {
            return Err(Error::Dimension {
                expected: 1,
                got: rule.dim(),
            });
        }
        if bound.exact() < Num::int(0).exact() {
            return Err(Error::invalid("coefficient bound must be nonnegative"));
        }
        let b = bound.approx();
        for (i, a) in rule.stream::<f64>().take(BOUND_CHECK_TERMS as usize).enumerate() {
            let a = match a {
                Ok(a) => a.into_first(),
                Err(Error::OutOfRange { .. }) => break,
                Err(e) => return Err(e),
            };
            if a.abs() > b {
                return Err(Error::invalid(format!(
                    "coefficient {} at index {} exceeds the declared bound {bound}",
                    a,
                    i + 1
                )));
            }
        }
        Ok(CoefficientSpec { rule, bound })
    }

    pub fn constant(v: Num) -> Self {
        let bound = v.abs();
        CoefficientSpec {
            rule: SequenceSpec::scalar_constant(v),
            bound,
        }
    }

    pub fn zero() -> Self {
        CoefficientSpec::constant(Num::int(0))
    }

    /// `a_i = (-1)^i`.
    pub fn alternating() -> Self {
        CoefficientSpec {
            rule: SequenceSpec::Geometric {
                scale: vec![Num::int(1)],
                ratio: Num::int(-1),
            },
            bound: Num::int(1),
        }
    }

    /// `a_i = 1/i`.
    pub fn reciprocal() -> Self {
        CoefficientSpec {
            rule: SequenceSpec::Harmonic { dir: vec![Num::int(1)] },
            bound: Num::int(1),
        }
    }

    /// `a_i = q^i` for `|q| ≤ 1`.
    pub fn geometric(q: Num) -> Result<Self> {
        if q.approx().abs() > 1.0 {
            return Err(Error::invalid("geometric coefficients need |q| <= 1"));
        }
        let bound = q.abs();
        Ok(CoefficientSpec {
            rule: SequenceSpec::Geometric {
                scale: vec![Num::int(1)],
                ratio: q,
            },
            bound,
        })
    }

    /// Seeded coefficients uniform on a grid in `[-bound, bound]`.
    pub fn random(seed: u64, bound: Num) -> Result<Self> {
        let rule = SequenceSpec::noise(seed, Num::int(0), bound.clone(), 1)?;
        Ok(CoefficientSpec { rule, bound })
    }

    /// Block-sign coefficients for the scalar sequence `f`, bounded by 1/2.
    pub fn constructed(f: &SequenceSpec) -> Result<Self> {
        Ok(CoefficientSpec {
            rule: f.divergent_signs()?,
            bound: Num::ratio(1, 2),
        })
    }

    /// Bound taken from the file's largest absolute value.
    pub fn table(rule: SequenceSpec) -> Result<Self> {
        let bound = match &rule {
            SequenceSpec::Table(t) => t
                .rows()
                .iter()
                .flatten()
                .map(Num::abs)
                .max_by(|a, b| a.exact().cmp(b.exact()))
                .unwrap_or(Num::int(0)),
            _ => return Err(Error::invalid("expected a file-backed coefficient rule")),
        };
        CoefficientSpec::new(rule, bound)
    }

    pub fn plus(&self, other: &CoefficientSpec) -> Result<Self> {
        Ok(CoefficientSpec {
            rule: self.rule.plus(&other.rule)?,
            bound: Num::new(self.bound.exact() + other.bound.exact()),
        })
    }

    pub fn rule(&self) -> &SequenceSpec {
        &self.rule
    }

    pub fn bound(&self) -> &Num {
        &self.bound
    }
}

/// `Σ_{i ≤ n} a_i x_i`.
pub fn partial_sum<T: Scalar>(series: &SeriesSpec, coeffs: &CoefficientSpec, n: u64) -> Result<Point<T>> {
    if n == 0 {
        return Err(Error::invalid("partial sums start at n = 1"));
    }
    let mut acc = Point::zero(series.dim());
    for (x, a) in series.terms.stream::<T>().zip(coeffs.rule.stream::<T>()).take(n as usize) {
        acc.add_assign(&x?.scale(a?.first()));
    }
    Ok(acc)
}

/// Largest `n` for the euclidean brute force over sign patterns.
pub const BRUTE_FORCE_MAX_TERMS: u64 = 20;
pub const BRUTE_FORCE_MAX_DIM: usize = 3;

/// `sup { ‖Σ_{i ≤ m} a_i x_i‖ : |a_i| ≤ 1, m ≤ n }`. Under the max-norm this is
/// `max_j Σ_{i ≤ n} |x_i[j]|`; the euclidean case enumerates sign patterns.
pub fn h_bound<T: Scalar>(series: &SeriesSpec, n: u64) -> Result<T> {
    if n == 0 {
        return Err(Error::invalid("h_bound needs n >= 1"));
    }
    match series.norm {
        NormKind::Max => Ok(h_table::<T>(series, &[n])?.remove(0).value),
        NormKind::Euclidean => {
            if series.dim() == 1 {
                return h_table::<T>(&series.clone().with_norm(NormKind::Max), &[n]).map(|mut t| t.remove(0).value);
            }
            if n > BRUTE_FORCE_MAX_TERMS || series.dim() > BRUTE_FORCE_MAX_DIM {
                return Err(Error::Precondition(format!(
                    "euclidean h_bound is brute force and limited to n <= {BRUTE_FORCE_MAX_TERMS}, d <= {BRUTE_FORCE_MAX_DIM}"
                )));
            }
            euclidean_brute_force(series, n)
        }
    }
}

fn euclidean_brute_force<T: Scalar>(series: &SeriesSpec, n: u64) -> Result<T> {
    let xs: Vec<Point<T>> = series.terms.prefix(n)?;
    let two = Exponent::integer(2)?;
    let mut best = T::zero();
    // ‖Σ a_i x_i‖ is convex in a, so its max over the box sits at a vertex
    for mask in 0u32..(1 << n) {
        let mut acc = Point::zero(series.dim());
        for (i, x) in xs.iter().enumerate() {
            if mask & (1 << i) == 0 {
                acc.add_assign(x);
            } else {
                acc.add_assign(&x.neg());
            }
        }
        best = best.max_of(acc.norm_pow(NormKind::Euclidean, two)?);
    }
    best.pow(Exponent::new(1, 2)?)
}

/// Max-norm `H` at each checkpoint, in one pass.
fn h_table<T: Scalar>(series: &SeriesSpec, cps: &[u64]) -> Result<Vec<Checkpoint<T>>> {
    let dim = series.dim();
    let mut sums = vec![T::zero(); dim];
    let mut out = Vec::with_capacity(cps.len());
    let mut next = 0;
    let last = *cps.last().unwrap_or(&0);
    for (i, x) in series.terms.stream::<T>().take(last as usize).enumerate() {
        let x = x?;
        for (s, c) in sums.iter_mut().zip(x.coords()) {
            if !c.is_zero() {
                *s = s.clone() + c.abs();
            }
        }
        if i as u64 + 1 == cps[next] {
            let h = sums.iter().cloned().fold(T::zero(), T::max_of);
            out.push(Checkpoint::new(cps[next], h));
            next += 1;
        }
    }
    Ok(out)
}

/// Classifies the `H` sequence: a plateau means the series is wuc.
pub fn wuc_verdict<T: Scalar>(series: &SeriesSpec, policy: &CheckpointPolicy) -> Result<Verdict<T>> {
    policy.validate()?;
    if series.norm != NormKind::Max {
        return Err(Error::Precondition("wuc verdict needs the max-norm".into()));
    }
    let evidence = h_table::<T>(series, &policy.checkpoints())?;
    let outcome = if plateaus(&evidence, policy) {
        Outcome::ConvergesTo(Point::scalar(evidence.last().expect("count >= 3").value.clone()))
    } else if grows(&evidence, policy) {
        Outcome::Diverges
    } else {
        Outcome::Inconclusive
    };
    let mut v = Verdict::new(outcome, evidence);
    if let Some(summable) = series.terms.absolutely_summable() {
        let agrees = match v.outcome {
            Outcome::ConvergesTo(_) => summable,
            Outcome::Diverges => !summable,
            Outcome::Inconclusive => true,
        };
        v.notes.push(format!(
            "closed form: coordinates {} absolutely summable",
            if summable { "are" } else { "are not" }
        ));
        if !agrees {
            v.notes.push("estimate disagrees with the closed form".into());
            v.outcome = Outcome::Inconclusive;
            v.certificate = Certificate::None;
        }
    }
    Ok(v)
}

/// Membership of `(a_i)` in the summability space of the series: the strong
/// p-Cesàro verdict of the partial sums, with a divergence witness as the
/// negative certificate.
pub fn swp_membership<T: Scalar>(
    series: &SeriesSpec,
    coeffs: &CoefficientSpec,
    p: Exponent,
    policy: &CheckpointPolicy,
) -> Result<Verdict<T>> {
    let policy = CheckpointPolicy {
        norm: series.norm,
        ..policy.clone()
    };
    wp_membership(&series.partial_sums(coeffs)?, p, &policy)
}
