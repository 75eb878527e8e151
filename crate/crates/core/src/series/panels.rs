//! Weak and weak* membership through finite panels of functionals or test
//! points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::density::IndexSet;
use crate::error::{Error, Result};
use crate::numeric::{Exponent, Mode, Num, Scalar};
use crate::point::{NormKind, Point};
use crate::sequence::SequenceSpec;
use crate::series::{CoefficientSpec, SeriesSpec};
use crate::summability::policy::CheckpointPolicy;
use crate::summability::strong::{membership_on, wp_membership};
use crate::summability::verdict::{Certificate, Outcome, OutcomeKind, Verdict};

pub const DEFAULT_PANEL_SEED: u64 = 0xCE5A;
const RANDOM_PANEL_SIZE: usize = 8;
const GRID: i64 = 1024;

/// A linear functional on `R^d` given by its coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalSpec(Vec<Num>);

impl FunctionalSpec {
    pub fn new(coeffs: Vec<Num>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("a functional needs at least one coefficient"));
        }
        Ok(FunctionalSpec(coeffs))
    }

    pub fn coeffs(&self) -> &[Num] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn apply<T: Scalar>(&self, x: &Point<T>) -> Result<T> {
        x.check_dim(self.dim())?;
        let c: Vec<T> = self.0.iter().map(T::from_num).collect();
        Ok(x.dot(&c))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Num::is_zero)
    }
}

fn basis(d: usize) -> Vec<Vec<Num>> {
    (0..d)
        .map(|j| (0..d).map(|i| Num::int(i64::from(i == j))).collect())
        .collect()
}

/// Nonzero grid vectors in `[-1, 1]^d`, scaled by `normalize`.
fn random_panel(d: usize, seed: u64, normalize: impl Fn(&[i64]) -> i64) -> Vec<Vec<Num>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(RANDOM_PANEL_SIZE);
    while out.len() < RANDOM_PANEL_SIZE {
        let v: Vec<i64> = (0..d).map(|_| rng.gen_range(-GRID..=GRID)).collect();
        if v.iter().all(|&c| c == 0) {
            continue;
        }
        let scale = normalize(&v);
        out.push(v.iter().map(|&c| Num::ratio(c, scale)).collect());
    }
    out
}

/// The coordinate functionals plus seeded random functionals of unit dual
/// norm (ℓ1, dual to the max-norm).
pub fn default_functionals(d: usize, seed: u64) -> Vec<FunctionalSpec> {
    let mut out = basis(d);
    out.extend(random_panel(d, seed, |v| v.iter().map(|c| c.abs()).sum()));
    out.into_iter().map(FunctionalSpec).collect()
}

/// The standard basis plus seeded random points of unit max-norm.
pub fn default_points(d: usize, seed: u64) -> Vec<Vec<Num>> {
    let mut out = basis(d);
    out.extend(random_panel(d, seed, |v| v.iter().map(|c| c.abs()).max().unwrap_or(1)));
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct PanelRow<T> {
    pub probe: Vec<Num>,
    pub verdict: Verdict<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PanelReport<T> {
    pub rows: Vec<PanelRow<T>>,
    pub aggregate: Verdict<T>,
    /// The probes do not span the dual, so a common limit is not determined.
    pub insufficient: bool,
}

impl<T: Scalar> PanelReport<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "rows": self.rows.iter().map(|r| json!({
                "probe": r.probe.iter().map(|c| T::from_num(c).to_json()).collect::<Vec<_>>(),
                "verdict": r.verdict.to_json(),
            })).collect::<Vec<_>>(),
            "aggregate": self.aggregate.to_json(),
            "insufficient": self.insufficient,
        })
    }
}

/// Runs the scalar membership verdict of `⟨probe, S_n⟩` for every probe, then
/// recovers a single limit consistent with all rows.
fn panel<T: Scalar>(
    sums: &SequenceSpec,
    probes: &[Vec<Num>],
    p: Exponent,
    policy: &CheckpointPolicy,
) -> Result<PanelReport<T>> {
    policy.validate()?;
    if probes.is_empty() {
        return Err(Error::invalid("the probe panel is empty"));
    }
    let d = sums.dim();
    if let Some(bad) = probes.iter().find(|f| f.len() != d) {
        return Err(Error::Dimension {
            expected: d,
            got: bad.len(),
        });
    }
    let values: Vec<Point<T>> = sums.prefix(policy.final_n())?;
    let scalar_policy = CheckpointPolicy {
        norm: NormKind::Max,
        ..policy.clone()
    };
    let rows: Vec<PanelRow<T>> = probes
        .par_iter()
        .map(|probe| {
            let c: Vec<T> = probe.iter().map(T::from_num).collect();
            let images: Vec<Point<T>> = values.iter().map(|x| Point::scalar(x.dot(&c))).collect();
            let verdict = membership_on(&images, p, &scalar_policy)?;
            Ok(PanelRow {
                probe: probe.clone(),
                verdict,
            })
        })
        .collect::<Result<_>>()?;
    let (aggregate, insufficient) = aggregate(&rows, d, policy);
    Ok(PanelReport {
        rows,
        aggregate,
        insufficient,
    })
}

fn aggregate<T: Scalar>(rows: &[PanelRow<T>], d: usize, policy: &CheckpointPolicy) -> (Verdict<T>, bool) {
    if let Some(r) = rows.iter().find(|r| r.verdict.kind() == OutcomeKind::Diverges) {
        let mut v = Verdict::new(Outcome::Diverges, r.verdict.evidence.clone());
        v.certificate = r.verdict.certificate;
        v.witness = r.verdict.witness.clone();
        v.notes.push(format!("diverges under probe {}", render_probe(&r.probe)));
        return (v, false);
    }
    if rows.iter().any(|r| !r.verdict.outcome.converges()) {
        let mut v = Verdict::new(Outcome::Inconclusive, Vec::new());
        v.notes.push("not every probe converges".into());
        return (v, false);
    }
    let system: Vec<(Vec<T>, T)> = rows
        .iter()
        .map(|r| {
            let c = r.probe.iter().map(T::from_num).collect();
            let l = r.verdict.outcome.limit().expect("converged").first().clone();
            (c, l)
        })
        .collect();
    let Some(limit) = solve(&system, d) else {
        let mut v = Verdict::new(Outcome::Inconclusive, Vec::new());
        v.notes.push(format!("probes do not span the {d}-dimensional dual; limit not determined"));
        return (v, true);
    };
    let worst = system
        .iter()
        .map(|(c, l)| (limit.dot(c) - l.clone()).abs().to_f64())
        .fold(0.0, f64::max);
    let mut v = if worst <= policy.abs_tol {
        let mut v = Verdict::new(Outcome::ConvergesTo(limit.clone()), Vec::new());
        v.certificate = Certificate::Truncation;
        v
    } else {
        let mut v = Verdict::new(Outcome::Inconclusive, Vec::new());
        v.notes.push(format!("probe limits are inconsistent (worst mismatch {worst})"));
        v
    };
    v.candidate = Some(limit);
    (v, false)
}

fn render_probe(c: &[Num]) -> String {
    let parts: Vec<String> = c.iter().map(Num::to_string).collect();
    format!("({})", parts.join(","))
}

/// Picks `d` independent rows in order and solves for the point they
/// determine. `None` when the rows have rank below `d`.
fn solve<T: Scalar>(system: &[(Vec<T>, T)], d: usize) -> Option<Point<T>> {
    let pivot_tol = if T::MODE == Mode::Exact { 0.0 } else { 1e-12 };
    // reduced rows kept as (coeffs, rhs, pivot column)
    let mut basis: Vec<(Vec<T>, T, usize)> = Vec::with_capacity(d);
    for (c, r) in system {
        let mut c = c.clone();
        let mut r = r.clone();
        for (bc, br, col) in &basis {
            let f = c[*col].clone();
            if !f.is_zero() {
                for j in 0..d {
                    c[j] = c[j].clone() - f.clone() * bc[j].clone();
                }
                r = r - f * br.clone();
            }
        }
        let Some(col) = (0..d).find(|&j| c[j].abs().to_f64() > pivot_tol) else {
            continue;
        };
        let pv = c[col].clone();
        let c: Vec<T> = c.iter().map(|x| x.clone() / pv.clone()).collect();
        let r = r / pv;
        for (bc, br, _) in basis.iter_mut() {
            let f = bc[col].clone();
            if !f.is_zero() {
                for j in 0..d {
                    bc[j] = bc[j].clone() - f.clone() * c[j].clone();
                }
                *br = br.clone() - f * r.clone();
            }
        }
        basis.push((c, r, col));
        if basis.len() == d {
            break;
        }
    }
    if basis.len() < d {
        return None;
    }
    let mut x = vec![T::zero(); d];
    for (_, r, col) in basis {
        x[col] = r;
    }
    Point::new(x).ok()
}

/// Weak membership: every functional image `f(S_n)` is strongly p-Cesàro
/// summable to `f(L)` for one `L`.
pub fn weak_wp_membership<T: Scalar>(
    series: &SeriesSpec,
    coeffs: &CoefficientSpec,
    functionals: &[FunctionalSpec],
    p: Exponent,
    policy: &CheckpointPolicy,
) -> Result<PanelReport<T>> {
    let probes: Vec<Vec<Num>> = functionals.iter().map(|f| f.0.clone()).collect();
    panel(&series.partial_sums(coeffs)?, &probes, p, policy)
}

/// Weak* membership for a series of functionals `f_i` (given by their
/// coefficient vectors): `Σ_{i ≤ n} a_i f_i(x)` at every test point `x`.
pub fn weak_star_wp_membership<T: Scalar>(
    functional_series: &SequenceSpec,
    coeffs: &CoefficientSpec,
    points: &[Vec<Num>],
    p: Exponent,
    policy: &CheckpointPolicy,
) -> Result<PanelReport<T>> {
    let sums = functional_series.times(coeffs.rule())?.partial_sums();
    panel(&sums, points, p, policy)
}

/// Membership of the subseries `Σ_{i ∈ M} f_i(x)`.
pub fn subset_sum_wp<T: Scalar>(
    functional_series: &SequenceSpec,
    set: &IndexSet,
    x: &[Num],
    p: Exponent,
    policy: &CheckpointPolicy,
) -> Result<Verdict<T>> {
    let sums = functional_series
        .masked(set.clone())
        .functional(x.to_vec())?
        .partial_sums();
    let policy = CheckpointPolicy {
        norm: NormKind::Max,
        ..policy.clone()
    };
    wp_membership(&sums, p, &policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rational;
    use crate::series::swp_membership;

    fn e1_geometric() -> SeriesSpec {
        SeriesSpec::geometric(Num::ratio(1, 2), vec![Num::int(1), Num::int(0)]).unwrap()
    }

    #[test]
    fn default_panels_are_normalized_and_seeded() {
        let fs = default_functionals(3, DEFAULT_PANEL_SEED);
        assert_eq!(fs.len(), 11);
        for f in &fs {
            let l1: f64 = f.coeffs().iter().map(|c| c.approx().abs()).sum();
            assert!((l1 - 1.0).abs() < 1e-12);
        }
        assert_eq!(fs, default_functionals(3, DEFAULT_PANEL_SEED));
        assert_ne!(fs, default_functionals(3, 1));
        for x in default_points(2, DEFAULT_PANEL_SEED) {
            let m = x.iter().map(|c| c.approx().abs()).fold(0.0, f64::max);
            assert_eq!(m, 1.0);
        }
    }

    #[test]
    fn solve_recovers_point() {
        let sys = vec![
            (vec![Rational::from_i64(0), Rational::from_i64(0)], Rational::from_i64(0)),
            (vec![Rational::from_i64(1), Rational::from_i64(1)], Rational::from_i64(3)),
            (vec![Rational::from_i64(2), Rational::from_i64(2)], Rational::from_i64(6)),
            (vec![Rational::from_i64(1), Rational::from_i64(-1)], Rational::from_i64(1)),
        ];
        let x = solve(&sys, 2).unwrap();
        assert_eq!(x.coords(), &[Rational::from_i64(2), Rational::from_i64(1)]);
        assert!(solve(&sys[..3], 2).is_none());
    }

    #[test]
    fn weak_geometric() {
        let p = CheckpointPolicy::default();
        let fs = default_functionals(2, DEFAULT_PANEL_SEED);
        let coeffs = CoefficientSpec::constant(Num::int(1));
        let r = weak_wp_membership::<f64>(&e1_geometric(), &coeffs, &fs, Exponent::ONE, &p).unwrap();
        assert!(r.rows.iter().all(|row| row.verdict.outcome.converges()));
        let l = r.aggregate.outcome.limit().unwrap();
        assert!((l.coords()[0] - 1.0).abs() < 1e-9 && l.coords()[1].abs() < 1e-9);
        let s = swp_membership::<f64>(&e1_geometric(), &coeffs, Exponent::ONE, &p).unwrap();
        assert_eq!(s.kind(), r.aggregate.kind());
    }

    #[test]
    fn zero_functional_is_insufficient() {
        let p = CheckpointPolicy::default();
        let zero = FunctionalSpec::new(vec![Num::int(0), Num::int(0)]).unwrap();
        let coeffs = CoefficientSpec::constant(Num::int(1));
        let r = weak_wp_membership::<f64>(&e1_geometric(), &coeffs, &[zero], Exponent::ONE, &p).unwrap();
        assert!(r.rows[0].verdict.outcome.converges());
        assert!(r.insufficient);
        assert_eq!(r.aggregate.kind(), OutcomeKind::Inconclusive);
    }

    #[test]
    fn weak_star_examples() {
        let p = CheckpointPolicy::default();
        let f = SequenceSpec::geometric(vec![Num::int(1), Num::int(1)], Num::ratio(1, 2)).unwrap();
        let pts = default_points(2, DEFAULT_PANEL_SEED);
        let coeffs = CoefficientSpec::random(7, Num::int(1)).unwrap();
        let r = weak_star_wp_membership::<f64>(&f, &coeffs, &pts, Exponent::ONE, &p).unwrap();
        assert!(r.aggregate.outcome.converges());

        let h = SequenceSpec::harmonic(vec![Num::int(1), Num::int(0)]).unwrap();
        let one = CoefficientSpec::constant(Num::int(1));
        let x = vec![vec![Num::int(1), Num::int(0)]];
        let r = weak_star_wp_membership::<f64>(&h, &one, &x, Exponent::ONE, &p).unwrap();
        assert_eq!(r.aggregate.kind(), OutcomeKind::Diverges);

        let r = weak_star_wp_membership::<f64>(&f, &CoefficientSpec::zero(), &pts, Exponent::ONE, &p).unwrap();
        assert_eq!(r.aggregate.outcome.limit().map(|l| l.coords().to_vec()), Some(vec![0.0, 0.0]));
    }

    #[test]
    fn subset_sums() {
        let p = CheckpointPolicy::default();
        let f = SequenceSpec::geometric(vec![Num::int(1), Num::int(0)], Num::ratio(1, 2)).unwrap();
        let x = [Num::int(1), Num::int(0)];
        let v = subset_sum_wp::<f64>(&f, &IndexSet::Evens, &x, Exponent::ONE, &p).unwrap();
        assert!((v.outcome.limit().unwrap().first() - 1.0 / 3.0).abs() < 1e-12);
        let v = subset_sum_wp::<f64>(&f, &IndexSet::empty(), &x, Exponent::ONE, &p).unwrap();
        assert_eq!(v.outcome.limit().map(|l| *l.first()), Some(0.0));
        let h = SequenceSpec::harmonic(vec![Num::int(1), Num::int(0)]).unwrap();
        let v = subset_sum_wp::<f64>(&h, &IndexSet::All, &x, Exponent::ONE, &p).unwrap();
        assert_eq!(v.kind(), OutcomeKind::Diverges);
    }
}
