use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numeric::Scalar;
use crate::point::Point;
use crate::sequence::SequenceSpec;
use crate::summability::means::mean_table;
use crate::summability::policy::CheckpointPolicy;
use crate::summability::verdict::{grows, plateaus, Checkpoint, Outcome, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StolzReport<T> {
    pub series: Verdict<T>,
    pub means: Verdict<T>,
    pub consistent: bool,
}

impl<T: Scalar> StolzReport<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "series": self.series.to_json(),
            "means": self.means.to_json(),
            "consistent": self.consistent,
        })
    }
}

/// Plateau means a limit, sustained growth in either direction divergence.
fn trend<T: Scalar>(evidence: Vec<Checkpoint<T>>, policy: &CheckpointPolicy) -> (Verdict<T>, Option<Direction>) {
    let negated: Vec<Checkpoint<T>> = evidence
        .iter()
        .map(|c| Checkpoint::new(c.n, -c.value.clone()))
        .collect();
    let (outcome, dir) = if plateaus(&evidence, policy) {
        let last = evidence.last().expect("count >= 3").value.clone();
        (Outcome::ConvergesTo(Point::scalar(last)), None)
    } else if grows(&evidence, policy) {
        (Outcome::Diverges, Some(Direction::Up))
    } else if grows(&negated, policy) {
        (Outcome::Diverges, Some(Direction::Down))
    } else {
        (Outcome::Inconclusive, None)
    };
    let mut v = Verdict::new(outcome, evidence);
    match dir {
        Some(Direction::Up) => v.notes.push("diverges to +infinity".into()),
        Some(Direction::Down) => v.notes.push("diverges to -infinity".into()),
        None => {}
    }
    (v, dir)
}

/// Classifies a scalar sequence of partial sums and the means of its first
/// `n` terms, and checks the means do not contradict the sums.
pub fn stolz_cesaro_check<T: Scalar>(partial_sums: &SequenceSpec, policy: &CheckpointPolicy) -> Result<StolzReport<T>> {
    policy.validate()?;
    if partial_sums.dim() != 1 {
        return Err(Error::Precondition("the Stolz-Cesàro check needs a scalar sequence".into()));
    }
    let cps = policy.checkpoints();
    let values = partial_sums.prefix::<T>(*cps.last().expect("count >= 3"))?;
    let sums: Vec<Checkpoint<T>> = cps
        .iter()
        .map(|&n| Checkpoint::new(n, values[(n - 1) as usize].first().clone()))
        .collect();
    let means: Vec<Checkpoint<T>> = mean_table(&values, &cps)
        .into_iter()
        .map(|(n, m)| Checkpoint::new(n, m.into_first()))
        .collect();
    let last_mean = means.last().expect("count >= 3").value.to_f64();
    let (series, series_dir) = trend(sums, policy);
    let (means, _) = trend(means, policy);
    let limits_clash = match (series.outcome.limit(), means.outcome.limit()) {
        (Some(a), Some(b)) => (a.first().clone() - b.first().clone()).abs().to_f64() > policy.abs_tol,
        _ => false,
    };
    let means_stalled = match series_dir {
        Some(Direction::Up) => last_mean < policy.div_threshold,
        Some(Direction::Down) => last_mean > -policy.div_threshold,
        None => false,
    };
    Ok(StolzReport {
        series,
        means,
        consistent: !limits_clash && !means_stalled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{Num, Rational};
    use crate::summability::means::cesaro_mean;
    use crate::summability::verdict::OutcomeKind;

    fn one_minus_geometric() -> SequenceSpec {
        SequenceSpec::scalar_constant(Num::int(1))
            .plus(&SequenceSpec::geometric(vec![Num::int(-1)], Num::ratio(1, 2)).unwrap())
            .unwrap()
    }

    #[test]
    fn geometric_partial_sums() {
        let s = one_minus_geometric();
        let m = cesaro_mean::<Rational>(&s, 4).unwrap();
        assert_eq!(m.first(), &Rational::from_ratio(49, 64));
        let r = stolz_cesaro_check::<f64>(&s, &CheckpointPolicy::default()).unwrap();
        assert!(r.consistent);
        assert!((r.series.outcome.limit().unwrap().first() - 1.0).abs() < 1e-12);
        assert!((r.means.outcome.limit().unwrap().first() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn linear_and_harmonic_sums_diverge() {
        let p = CheckpointPolicy::default();
        let linear = SequenceSpec::scalar_constant(Num::int(1)).partial_sums();
        let r = stolz_cesaro_check::<Rational>(&linear, &p).unwrap();
        assert_eq!(r.series.kind(), OutcomeKind::Diverges);
        assert_eq!(r.means.kind(), OutcomeKind::Diverges);
        assert_eq!(r.means.final_value(), Some(&Rational::from_ratio(524_289, 2)));
        assert!(r.consistent);

        let harmonic = SequenceSpec::harmonic(vec![Num::int(1)]).unwrap().partial_sums();
        let r = stolz_cesaro_check::<f64>(&harmonic, &p).unwrap();
        assert_eq!(r.series.kind(), OutcomeKind::Diverges);
        assert_eq!(r.means.kind(), OutcomeKind::Diverges);
        assert!(r.consistent);
    }

    #[test]
    fn vector_input_is_rejected() {
        let v = SequenceSpec::constant(vec![Num::int(1), Num::int(2)]).unwrap();
        assert!(matches!(
            stolz_cesaro_check::<f64>(&v, &CheckpointPolicy::default()),
            Err(Error::Precondition(_))
        ));
    }
}
