//! The summation operator `T(a) = lim S_n` on a wuc series and its bound
//! `‖T(a)‖ ≤ H·‖a‖∞`.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numeric::{Exponent, Scalar};
use crate::point::Point;
use crate::series::{swp_membership, wuc_verdict, CoefficientSpec, SeriesSpec};
use crate::summability::policy::CheckpointPolicy;
use crate::summability::verdict::{OutcomeKind, Verdict};

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSample<T> {
    /// `sup |a_i|` over the evaluated prefix.
    pub sup_coeff: T,
    pub membership: Verdict<T>,
    /// `‖T(a)‖`, when the partial sums converge.
    pub image_norm: Option<T>,
    /// `‖T(a)‖ ≤ H·sup|a_i| + abs_tol`, when `T(a)` is defined.
    pub bound_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorReport<T> {
    pub h: T,
    pub wuc: Verdict<T>,
    pub samples: Vec<OperatorSample<T>>,
}

impl<T: Scalar> OperatorReport<T> {
    pub fn all_bounded(&self) -> bool {
        self.samples.iter().all(|s| s.bound_ok != Some(false))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "H": self.h.to_json(),
            "wuc": self.wuc.to_json(),
            "samples": self.samples.iter().map(|s| json!({
                "sup_a": s.sup_coeff.to_json(),
                "outcome": s.membership.kind().to_string(),
                "T_a": s.membership.outcome.limit().map(Point::to_json),
                "norm_T_a": s.image_norm.as_ref().map(Scalar::to_json),
                "bound_ok": s.bound_ok,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Checks the operator bound on each sample. The series must be wuc, since
/// otherwise `T` is not defined on all bounded coefficients.
pub fn operator_norm_check<T: Scalar>(
    series: &SeriesSpec,
    samples: &[CoefficientSpec],
    p: Exponent,
    policy: &CheckpointPolicy,
) -> Result<OperatorReport<T>> {
    let wuc = wuc_verdict::<T>(series, policy)?;
    let Some(h) = wuc.outcome.limit().map(|l| l.first().clone()) else {
        return Err(Error::Precondition(format!(
            "series is not wuc at this scale (verdict {}); the operator is undefined",
            wuc.kind()
        )));
    };
    let n = policy.final_n();
    let samples = samples
        .par_iter()
        .map(|a| {
            let sup_coeff = a
                .rule()
                .stream::<T>()
                .take(n as usize)
                .try_fold(T::zero(), |m, x| Ok::<_, Error>(m.max_of(x?.first().abs())))?;
            let membership = swp_membership::<T>(series, a, p, policy)?;
            let (image_norm, bound_ok) = match (membership.kind(), membership.outcome.limit()) {
                (OutcomeKind::ConvergesTo, Some(l)) => {
                    let norm = l.norm(series.norm())?;
                    let bound = (h.clone() * sup_coeff.clone()).to_f64() + policy.abs_tol;
                    let ok = norm.to_f64() <= bound;
                    (Some(norm), Some(ok))
                }
                _ => (None, None),
            };
            Ok(OperatorSample {
                sup_coeff,
                membership,
                image_norm,
                bound_ok,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OperatorReport { h, wuc, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Num;

    #[test]
    fn geometric_series_bound() {
        let s = SeriesSpec::geometric(Num::ratio(1, 2), vec![Num::int(1), Num::int(0)]).unwrap();
        let samples = [CoefficientSpec::constant(Num::int(1)), CoefficientSpec::zero()];
        let r = operator_norm_check::<f64>(&s, &samples, Exponent::ONE, &CheckpointPolicy::default()).unwrap();
        assert_eq!(r.h, 1.0);
        assert_eq!(r.samples[0].image_norm, Some(1.0));
        assert_eq!(r.samples[1].image_norm, Some(0.0));
        assert!(r.all_bounded());
    }

    #[test]
    fn non_wuc_series_is_rejected() {
        let s = SeriesSpec::harmonic(vec![Num::int(1)]).unwrap();
        let err = operator_norm_check::<f64>(&s, &[CoefficientSpec::zero()], Exponent::ONE, &CheckpointPolicy::default())
            .unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
