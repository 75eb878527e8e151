use crate::error::{Error, Result};
use crate::numeric::{Exponent, Scalar};
use crate::point::{NormKind, Point};
use crate::sequence::SequenceSpec;
use crate::summability::verdict::Checkpoint;

/// `(1/n) Σ_{k ≤ n} x_k`.
pub fn cesaro_mean<T: Scalar>(seq: &SequenceSpec, n: u64) -> Result<Point<T>> {
    if n == 0 {
        return Err(Error::invalid("Cesàro mean needs n >= 1"));
    }
    let mut acc = Point::zero(seq.dim());
    for x in seq.stream::<T>().take(n as usize) {
        acc.add_assign(&x?);
    }
    let n = T::from_i64(n as i64);
    Ok(acc.map(|c| c.clone() / n.clone()))
}

/// `(1/n) Σ_{k ≤ n} ‖x_k − L‖^p`.
pub fn strong_p_residual<T: Scalar>(
    seq: &SequenceSpec,
    center: &Point<T>,
    p: Exponent,
    n: u64,
    norm: NormKind,
) -> Result<T> {
    if n == 0 {
        return Err(Error::invalid("residual needs n >= 1"));
    }
    center.check_dim(seq.dim())?;
    let mut acc = T::zero();
    for x in seq.stream::<T>().take(n as usize) {
        acc = acc + x?.distance_pow(center, norm, p)?;
    }
    Ok(acc / T::from_i64(n as i64))
}

/// Cesàro means of a materialized prefix at each checkpoint.
pub(crate) fn mean_table<T: Scalar>(values: &[Point<T>], cps: &[u64]) -> Vec<(u64, Point<T>)> {
    let Some(first) = values.first() else {
        return Vec::new();
    };
    let mut acc = Point::zero(first.dim());
    let mut out = Vec::with_capacity(cps.len());
    let mut next = 0;
    for (i, x) in values.iter().enumerate() {
        if next == cps.len() {
            break;
        }
        acc.add_assign(x);
        let n = i as u64 + 1;
        if n == cps[next] {
            let d = T::from_i64(n as i64);
            out.push((n, acc.map(|c| c.clone() / d.clone())));
            next += 1;
        }
    }
    out
}

/// Strong p-residuals of a materialized prefix at each checkpoint.
pub(crate) fn residual_table<T: Scalar>(
    values: &[Point<T>],
    center: &Point<T>,
    p: Exponent,
    cps: &[u64],
    norm: NormKind,
) -> Result<Vec<Checkpoint<T>>> {
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(cps.len());
    let mut next = 0;
    for (i, x) in values.iter().enumerate() {
        if next == cps.len() {
            break;
        }
        x.check_dim(center.dim())?;
        acc = acc + x.distance_pow(center, norm, p)?;
        let n = i as u64 + 1;
        if n == cps[next] {
            out.push(Checkpoint::new(n, acc.clone() / T::from_i64(n as i64)));
            next += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{Num, Rational};

    fn q(n: i64, d: u64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn cesaro_examples() {
        let m = cesaro_mean::<Rational>(&SequenceSpec::CubeSpike, 27).unwrap();
        assert_eq!(m.first(), &q(2, 9));
        for n in [2, 10, 1000] {
            let m = cesaro_mean::<Rational>(&SequenceSpec::AltNeg, n).unwrap();
            assert_eq!(m.first(), &q(-1, 2));
        }
        let m = cesaro_mean::<Rational>(&SequenceSpec::CubeSpikeSquared, 1000).unwrap();
        assert_eq!(m.first(), &q(385, 1000));
        assert!(cesaro_mean::<f64>(&SequenceSpec::AltNeg, 0).is_err());
    }

    #[test]
    fn residual_examples() {
        let zero = Point::scalar(Rational::from_i64(0));
        let r = strong_p_residual(&SequenceSpec::CubeSpike, &zero, Exponent::ONE, 1000, NormKind::Max).unwrap();
        assert_eq!(r, q(55, 1000));
        let half = Exponent::new(1, 2).unwrap();
        let r = strong_p_residual(&SequenceSpec::CubeSpikeSquared, &zero, half, 1000, NormKind::Max).unwrap();
        assert_eq!(r, q(55, 1000));
        let c = SequenceSpec::scalar_constant(Num::ratio(7, 3));
        let x1 = c.eval::<Rational>(1).unwrap();
        let r = strong_p_residual(&c, &x1, Exponent::new(5, 3).unwrap(), 1, NormKind::Max).unwrap();
        assert_eq!(r, q(0, 1));
    }

    #[test]
    fn irrational_power_is_a_mode_error() {
        let zero = Point::scalar(Rational::from_i64(0));
        let p = Exponent::new(1, 2).unwrap();
        let err = strong_p_residual(&SequenceSpec::CubeSpike, &zero, p, 8, NormKind::Max).unwrap_err();
        assert!(matches!(err, Error::Mode(_)));
        assert!(strong_p_residual(&SequenceSpec::CubeSpike, &Point::scalar(0.0), p, 8, NormKind::Max).is_ok());
    }

    #[test]
    fn tables_match_direct_computation() {
        let values: Vec<Point<Rational>> = SequenceSpec::CubeSpike.prefix(1000).unwrap();
        let zero = Point::scalar(Rational::from_i64(0));
        let cps = [27, 64, 1000];
        let means = mean_table(&values, &cps);
        let res = residual_table(&values, &zero, Exponent::ONE, &cps, NormKind::Max).unwrap();
        for ((n, m), r) in means.iter().zip(&res) {
            assert_eq!(m, &cesaro_mean::<Rational>(&SequenceSpec::CubeSpike, *n).unwrap());
            assert_eq!(r.value, m.first().clone());
        }
    }
}
