//! Deterministic index rules `k -> x_k` and the sequences derived from them.
//!
//! A [`SequenceSpec`] is mode-free data; the scalar backend is chosen at
//! evaluation time through the type parameter of [`SequenceSpec::eval`].
//! Leaf generators evaluate any index in O(1); prefix-dependent rules
//! (partial sums, sign constructions) evaluate by streaming.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_integer::Roots;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::density::IndexSet;
use crate::error::{Error, Result};
use crate::numeric::{Exponent, Num, Scalar};
use crate::point::Point;
use crate::table::{FileFormat, SequenceTable};

/// `Some(r)` when `k = r³`.
pub fn exact_cube_root(k: u64) -> Option<u64> {
    let r = k.cbrt();
    (r * r * r == k).then_some(r)
}

/// `Some(j)` when `k = j²`.
pub fn exact_square_root(k: u64) -> Option<u64> {
    let j = k.sqrt();
    (j * j == k).then_some(j)
}

const NOISE_STEPS: u32 = 1 << 16;

/// Seeded bounded noise: each coordinate has magnitude in `[lo, hi]` and a
/// random sign. Index `k` draws from its own ChaCha stream, so evaluation is
/// random access.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSpec {
    pub seed: u64,
    pub lo: Num,
    pub hi: Num,
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub enum SequenceSpec {
    /// `r` at `k = r³`, zero elsewhere.
    CubeSpike,
    /// `j^(2/p)` at `k = j²`, zero elsewhere.
    PowerSquareSpike { p: Exponent },
    /// `-1` at odd `k`, zero at even `k`.
    AltNeg,
    /// `r²` at `k = r³`, zero elsewhere.
    CubeSpikeSquared,
    /// `scale · ratio^k`.
    Geometric { scale: Vec<Num>, ratio: Num },
    /// `dir / k`.
    Harmonic { dir: Vec<Num> },
    /// `(-1)^k dir / k`.
    AltHarmonic { dir: Vec<Num> },
    Constant(Vec<Num>),
    Noise(NoiseSpec),
    Table(Arc<SequenceTable>),
    Derived(Arc<Derived>),
}

#[derive(Clone, Debug)]
pub enum Derived {
    Sum(SequenceSpec, SequenceSpec),
    Scale(Num, SequenceSpec),
    /// Scalar `factor_k` times `inner_k`.
    Product {
        factor: SequenceSpec,
        inner: SequenceSpec,
    },
    /// `inner_k` on the index set, zero off it.
    Masked { set: IndexSet, inner: SequenceSpec },
    /// The scalar `<coeffs, inner_k>`.
    Functional {
        coeffs: Vec<Num>,
        inner: SequenceSpec,
    },
    /// Coordinatewise absolute value.
    Abs(SequenceSpec),
    /// `inner_1 + ... + inner_k`.
    PartialSums(SequenceSpec),
    /// Block-sign coefficients built from a scalar sequence `f`: on block `t`
    /// the value is `sign(f_i)·2^-t` (sign(0) = +1), and block `t` closes at
    /// the first index where its `Σ|f_i|` exceeds `4^t`.
    DivergentSigns(SequenceSpec),
}

pub type TermStream<'a, T> = Box<dyn Iterator<Item = Result<Point<T>>> + 'a>;

struct Params<'a> {
    name: &'a str,
    map: &'a BTreeMap<String, String>,
}

impl<'a> Params<'a> {
    fn new(name: &'a str, map: &'a BTreeMap<String, String>, allowed: &[&str]) -> Result<Self> {
        if let Some(key) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::invalid(format!("unknown parameter '{key}' for '{name}'")));
        }
        Ok(Params { name, map })
    }

    fn required(&self, key: &str) -> Result<&'a str> {
        self.map
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::invalid(format!("'{}' requires parameter '{key}'", self.name)))
    }
}

/// Parses `1,0`, `(1,0)` or `[1,0]` into coordinates.
pub fn parse_coords(s: &str) -> Result<Vec<Num>> {
    let t = s.trim();
    let t = t
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .or_else(|| t.strip_prefix('[').and_then(|r| r.strip_suffix(']')))
        .unwrap_or(t);
    let coords = t
        .split(',')
        .map(|c| c.parse::<Num>())
        .collect::<Result<Vec<_>>>()?;
    if coords.is_empty() {
        return Err(Error::invalid("empty point"));
    }
    Ok(coords)
}

impl SequenceSpec {
    /// The named generators: `cube-spike`, `power-square-spike` (`p`),
    /// `alt-neg`, `cube-spike-squared`, `geometric` (`c`, `q`), `constant`
    /// (`value`) and `file` (`path`).
    pub fn builtin(name: &str, params: &BTreeMap<String, String>) -> Result<Self> {
        match name {
            "cube-spike" => {
                Params::new(name, params, &[])?;
                Ok(SequenceSpec::CubeSpike)
            }
            "alt-neg" => {
                Params::new(name, params, &[])?;
                Ok(SequenceSpec::AltNeg)
            }
            "cube-spike-squared" => {
                Params::new(name, params, &[])?;
                Ok(SequenceSpec::CubeSpikeSquared)
            }
            "power-square-spike" => {
                let ps = Params::new(name, params, &["p"])?;
                Ok(SequenceSpec::PowerSquareSpike {
                    p: ps.required("p")?.parse()?,
                })
            }
            "geometric" => {
                let ps = Params::new(name, params, &["c", "q"])?;
                SequenceSpec::geometric(parse_coords(ps.required("c")?)?, ps.required("q")?.parse()?)
            }
            "constant" => {
                let ps = Params::new(name, params, &["value"])?;
                SequenceSpec::constant(parse_coords(ps.required("value")?)?)
            }
            "file" => {
                let ps = Params::new(name, params, &["path"])?;
                SequenceSpec::from_file(Path::new(ps.required("path")?), None)
            }
            other => Err(Error::invalid(format!("unknown generator '{other}'"))),
        }
    }

    pub fn constant(value: Vec<Num>) -> Result<Self> {
        if value.is_empty() {
            return Err(Error::invalid("constant needs at least one coordinate"));
        }
        Ok(SequenceSpec::Constant(value))
    }

    pub fn scalar_constant(value: Num) -> Self {
        SequenceSpec::Constant(vec![value])
    }

    pub fn zero(dim: usize) -> Self {
        SequenceSpec::Constant(vec![Num::int(0); dim.max(1)])
    }

    pub fn geometric(scale: Vec<Num>, ratio: Num) -> Result<Self> {
        if scale.is_empty() {
            return Err(Error::invalid("geometric needs a nonempty scale vector"));
        }
        Ok(SequenceSpec::Geometric { scale, ratio })
    }

    pub fn harmonic(dir: Vec<Num>) -> Result<Self> {
        if dir.is_empty() {
            return Err(Error::invalid("harmonic needs a nonempty direction"));
        }
        Ok(SequenceSpec::Harmonic { dir })
    }

    pub fn alt_harmonic(dir: Vec<Num>) -> Result<Self> {
        if dir.is_empty() {
            return Err(Error::invalid("altharmonic needs a nonempty direction"));
        }
        Ok(SequenceSpec::AltHarmonic { dir })
    }

    pub fn noise(seed: u64, lo: Num, hi: Num, dim: usize) -> Result<Self> {
        if dim == 0 || lo.exact() > hi.exact() || lo.exact() < Num::int(0).exact() {
            return Err(Error::invalid("noise needs dim >= 1 and 0 <= lo <= hi"));
        }
        Ok(SequenceSpec::Noise(NoiseSpec { seed, lo, hi, dim }))
    }

    pub fn table(table: SequenceTable) -> Self {
        SequenceSpec::Table(Arc::new(table))
    }

    /// Reads a sequence file; the format is detected from content when not given.
    pub fn from_file(path: &Path, format: Option<FileFormat>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let format = format.unwrap_or_else(|| FileFormat::detect(&text));
        Ok(SequenceSpec::table(SequenceTable::parse_str(
            &text,
            format,
            path.display().to_string(),
        )?))
    }

    fn derived(d: Derived) -> Self {
        SequenceSpec::Derived(Arc::new(d))
    }

    pub fn plus(&self, other: &SequenceSpec) -> Result<Self> {
        expect_dim(other.dim(), self.dim())?;
        Ok(Self::derived(Derived::Sum(self.clone(), other.clone())))
    }

    pub fn scaled(&self, factor: Num) -> Self {
        Self::derived(Derived::Scale(factor, self.clone()))
    }

    /// Pointwise product with a scalar sequence.
    pub fn times(&self, factor: &SequenceSpec) -> Result<Self> {
        expect_dim(factor.dim(), 1)?;
        Ok(Self::derived(Derived::Product {
            factor: factor.clone(),
            inner: self.clone(),
        }))
    }

    pub fn masked(&self, set: IndexSet) -> Self {
        Self::derived(Derived::Masked {
            set,
            inner: self.clone(),
        })
    }

    pub fn functional(&self, coeffs: Vec<Num>) -> Result<Self> {
        expect_dim(coeffs.len(), self.dim())?;
        Ok(Self::derived(Derived::Functional {
            coeffs,
            inner: self.clone(),
        }))
    }

    pub fn abs(&self) -> Self {
        Self::derived(Derived::Abs(self.clone()))
    }

    pub fn partial_sums(&self) -> Self {
        Self::derived(Derived::PartialSums(self.clone()))
    }

    pub fn divergent_signs(&self) -> Result<Self> {
        expect_dim(self.dim(), 1)?;
        Ok(Self::derived(Derived::DivergentSigns(self.clone())))
    }

    pub fn dim(&self) -> usize {
        match self {
            SequenceSpec::CubeSpike
            | SequenceSpec::PowerSquareSpike { .. }
            | SequenceSpec::AltNeg
            | SequenceSpec::CubeSpikeSquared => 1,
            SequenceSpec::Geometric { scale, .. } => scale.len(),
            SequenceSpec::Harmonic { dir } | SequenceSpec::AltHarmonic { dir } => dir.len(),
            SequenceSpec::Constant(v) => v.len(),
            SequenceSpec::Noise(n) => n.dim,
            SequenceSpec::Table(t) => t.dim(),
            SequenceSpec::Derived(d) => match d.as_ref() {
                Derived::Sum(a, _) => a.dim(),
                Derived::Scale(_, s)
                | Derived::Product { inner: s, .. }
                | Derived::Masked { inner: s, .. }
                | Derived::Abs(s)
                | Derived::PartialSums(s) => s.dim(),
                Derived::Functional { .. } | Derived::DivergentSigns(_) => 1,
            },
        }
    }

    /// Whether `eval(k)` is O(1) rather than a replay of the prefix.
    pub fn is_random_access(&self) -> bool {
        match self {
            SequenceSpec::Derived(d) => match d.as_ref() {
                Derived::Sum(a, b) => a.is_random_access() && b.is_random_access(),
                Derived::Product { factor, inner } => {
                    factor.is_random_access() && inner.is_random_access()
                }
                Derived::Masked { set, inner } => set.is_random_access() && inner.is_random_access(),
                Derived::Scale(_, s) | Derived::Functional { inner: s, .. } | Derived::Abs(s) => {
                    s.is_random_access()
                }
                Derived::PartialSums(_) | Derived::DivergentSigns(_) => false,
            },
            _ => true,
        }
    }

    /// Closed-form answer to "is Σ‖x_k‖ finite?" where one is known.
    pub fn absolutely_summable(&self) -> Option<bool> {
        let all_zero = |v: &[Num]| v.iter().all(Num::is_zero);
        match self {
            SequenceSpec::CubeSpike
            | SequenceSpec::PowerSquareSpike { .. }
            | SequenceSpec::AltNeg
            | SequenceSpec::CubeSpikeSquared => Some(false),
            SequenceSpec::Geometric { scale, ratio } => {
                Some(all_zero(scale) || ratio.approx().abs() < 1.0)
            }
            SequenceSpec::Harmonic { dir } | SequenceSpec::AltHarmonic { dir } => Some(all_zero(dir)),
            SequenceSpec::Constant(v) => Some(all_zero(v)),
            SequenceSpec::Noise(n) => Some(n.hi.is_zero()),
            SequenceSpec::Table(_) => None,
            SequenceSpec::Derived(d) => match d.as_ref() {
                Derived::Sum(a, b) => match (a.absolutely_summable(), b.absolutely_summable()) {
                    (Some(true), Some(true)) => Some(true),
                    (Some(true), Some(false)) | (Some(false), Some(true)) => Some(false),
                    _ => None,
                },
                Derived::Scale(c, s) => {
                    if c.is_zero() {
                        Some(true)
                    } else {
                        s.absolutely_summable()
                    }
                }
                Derived::Abs(s) => s.absolutely_summable(),
                Derived::Masked { set, inner } => {
                    if set.is_finite() || inner.absolutely_summable() == Some(true) {
                        Some(true)
                    } else {
                        None
                    }
                }
                Derived::Functional { inner, coeffs } => {
                    if all_zero(coeffs) || inner.absolutely_summable() == Some(true) {
                        Some(true)
                    } else {
                        None
                    }
                }
                Derived::Product { .. } | Derived::PartialSums(_) | Derived::DivergentSigns(_) => {
                    None
                }
            },
        }
    }

    /// `x_k` for `k >= 1`.
    pub fn eval<T: Scalar>(&self, k: u64) -> Result<Point<T>> {
        if k == 0 {
            return Err(Error::invalid("sequence indices start at 1"));
        }
        match self {
            SequenceSpec::CubeSpike => Ok(Point::scalar(
                exact_cube_root(k).map_or_else(T::zero, |r| T::from_i64(r as i64)),
            )),
            SequenceSpec::PowerSquareSpike { p } => match exact_square_root(k) {
                Some(j) => Ok(Point::scalar(T::from_i64(j as i64).pow(p.two_over())?)),
                None => Ok(Point::scalar(T::zero())),
            },
            SequenceSpec::AltNeg => Ok(Point::scalar(if k % 2 == 1 {
                T::from_i64(-1)
            } else {
                T::zero()
            })),
            SequenceSpec::CubeSpikeSquared => Ok(Point::scalar(
                exact_cube_root(k).map_or_else(T::zero, |r| T::from_i64((r * r) as i64)),
            )),
            SequenceSpec::Geometric { scale, ratio } => {
                let e = u32::try_from(k).map_err(|_| Error::invalid("index too large"))?;
                let factor = T::from_num(ratio).powi(e);
                Point::new(scale.iter().map(|c| T::from_num(c) * factor.clone()))
            }
            SequenceSpec::Harmonic { dir } => {
                let inv = T::from_ratio(1, k);
                Point::new(dir.iter().map(|c| T::from_num(c) * inv.clone()))
            }
            SequenceSpec::AltHarmonic { dir } => {
                let inv = T::from_ratio(if k.is_multiple_of(2) { 1 } else { -1 }, k);
                Point::new(dir.iter().map(|c| T::from_num(c) * inv.clone()))
            }
            SequenceSpec::Constant(v) => Ok(Point::from_nums(v)),
            SequenceSpec::Noise(n) => Ok(noise_term(n, k)),
            SequenceSpec::Table(t) => Ok(Point::from_nums(t.row(k)?)),
            SequenceSpec::Derived(d) => d.eval(k, self.dim()),
        }
    }

    /// `x_1, x_2, ...` in order.
    pub fn stream<T: Scalar>(&self) -> TermStream<'_, T> {
        match self {
            SequenceSpec::Derived(d) => d.stream(self.dim()),
            SequenceSpec::Constant(v) => {
                let x = Point::<T>::from_nums(v);
                Box::new(std::iter::repeat_with(move || Ok(x.clone())))
            }
            _ => Box::new((1u64..).map(move |k| self.eval(k))),
        }
    }

    /// The first `n` terms.
    pub fn prefix<T: Scalar>(&self, n: u64) -> Result<Vec<Point<T>>> {
        self.stream().take(n as usize).collect()
    }
}

fn expect_dim(got: usize, expected: usize) -> Result<()> {
    if got == expected {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}

fn noise_term<T: Scalar>(n: &NoiseSpec, k: u64) -> Point<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(n.seed);
    rng.set_stream(k);
    let lo = T::from_num(&n.lo);
    let span = T::from_num(&n.hi) - lo.clone();
    let coords = (0..n.dim).map(|_| {
        let u: u32 = rng.gen_range(0..=NOISE_STEPS);
        let negative: bool = rng.gen();
        let mag = lo.clone() + span.clone() * T::from_ratio(u as i64, NOISE_STEPS as u64);
        if negative {
            -mag
        } else {
            mag
        }
    });
    Point::new(coords).expect("noise dimension is positive")
}

impl Derived {
    fn eval<T: Scalar>(&self, k: u64, dim: usize) -> Result<Point<T>> {
        match self {
            Derived::Sum(a, b) => Ok(a.eval::<T>(k)?.add(&b.eval(k)?)),
            Derived::Scale(c, s) => Ok(s.eval::<T>(k)?.scale(&T::from_num(c))),
            Derived::Product { factor, inner } => {
                let a = factor.eval::<T>(k)?.into_first();
                Ok(inner.eval::<T>(k)?.scale(&a))
            }
            Derived::Masked { set, inner } => {
                if set.contains::<T>(k)? {
                    inner.eval(k)
                } else {
                    Ok(Point::zero(dim))
                }
            }
            Derived::Functional { coeffs, inner } => {
                let c: Vec<T> = coeffs.iter().map(T::from_num).collect();
                Ok(Point::scalar(inner.eval::<T>(k)?.dot(&c)))
            }
            Derived::Abs(s) => Ok(s.eval::<T>(k)?.map(|c| c.abs())),
            Derived::PartialSums(_) | Derived::DivergentSigns(_) => self
                .stream::<T>(dim)
                .nth((k - 1) as usize)
                .expect("streams are infinite"),
        }
    }

    fn stream<T: Scalar>(&self, dim: usize) -> TermStream<'_, T> {
        match self {
            Derived::Sum(a, b) => Box::new(
                a.stream::<T>()
                    .zip(b.stream::<T>())
                    .map(|(x, y)| {
                        let mut x = x?;
                        x.add_assign(&y?);
                        Ok(x)
                    }),
            ),
            Derived::Scale(c, s) => {
                let c = T::from_num(c);
                Box::new(s.stream::<T>().map(move |x| Ok(x?.scale(&c))))
            }
            Derived::Product { factor, inner } => Box::new(
                factor
                    .stream::<T>()
                    .zip(inner.stream::<T>())
                    .map(|(a, x)| Ok(x?.scale(&a?.into_first()))),
            ),
            Derived::Masked { set, inner } => {
                if inner.is_random_access() {
                    Box::new(set.membership_stream::<T>().enumerate().map(move |(i, m)| {
                        if m? {
                            inner.eval((i + 1) as u64)
                        } else {
                            Ok(Point::zero(dim))
                        }
                    }))
                } else {
                    Box::new(
                        set.membership_stream::<T>()
                            .zip(inner.stream::<T>())
                            .map(move |(m, x)| {
                                let x = x?;
                                Ok(if m? { x } else { Point::zero(dim) })
                            }),
                    )
                }
            }
            Derived::Functional { coeffs, inner } => {
                let c: Vec<T> = coeffs.iter().map(T::from_num).collect();
                Box::new(inner.stream::<T>().map(move |x| Ok(Point::scalar(x?.dot(&c)))))
            }
            Derived::Abs(s) => Box::new(s.stream::<T>().map(|x| Ok(x?.map(|c| c.abs())))),
            Derived::PartialSums(s) => {
                let mut acc = Point::<T>::zero(dim);
                Box::new(s.stream::<T>().map(move |x| {
                    acc.add_assign(&x?);
                    Ok(acc.clone())
                }))
            }
            Derived::DivergentSigns(f) => {
                let mut block = SignBlocks::<T>::new();
                Box::new(f.stream::<T>().map(move |v| Ok(Point::scalar(block.next(v?.first())))))
            }
        }
    }
}

/// State of the block-sign construction while streaming `f`.
pub(crate) struct SignBlocks<T> {
    pub(crate) block: u32,
    pub(crate) coefficient: T,
    pub(crate) threshold: T,
    pub(crate) abs_sum: T,
}

impl<T: Scalar> SignBlocks<T> {
    pub(crate) fn new() -> Self {
        SignBlocks {
            block: 1,
            coefficient: T::from_ratio(1, 2),
            threshold: T::from_i64(4),
            abs_sum: T::zero(),
        }
    }

    /// Coefficient for the next `f_i`; advances to the next block once the
    /// current block's absolute sum passes its threshold.
    pub(crate) fn next(&mut self, f: &T) -> T {
        let a = if f.is_negative() {
            -self.coefficient.clone()
        } else {
            self.coefficient.clone()
        };
        self.abs_sum = self.abs_sum.clone() + f.abs();
        if self.abs_sum > self.threshold {
            self.advance();
        }
        a
    }

    pub(crate) fn advance(&mut self) {
        self.block += 1;
        self.coefficient = self.coefficient.clone() / T::from_i64(2);
        self.threshold = self.threshold.clone() * T::from_i64(4);
        self.abs_sum = T::zero();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn ev(spec: &SequenceSpec, k: u64) -> Rational {
        spec.eval::<Rational>(k).unwrap().into_first()
    }

    fn params(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn cube_spike_values() {
        let s = SequenceSpec::CubeSpike;
        assert_eq!(ev(&s, 27), q(3));
        assert_eq!(ev(&s, 26), q(0));
        assert_eq!(ev(&s, 1), q(1));
        assert_eq!(ev(&s, 1_000_000), q(100));
    }

    #[test]
    fn alt_neg_values() {
        let s = SequenceSpec::AltNeg;
        assert_eq!(ev(&s, 5), q(-1));
        assert_eq!(ev(&s, 6), q(0));
    }

    #[test]
    fn builtins_by_name() {
        let s = SequenceSpec::builtin("cube-spike-squared", &BTreeMap::new()).unwrap();
        assert_eq!(ev(&s, 8), q(4));
        let s = SequenceSpec::builtin("power-square-spike", &params(&[("p", "2")])).unwrap();
        assert_eq!(ev(&s, 9), q(3));
        assert_eq!(ev(&s, 10), q(0));
        let s = SequenceSpec::builtin("constant", &params(&[("value", "0")])).unwrap();
        for k in [1, 2, 17, 10_000] {
            assert_eq!(ev(&s, k), q(0));
        }
        let s = SequenceSpec::builtin("geometric", &params(&[("c", "(1,2)"), ("q", "1/2")])).unwrap();
        assert_eq!(
            s.eval::<Rational>(2).unwrap().coords(),
            &[Rational::from_ratio(1, 4), Rational::from_ratio(1, 2)]
        );
    }

    #[test]
    fn builtin_errors() {
        assert!(SequenceSpec::builtin("nope", &BTreeMap::new()).is_err());
        assert!(SequenceSpec::builtin("power-square-spike", &BTreeMap::new()).is_err());
        assert!(SequenceSpec::builtin("alt-neg", &params(&[("x", "1")])).is_err());
    }

    #[test]
    fn power_square_spike_exactness() {
        // 2/p = 4 is an integer: exact
        let s = SequenceSpec::PowerSquareSpike {
            p: "1/2".parse().unwrap(),
        };
        assert_eq!(ev(&s, 9), q(81));
        // 2/p = 2/3 at j = 2: 2^(2/3) is irrational
        let s = SequenceSpec::PowerSquareSpike {
            p: "3".parse().unwrap(),
        };
        assert!(matches!(s.eval::<Rational>(4), Err(Error::Mode(_))));
        assert!((s.eval::<f64>(4).unwrap().into_first() - 2f64.powf(2.0 / 3.0)).abs() < 1e-15);
        // j = 8 is a perfect cube, so j^(2/3) = 4 stays exact
        assert_eq!(ev(&s, 64), q(4));
    }

    #[test]
    fn partial_sums_stream_matches_eval() {
        let s = SequenceSpec::harmonic(vec![Num::int(1)]).unwrap().partial_sums();
        let streamed: Vec<Point<Rational>> = s.prefix(4).unwrap();
        assert_eq!(streamed[3].first(), &Rational::from_ratio(25, 12));
        assert_eq!(&ev(&s, 4), streamed[3].first());
    }

    #[test]
    fn divergent_signs_blocks() {
        let f = SequenceSpec::AltNeg.plus(&SequenceSpec::AltNeg).unwrap(); // -2, 0, -2, 0, ...
        let a = f.divergent_signs().unwrap();
        let vals: Vec<Rational> = a.prefix::<Rational>(6).unwrap().into_iter().map(Point::into_first).collect();
        // |f| sums 2, 2, 4, 4, 6 > 4 -> block 1 closes at i = 5
        assert_eq!(vals[0], Rational::from_ratio(-1, 2));
        assert_eq!(vals[1], Rational::from_ratio(1, 2));
        assert_eq!(vals[4], Rational::from_ratio(-1, 2));
        assert_eq!(vals[5], Rational::from_ratio(1, 4));
    }

    #[test]
    fn noise_is_deterministic_and_bounded() {
        let s = SequenceSpec::noise(7, Num::ratio(1, 2), Num::int(2), 2).unwrap();
        for k in 1..200 {
            let a = s.eval::<Rational>(k).unwrap();
            assert_eq!(a, s.eval::<Rational>(k).unwrap());
            for c in a.coords() {
                let m = Scalar::abs(c);
                assert!(m >= Rational::from_ratio(1, 2) && m <= q(2));
            }
            let f = s.eval::<f64>(k).unwrap();
            assert!((f.first() - a.first().to_f64()).abs() < 1e-12);
        }
    }

    #[test]
    fn determinism_of_builtins() {
        let specs = [
            SequenceSpec::CubeSpike,
            SequenceSpec::AltNeg,
            SequenceSpec::CubeSpikeSquared,
            SequenceSpec::PowerSquareSpike { p: Exponent::ONE },
        ];
        for s in &specs {
            let a: Vec<Point<Rational>> = s.prefix(100_000).unwrap();
            for (i, x) in a.iter().enumerate().step_by(997) {
                assert_eq!(x, &s.eval::<Rational>(i as u64 + 1).unwrap());
            }
            let b: Vec<Point<Rational>> = s.prefix(100_000).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn large_index_is_cheap() {
        assert_eq!(ev(&SequenceSpec::CubeSpike, 10_000_000), q(0));
        assert_eq!(ev(&SequenceSpec::CubeSpikeSquared, 9_938_375), q(215 * 215));
    }

    #[test]
    fn dimension_checks() {
        let a = SequenceSpec::constant(vec![Num::int(1), Num::int(2)]).unwrap();
        assert!(a.plus(&SequenceSpec::AltNeg).is_err());
        assert!(a.functional(vec![Num::int(1)]).is_err());
        assert!(a.divergent_signs().is_err());
    }

    #[test]
    fn parse_coords_forms() {
        assert_eq!(parse_coords("(1,0)").unwrap(), vec![Num::int(1), Num::int(0)]);
        assert_eq!(parse_coords("[1/2]").unwrap(), vec![Num::ratio(1, 2)]);
        assert!(parse_coords("a,b").is_err());
    }
}
