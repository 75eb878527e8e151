use std::fmt;
use std::str::FromStr;

use serde_json::Value;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::numeric::{Exponent, Num, Scalar};

pub type Coords<T> = SmallVec<[T; 3]>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum NormKind {
    #[default]
    Max,
    Euclidean,
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(NormKind::Max),
            "euclidean" | "l2" => Ok(NormKind::Euclidean),
            other => Err(Error::invalid(format!("unknown norm '{other}'"))),
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::Max => "max",
            NormKind::Euclidean => "euclidean",
        })
    }
}

/// A vector in `R^d`; `d = 1` is a plain scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<T> {
    coords: Coords<T>,
}

impl<T: Scalar> Point<T> {
    pub fn new(coords: impl IntoIterator<Item = T>) -> Result<Self> {
        let coords: Coords<T> = coords.into_iter().collect();
        if coords.is_empty() {
            return Err(Error::invalid("a point needs at least one coordinate"));
        }
        Ok(Point { coords })
    }

    pub fn scalar(x: T) -> Self {
        let mut coords = Coords::new();
        coords.push(x);
        Point { coords }
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Point {
            coords: Coords::from_elem(T::zero(), dim),
        }
    }

    pub fn from_nums(nums: &[Num]) -> Self {
        assert!(!nums.is_empty(), "dimension must be positive");
        Point {
            coords: nums.iter().map(T::from_num).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn coord(&self, j: usize) -> &T {
        &self.coords[j]
    }

    pub fn first(&self) -> &T {
        &self.coords[0]
    }

    pub fn into_first(self) -> T {
        self.coords.into_iter().next().expect("nonempty point")
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected,
                got: self.dim(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            if !b.is_zero() {
                *a = a.clone() + b.clone();
            }
        }
    }

    pub fn scale(&self, factor: &T) -> Self {
        Point {
            coords: self.coords.iter().map(|c| c.clone() * factor.clone()).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Point {
            coords: self.coords.iter().map(f).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c.clone())
    }

    /// Pairing `<c, self> = sum_j c_j x_j` with a coefficient vector.
    pub fn dot(&self, coeffs: &[T]) -> T {
        assert_eq!(self.dim(), coeffs.len(), "dimension mismatch");
        self.coords
            .iter()
            .zip(coeffs)
            .fold(T::zero(), |acc, (x, c)| acc + x.clone() * c.clone())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let mut coords = Coords::new();
        for (a, b) in self.coords.iter().zip(&other.coords) {
            coords.push(f(a, b));
        }
        Point { coords }
    }

    fn max_abs(&self) -> T {
        self.coords
            .iter()
            .map(|c| c.abs())
            .fold(T::zero(), |m, c| m.max_of(c))
    }

    fn sum_sq(&self) -> T {
        self.coords
            .iter()
            .fold(T::zero(), |acc, c| acc + c.clone() * c.clone())
    }

    pub fn norm(&self, kind: NormKind) -> Result<T> {
        match kind {
            NormKind::Max => Ok(self.max_abs()),
            NormKind::Euclidean if self.dim() == 1 => Ok(self.coords[0].abs()),
            NormKind::Euclidean => self.sum_sq().pow(Exponent::new(1, 2)?),
        }
    }

    /// `‖self‖^p`; for the euclidean norm this is `(Σ x_j²)^(p/2)`, which stays
    /// exact whenever the final power is rational.
    pub fn norm_pow(&self, kind: NormKind, p: Exponent) -> Result<T> {
        match kind {
            NormKind::Euclidean if self.dim() > 1 => self.sum_sq().pow(p.halved()),
            _ => self.norm(kind)?.pow(p),
        }
    }

    /// `‖self − other‖^p` without building the difference.
    pub fn distance_pow(&self, other: &Self, kind: NormKind, p: Exponent) -> Result<T> {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let diffs = self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() - b.clone());
        match kind {
            NormKind::Euclidean if self.dim() > 1 => diffs.fold(T::zero(), |acc, d| acc + d.clone() * d).pow(p.halved()),
            _ => diffs.fold(T::zero(), |m, d| m.max_of(d.abs())).pow(p),
        }
    }

    pub fn distance(&self, other: &Self, kind: NormKind) -> Result<T> {
        self.sub(other).norm(kind)
    }

    pub fn render(&self) -> String {
        if self.dim() == 1 {
            self.coords[0].render()
        } else {
            let parts: Vec<String> = self.coords.iter().map(|c| c.render()).collect();
            format!("({})", parts.join(","))
        }
    }

    /// Scalars serialize bare, vectors as arrays.
    pub fn to_json(&self) -> Value {
        if self.dim() == 1 {
            self.coords[0].to_json()
        } else {
            Value::Array(self.coords.iter().map(|c| c.to_json()).collect())
        }
    }
}

impl<T: Scalar> fmt::Display for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
