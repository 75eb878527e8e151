//! Scalar backends: exact big rationals and IEEE-754 doubles.
//!
//! Every analysis is generic over [`Scalar`]; picking `Rational` or `f64`
//! picks the numeric mode for the whole run, so the two never mix.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Float,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" | "floating" => Ok(Mode::Float),
            other => Err(Error::invalid(format!("unknown mode '{other}'"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

/// A constant held in both representations, so float evaluation never has
/// to convert a big rational in a hot loop.
#[derive(Clone, Debug, PartialEq)]
pub struct Num {
    exact: Rational,
    approx: f64,
}

impl Num {
    pub fn new(exact: Rational) -> Self {
        let approx = ToPrimitive::to_f64(&exact).unwrap_or(f64::NAN);
        Num { exact, approx }
    }

    pub fn int(n: i64) -> Self {
        Num::new(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Num::new(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn exact(&self) -> &Rational {
        &self.exact
    }

    pub fn approx(&self) -> f64 {
        self.approx
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.exact.is_positive()
    }

    pub fn abs(&self) -> Num {
        Num::new(Signed::abs(&self.exact))
    }
}

impl From<Rational> for Num {
    fn from(q: Rational) -> Self {
        Num::new(q)
    }
}

impl From<i64> for Num {
    fn from(n: i64) -> Self {
        Num::int(n)
    }
}

impl FromStr for Num {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(Num::new)
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.exact)
    }
}

/// Parses `a/b`, plain decimals (`-0.125`) and scientific notation (`1e-3`)
/// into an exact rational. Decimal text is never routed through `f64`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_decimal(n.trim())?;
        let d = parse_decimal(d.trim())?;
        if d.is_zero() {
            return Err(Error::invalid(format!("zero denominator in '{t}'")));
        }
        return Ok(n / d);
    }
    parse_decimal(t)
}

fn parse_decimal(t: &str) -> Result<Rational> {
    let bad = || Error::invalid(format!("not a number: '{t}'"));
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = t[pos + 1..].parse().map_err(|_| bad())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    if exp.abs() > 10_000 {
        return Err(Error::invalid(format!("exponent too large in '{t}'")));
    }
    let (negative, body) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let mut value = Rational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = frac.len() as i32 - exp;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale > 0 {
        value /= Pow::pow(&ten, scale as u32);
    } else if scale < 0 {
        value *= Pow::pow(&ten, (-scale) as u32);
    }
    Ok(if negative { -value } else { value })
}

/// A positive rational exponent `num/den`, kept reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Exponent {
    num: u32,
    den: u32,
}

impl Exponent {
    pub const ONE: Exponent = Exponent { num: 1, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::invalid(format!(
                "exponent must be a positive rational, got {num}/{den}"
            )));
        }
        let g = num.gcd(&den);
        Ok(Exponent {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(n: u32) -> Result<Self> {
        Exponent::new(n, 1)
    }

    pub fn numer(&self) -> u32 {
        self.num
    }

    pub fn denom(&self) -> u32 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn as_rational(&self) -> Rational {
        Rational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    /// `self / 2`, used to raise a squared euclidean norm.
    pub fn halved(&self) -> Exponent {
        Exponent::new(self.num, self.den * 2).expect("nonzero")
    }

    /// `2 / self`.
    pub fn two_over(&self) -> Exponent {
        Exponent::new(2 * self.den, self.num).expect("nonzero")
    }

    pub fn at_least_one(&self) -> bool {
        self.num >= self.den
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let q = parse_rational(s)?;
        if !q.is_positive() {
            return Err(Error::invalid(format!("exponent must be positive, got '{s}'")));
        }
        let num = q.numer().to_u32();
        let den = q.denom().to_u32();
        match (num, den) {
            (Some(n), Some(d)) => Exponent::new(n, d),
            _ => Err(Error::invalid(format!("exponent '{s}' out of range"))),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Arithmetic needed by the analyses. Implemented by [`Rational`] (exact
/// mode) and `f64` (floating mode).
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    fn from_num(n: &Num) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(num: i64, den: u64) -> Self;

    fn abs(&self) -> Self;
    fn powi(&self, e: u32) -> Self;
    /// `self^p` for `self >= 0`. Exact mode fails when the result is irrational.
    fn pow(&self, p: Exponent) -> Result<Self>;

    fn to_f64(&self) -> f64;
    /// Exact text: `num/den` (or `n` for integers) in exact mode, shortest
    /// round-trip decimal in floating mode.
    fn render(&self) -> String;
    fn to_json(&self) -> Value;

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

fn exact_root(x: &BigInt, k: u32) -> Option<BigInt> {
    let r = x.nth_root(k);
    (Pow::pow(&r, k) == *x).then_some(r)
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_num(n: &Num) -> Self {
        n.exact.clone()
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: u64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn powi(&self, e: u32) -> Self {
        Pow::pow(self, e)
    }

    fn pow(&self, p: Exponent) -> Result<Self> {
        if Signed::is_negative(self) {
            return Err(Error::invalid(format!("negative base {self} for power {p}")));
        }
        if self.is_zero() || self.is_one() || p == Exponent::ONE {
            return Ok(self.clone());
        }
        let raised: Rational = Pow::pow(self, p.numer());
        if p.is_integer() {
            return Ok(raised);
        }
        match (
            exact_root(raised.numer(), p.denom()),
            exact_root(raised.denom(), p.denom()),
        ) {
            (Some(n), Some(d)) => Ok(Rational::new(n, d)),
            _ => Err(Error::Mode(format!("({self})^({p}) is irrational"))),
        }
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn render(&self) -> String {
        self.to_string()
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_num(n: &Num) -> Self {
        n.approx
    }

    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn powi(&self, e: u32) -> Self {
        if e <= i32::MAX as u32 {
            f64::powi(*self, e as i32)
        } else {
            f64::powf(*self, e as f64)
        }
    }

    fn pow(&self, p: Exponent) -> Result<Self> {
        if *self < 0.0 {
            return Err(Error::invalid(format!("negative base {self} for power {p}")));
        }
        Ok(if p == Exponent::ONE {
            *self
        } else if p.is_integer() {
            Scalar::powi(self, p.numer())
        } else if p.numer() == 1 && p.denom() == 2 {
            self.sqrt()
        } else {
            self.powf(p.as_f64())
        })
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn render(&self) -> String {
        if self.is_finite() {
            // positive zero for -0.0, shortest round-trip digits otherwise
            let x = if *self == 0.0 { 0.0 } else { *self };
            serde_json::Number::from_f64(x)
                .map(|n| n.to_string())
                .unwrap_or_else(|| x.to_string())
        } else if self.is_nan() {
            "NaN".to_string()
        } else if *self > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    }

    fn to_json(&self) -> Value {
        let x = if *self == 0.0 { 0.0 } else { *self };
        serde_json::Number::from_f64(x)
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(self.render()))
    }
}
