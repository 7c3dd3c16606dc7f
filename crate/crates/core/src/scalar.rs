//! Dual-mode arithmetic.
//!
//! Every construction in the crate is generic over [`Scalar`]. Two backends
//! are provided: [`Rational`] (arbitrary precision, every comparison exact)
//! and `f64` (comparisons within [`FLOAT_TOL`]).

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Absolute tolerance used by float-mode comparisons.
pub const FLOAT_TOL: f64 = 1e-9;

/// Tolerance used for float-mode mass bookkeeping and atom merging.
pub const FLOAT_MASS_TOL: f64 = 1e-12;

/// Exponent of a Wasserstein distance, `p >= 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        Ok(Exponent(p))
    }

    /// Integer exponent; panics on `p == 0`.
    pub fn int(p: u32) -> Self {
        assert!(p >= 1, "exponent must be at least 1");
        Exponent(f64::from(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn as_integer(self) -> Option<u32> {
        if self.0.fract() == 0.0 && self.0 <= f64::from(u32::MAX) {
            Some(self.0 as u32)
        } else {
            None
        }
    }

    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }
}

impl Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let p: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("invalid exponent `{s}`")))?;
        Exponent::new(p)
    }
}

/// Ordered field used for coordinates, weights and costs.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True for backends whose comparisons are exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    /// Conversion from a float. Exact backends convert the binary value exactly.
    fn from_f64(x: f64) -> Result<Self>;
    fn to_f64(&self) -> f64;
    /// The exact rational value, when the backend has one.
    fn to_rational(&self) -> Option<Rational>;

    fn powi(&self, n: u32) -> Self;
    /// `self^p` for `self >= 0`. Exact backends reject non-integer `p`.
    fn pow_exp(&self, p: Exponent) -> Result<Self>;

    /// Equality: exact, or within [`FLOAT_TOL`] for floats.
    fn approx_eq(&self, other: &Self) -> bool;

    /// Parses `"3"`, `"-1/4"`, `"0.125"`, `"1e-3"`.
    fn parse_scalar(s: &str) -> Result<Self>;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn half(&self) -> Self {
        self.clone() / Self::from_i64(2)
    }

    fn is_zero_approx(&self) -> bool {
        self.approx_eq(&Self::zero())
    }

    /// `self < other` by more than the tolerance.
    fn lt_strict(&self, other: &Self) -> bool {
        *self < *other && !self.approx_eq(other)
    }

    /// `self <= other` up to the tolerance.
    fn le_approx(&self, other: &Self) -> bool {
        *self <= *other || self.approx_eq(other)
    }

    /// Strictly positive beyond tolerance.
    fn is_positive_strict(&self) -> bool {
        Self::zero().lt_strict(self)
    }

    /// Absolute residual `|self - other|` as a float.
    fn residual(&self, other: &Self) -> f64 {
        (self.clone() - other.clone()).abs().to_f64()
    }

    /// Serialization form used in JSON and CSV output.
    fn to_text(&self) -> String {
        format!("{self}")
    }

    fn to_json(&self) -> serde_json::Value;
}

fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let err = || Error::Parse(format!("invalid number `{s}`"));
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(n, d));
    }
    // Decimal with optional exponent, parsed exactly.
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(k) => {
            let e: i64 = t[k + 1..].parse().map_err(|_| err())?;
            (&t[..k], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: BigInt = all.parse().map_err(|_| err())?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let q = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(q)
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn from_f64(x: f64) -> Result<Self> {
        Rational::from_float(x).ok_or(Error::NonFinite(x))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn powi(&self, n: u32) -> Self {
        num_traits::pow(self.clone(), n as usize)
    }

    fn pow_exp(&self, p: Exponent) -> Result<Self> {
        match p.as_integer() {
            Some(n) => Ok(Scalar::powi(self, n)),
            None => Err(Error::ExactNeedsIntegerExponent(p.value())),
        }
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn parse_scalar(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Result<Self> {
        if x.is_finite() {
            Ok(x)
        } else {
            Err(Error::NonFinite(x))
        }
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<Rational> {
        None
    }

    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }

    fn pow_exp(&self, p: Exponent) -> Result<Self> {
        Ok(match p.as_integer() {
            Some(n) => f64::powi(*self, n as i32),
            None => self.powf(p.value()),
        })
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_TOL
    }

    fn parse_scalar(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.contains('/') {
            return parse_rational(t).map(|q| <f64 as Scalar>::from_rational(&q));
        }
        t.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Parse(format!("invalid number `{s}`")))
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
}

/// Parses a JSON number or string into a scalar. Numbers are read through
/// their decimal text, so `0.1` becomes exactly `1/10` in rational mode.
pub fn scalar_from_json<S: Scalar>(v: &serde_json::Value) -> Result<S> {
    match v {
        serde_json::Value::Number(n) => S::parse_scalar(&n.to_string()),
        serde_json::Value::String(s) => S::parse_scalar(s),
        other => Err(Error::Parse(format!("expected a number, found {other}"))),
    }
}

/// Shorthand for building rationals in tests and fixtures.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_forms() {
        assert_eq!(Rational::parse_scalar("3").unwrap(), q(3, 1));
        assert_eq!(Rational::parse_scalar("-1/4").unwrap(), q(-1, 4));
        assert_eq!(Rational::parse_scalar("0.125").unwrap(), q(1, 8));
        assert_eq!(Rational::parse_scalar("-.5").unwrap(), q(-1, 2));
        assert_eq!(Rational::parse_scalar("1e-3").unwrap(), q(1, 1000));
        assert_eq!(Rational::parse_scalar("2.5E2").unwrap(), q(250, 1));
        assert!(Rational::parse_scalar("1/0").is_err());
        assert!(Rational::parse_scalar("abc").is_err());
        assert!(Rational::parse_scalar("").is_err());
    }

    #[test]
    fn parses_floats() {
        assert_eq!(f64::parse_scalar("1/4").unwrap(), 0.25);
        assert_eq!(f64::parse_scalar("2.5").unwrap(), 2.5);
        assert!(f64::parse_scalar("inf").is_err());
    }

    #[test]
    fn json_numbers_are_exact_decimals() {
        let v: serde_json::Value = serde_json::from_str("0.1").unwrap();
        assert_eq!(scalar_from_json::<Rational>(&v).unwrap(), q(1, 10));
        let v = serde_json::Value::String("2/3".into());
        assert_eq!(scalar_from_json::<Rational>(&v).unwrap(), q(2, 3));
    }

    #[test]
    fn exponent_validation() {
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert_eq!(Exponent::new(2.0).unwrap().as_integer(), Some(2));
        assert_eq!(Exponent::new(1.5).unwrap().as_integer(), None);
        assert!(q(2, 1).pow_exp(Exponent::new(1.5).unwrap()).is_err());
        assert_eq!(q(1, 2).pow_exp(Exponent::int(3)).unwrap(), q(1, 8));
    }

    #[test]
    fn rational_text_round_trips() {
        let x = q(-7, 3);
        assert_eq!(Rational::parse_scalar(&x.to_text()).unwrap(), x);
    }
}
