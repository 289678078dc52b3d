//! Exact arbitrary-precision rationals.
//!
//! [`Rational`] wraps `num_rational::BigRational`, which keeps every value in
//! lowest terms with a positive denominator. The wrapper fixes the text form
//! used across all file formats: `"n/d"` in lowest terms, or `"n"` when the
//! denominator is one (so zero is `"0"`).

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        Ok(Rational(self.0.recip()))
    }

    /// `self / rhs` with the `0/0 := 0` convention; any `x/0` with `x != 0`
    /// is an error.
    pub fn ratio_or_zero(&self, rhs: &Rational) -> Result<Self> {
        if rhs.is_zero() {
            if self.is_zero() {
                Ok(Rational::zero())
            } else {
                Err(Error::Domain(format!("division of {self} by zero")))
            }
        } else {
            Ok(self / rhs)
        }
    }

    pub fn pow(&self, exp: i32) -> Self {
        Rational(num_traits::pow::Pow::pow(&self.0, exp))
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Nearest `f64`; values beyond the `f64` range saturate.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    /// Twelve significant digits, scientific notation. Used only as a
    /// human-readable annotation next to the exact value.
    pub fn to_decimal_string(&self) -> String {
        format!("{:.11e}", self.to_f64())
    }

    /// The denominator as an unsigned integer (always positive).
    pub fn denom_unsigned(&self) -> BigUint {
        self.0.denom().magnitude().clone()
    }

    /// The value as a non-negative integer if it is one.
    pub fn to_biguint(&self) -> Option<BigUint> {
        if self.0.is_integer() && self.0.numer().sign() != Sign::Minus {
            Some(self.0.numer().magnitude().clone())
        } else {
            None
        }
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigUint> for Rational {
    fn from(n: BigUint) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
}

/// Shorthand for tests and literals: `ratio(5, 18)`.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom).expect("nonzero denominator")
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(text: &str, what: &str) -> Result<BigInt> {
    let digits = text.strip_prefix(['-', '+']).unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("malformed {what} {text:?}")));
    }
    text.parse::<BigInt>()
        .map_err(|e| Error::Parse(format!("malformed {what} {text:?}: {e}")))
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once('/') {
            None => Ok(Rational::from_integer(parse_int(s, "integer")?)),
            Some((n, d)) => {
                let numer = parse_int(n, "numerator")?;
                if d.starts_with(['-', '+']) {
                    return Err(Error::Parse(format!(
                        "denominator must be a positive integer in {s:?}"
                    )));
                }
                let denom = parse_int(d, "denominator")?;
                if denom.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                Rational::new(numer, denom)
            }
        }
    }
}

/// Parses `"<int>/<posint>"` or `"<int>"` into lowest terms.
pub fn rational_parse(text: &str) -> Result<Rational> {
    text.parse()
}

/// Canonical text form.
pub fn rational_format(r: &Rational) -> String {
    r.to_string()
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
// Division by zero panics, as for the primitive types; use
// `ratio_or_zero` or `recip` where the divisor can vanish.
forward_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}
