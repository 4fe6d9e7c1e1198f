//! Canonical arbitrary-precision rationals.
//!
//! `ExactRational` is the key type for all additive arithmetic. GMP keeps
//! rationals in lowest terms with a positive denominator, so equal values
//! hash and compare identically.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use rug::{Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(Rational);

impl ExactRational {
    pub fn zero() -> Self {
        ExactRational(Rational::new())
    }

    pub fn one() -> Self {
        ExactRational(Rational::from(1))
    }

    pub fn from_integer(n: impl Into<Integer>) -> Self {
        ExactRational(Rational::from(n.into()))
    }

    /// Builds `num/den` in lowest terms. Panics if `den` is zero.
    pub fn from_parts(num: impl Into<Integer>, den: impl Into<Integer>) -> Self {
        let den = den.into();
        assert!(den != 0, "zero denominator");
        ExactRational(Rational::from((num.into(), den)))
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == std::cmp::Ordering::Equal
    }

    pub fn is_integer(&self) -> bool {
        *self.0.denom() == 1
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.clone().abs())
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(ExactRational(self.0.clone().recip()))
        }
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn into_rational(self) -> Rational {
        self.0
    }
}

impl From<Rational> for ExactRational {
    fn from(r: Rational) -> Self {
        ExactRational(r)
    }
}

impl From<Integer> for ExactRational {
    fn from(n: Integer) -> Self {
        ExactRational(Rational::from(n))
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        ExactRational(Rational::from(n))
    }
}

impl From<i32> for ExactRational {
    fn from(n: i32) -> Self {
        ExactRational(Rational::from(n))
    }
}

impl From<(i64, i64)> for ExactRational {
    fn from((n, d): (i64, i64)) -> Self {
        ExactRational::from_parts(n, d)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational(Rational::from($tr::$method(&self.0, &rhs.0)))
            }
        }
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational($tr::$method(self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(Rational::from(-&self.0))
    }
}

impl std::ops::Div<&ExactRational> for &ExactRational {
    type Output = ExactRational;
    /// Panics on division by zero.
    fn div(self, rhs: &ExactRational) -> ExactRational {
        assert!(!rhs.is_zero(), "division by zero");
        ExactRational(Rational::from(&self.0 / &rhs.0))
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for ExactRational {
    type Err = Error;

    /// Accepts `"n"` or `"n/d"` with optional sign and surrounding whitespace.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let parsed = match s.split_once('/') {
            Some((n, d)) => {
                let n = Integer::from_str(n.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
                let d = Integer::from_str(d.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
                if d == 0 {
                    return Err(Error::Parse(format!("{s}: zero denominator")));
                }
                Rational::from((n, d))
            }
            None => Rational::from(
                Integer::from_str(s).map_err(|e| Error::Parse(format!("{s}: {e}")))?,
            ),
        };
        Ok(ExactRational(parsed))
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
