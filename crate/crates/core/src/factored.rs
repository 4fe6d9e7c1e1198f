//! Nonzero rationals stored by prime factorization, and the arithmetic
//! functions read off from it: p-adic valuation, the prime support, its
//! size, membership in the S-unit group, and the S-free / S-part split.

use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::Integer;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::prime::{sieve, Prime};
use crate::rational::ExactRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// `sign * prod p^e`, with exponents sorted by prime and never zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactoredRational {
    sign: Sign,
    factors: Vec<(Prime, i64)>,
}

impl FactoredRational {
    pub fn one() -> Self {
        FactoredRational {
            sign: Sign::Positive,
            factors: Vec::new(),
        }
    }

    /// Builds from arbitrary `(prime, exponent)` pairs; repeated primes are
    /// summed and zero exponents dropped.
    pub fn from_factors(sign: Sign, pairs: impl IntoIterator<Item = (Prime, i64)>) -> Self {
        let mut map: BTreeMap<Prime, i64> = BTreeMap::new();
        for (p, e) in pairs {
            *map.entry(p).or_insert(0) += e;
        }
        FactoredRational {
            sign,
            factors: map.into_iter().filter(|&(_, e)| e != 0).collect(),
        }
    }

    pub fn prime_power(p: Prime, e: i64) -> Self {
        FactoredRational::from_factors(Sign::Positive, [(p, e)])
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn factors(&self) -> &[(Prime, i64)] {
        &self.factors
    }

    /// P(x), ascending.
    pub fn support(&self) -> impl Iterator<Item = Prime> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn nu(&self, p: Prime) -> i64 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn divisible_by(&self, p: Prime) -> bool {
        self.nu(p) != 0
    }

    /// True iff every prime of `self` lies in `primes` (which must be sorted).
    pub fn in_qs(&self, primes: &[Prime]) -> bool {
        self.support().all(|p| primes.binary_search(&p).is_ok())
    }

    /// Splits `x = x1 * x2` with `x1` free of `primes` and `x2` in Q_S.
    /// The sign stays on `x1`.
    pub fn s_free_part(&self, primes: &[Prime]) -> (FactoredRational, FactoredRational) {
        let (inside, outside): (Vec<_>, Vec<_>) = self
            .factors
            .iter()
            .partition(|(p, _)| primes.binary_search(p).is_ok());
        (
            FactoredRational {
                sign: self.sign,
                factors: outside,
            },
            FactoredRational {
                sign: Sign::Positive,
                factors: inside,
            },
        )
    }

    pub fn is_one(&self) -> bool {
        self.sign == Sign::Positive && self.factors.is_empty()
    }

    pub fn abs(&self) -> FactoredRational {
        FactoredRational {
            sign: Sign::Positive,
            factors: self.factors.clone(),
        }
    }

    pub fn negate(&self) -> FactoredRational {
        FactoredRational {
            sign: self.sign.times(Sign::Negative),
            factors: self.factors.clone(),
        }
    }

    pub fn mul(&self, other: &FactoredRational) -> FactoredRational {
        self.combine(other, 1)
    }

    pub fn div(&self, other: &FactoredRational) -> FactoredRational {
        self.combine(other, -1)
    }

    pub fn inverse(&self) -> FactoredRational {
        FactoredRational {
            sign: self.sign,
            factors: self.factors.iter().map(|&(p, e)| (p, -e)).collect(),
        }
    }

    pub fn pow(&self, n: i64) -> FactoredRational {
        if n == 0 {
            return FactoredRational::one();
        }
        let sign = if n % 2 == 0 { Sign::Positive } else { self.sign };
        FactoredRational {
            sign,
            factors: self.factors.iter().map(|&(p, e)| (p, e * n)).collect(),
        }
    }

    // merge of two sorted exponent lists, `other` scaled by `scale`
    fn combine(&self, other: &FactoredRational, scale: i64) -> FactoredRational {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.factors, &other.factors);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
            if take_a {
                out.push(a[i]);
                i += 1;
            } else if take_b {
                out.push((b[j].0, scale * b[j].1));
                j += 1;
            } else {
                let e = a[i].1 + scale * b[j].1;
                if e != 0 {
                    out.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
        FactoredRational {
            sign: self.sign.times(other.sign),
            factors: out,
        }
    }

    pub fn to_exact(&self) -> ExactRational {
        let mut num = Integer::from(1);
        let mut den = Integer::from(1);
        for &(p, e) in &self.factors {
            let pe = Integer::from(p.get()).pow(e.unsigned_abs() as u32);
            if e > 0 {
                num *= pe;
            } else {
                den *= pe;
            }
        }
        if self.sign == Sign::Negative {
            num = -num;
        }
        ExactRational::from_parts(num, den)
    }
}

impl fmt::Display for FactoredRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_exact().fmt(f)
    }
}

/// Strips every prime `<= bound` from `n` by trial division.
///
/// Returns the exponents found and the remaining cofactor. The cofactor is
/// `1` exactly when every prime factor of `n` is `<= bound`.
fn trial_divide(n: &Integer, bound: u64) -> (Vec<(Prime, i64)>, Integer) {
    let mut rest = n.clone().abs();
    let mut out = Vec::new();
    if rest <= 1 {
        return (out, rest);
    }
    let primes = sieve(bound.min(u32::MAX as u64));
    for &p in primes.iter() {
        if let Some(small) = rest.to_u64() {
            // residue is a prime once p^2 exceeds it
            if (p as u128) * (p as u128) > small as u128 {
                if small > 1 && small <= bound {
                    out.push((Prime::new_unchecked(small), 1));
                    rest = Integer::from(1);
                }
                return (out, rest);
            }
        }
        if rest.is_divisible_u(p as u32) {
            let mut e = 0;
            while rest.is_divisible_u(p as u32) {
                rest.div_exact_u_mut(p as u32);
                e += 1;
            }
            out.push((Prime::new_unchecked(p), e));
            if rest == 1 {
                return (out, rest);
            }
        }
    }
    (out, rest)
}

/// Factors a nonzero rational whose primes are all `<= bound`.
pub fn factor(x: &ExactRational, bound: u64) -> Result<FactoredRational> {
    if x.is_zero() {
        return Err(Error::ZeroElement("factor"));
    }
    let (num, num_rest) = trial_divide(x.numer(), bound);
    let (den, den_rest) = trial_divide(x.denom(), bound);
    for rest in [&num_rest, &den_rest] {
        if *rest != 1 {
            return Err(Error::UnfactoredResidue {
                value: x.to_string(),
                residue: rest.to_string(),
                bound,
            });
        }
    }
    let sign = if x.numer().cmp0() == std::cmp::Ordering::Less {
        Sign::Negative
    } else {
        Sign::Positive
    };
    Ok(FactoredRational::from_factors(
        sign,
        num.into_iter().chain(den.into_iter().map(|(p, e)| (p, -e))),
    ))
}

/// Factors `x` using only the given primes; fails if anything else remains.
pub fn factor_over(x: &ExactRational, primes: &[Prime]) -> Result<FactoredRational> {
    if x.is_zero() {
        return Err(Error::ZeroElement("factor_over"));
    }
    let mut pairs = Vec::new();
    let mut parts = [x.numer().clone().abs(), x.denom().clone()];
    for (idx, part) in parts.iter_mut().enumerate() {
        let scale = if idx == 0 { 1 } else { -1 };
        for &p in primes {
            let pv = Integer::from(p.get());
            let mut e = 0i64;
            while part.is_divisible(&pv) {
                part.div_exact_mut(&pv);
                e += 1;
            }
            if e > 0 {
                pairs.push((p, scale * e));
            }
        }
        if *part != 1 {
            return Err(Error::UnfactoredResidue {
                value: x.to_string(),
                residue: part.to_string(),
                bound: primes.iter().map(|p| p.get()).max().unwrap_or(0),
            });
        }
    }
    let sign = if x.numer().cmp0() == std::cmp::Ordering::Less {
        Sign::Negative
    } else {
        Sign::Positive
    };
    Ok(FactoredRational::from_factors(sign, pairs))
}

struct OrderedFactors<'a>(&'a [(Prime, i64)]);

impl Serialize for OrderedFactors<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (p, e) in self.0 {
            map.serialize_entry(&p.get().to_string(), e)?;
        }
        map.end()
    }
}

// Canonical form: {"sign": ±1, "factors": {...}} with primes ascending.
impl Serialize for FactoredRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("sign", &self.sign.as_i8())?;
        map.serialize_entry("factors", &OrderedFactors(&self.factors))?;
        map.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFactored {
    sign: i8,
    factors: BTreeMap<String, i64>,
}

impl TryFrom<RawFactored> for FactoredRational {
    type Error = Error;

    fn try_from(raw: RawFactored) -> Result<Self> {
        let sign = match raw.sign {
            1 => Sign::Positive,
            -1 => Sign::Negative,
            s => return Err(Error::Parse(format!("sign must be 1 or -1, got {s}"))),
        };
        let mut pairs = Vec::with_capacity(raw.factors.len());
        for (k, e) in raw.factors {
            let p: u64 = k
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime key {k:?}")))?;
            if e == 0 {
                return Err(Error::Parse(format!("zero exponent for prime {p}")));
            }
            pairs.push((Prime::new(p)?, e));
        }
        Ok(FactoredRational::from_factors(sign, pairs))
    }
}

impl<'de> Deserialize<'de> for FactoredRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawFactored::deserialize(deserializer)?;
        FactoredRational::try_from(raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn factor_examples() {
        let twelve = factor(&q("12"), 100).unwrap();
        assert_eq!(twelve.sign(), Sign::Positive);
        assert_eq!(twelve.factors(), &[(p(2), 2), (p(3), 1)]);

        let three_quarters = factor(&q("3/4"), 100).unwrap();
        assert_eq!(three_quarters.factors(), &[(p(2), -2), (p(3), 1)]);

        let minus_one = factor(&q("-1"), 100).unwrap();
        assert_eq!(minus_one.sign(), Sign::Negative);
        assert!(minus_one.factors().is_empty());
    }

    #[test]
    fn factor_residue_errors() {
        assert!(matches!(
            factor(&q("101"), 100),
            Err(Error::UnfactoredResidue { .. })
        ));
        assert!(matches!(
            factor(&q("1/206"), 100),
            Err(Error::UnfactoredResidue { .. })
        ));
        // a prime cofactor at the bound itself is fine
        assert_eq!(factor(&q("194"), 97).unwrap().nu(p(97)), 1);
        assert!(matches!(factor(&q("0"), 100), Err(Error::ZeroElement(_))));
    }

    #[test]
    fn factor_large_smooth() {
        let big = q("-1180591620717411303424/59049"); // -2^70 / 3^10
        let f = factor(&big, 10).unwrap();
        assert_eq!(f.factors(), &[(p(2), 70), (p(3), -10)]);
        assert_eq!(f.to_exact(), big);
    }

    #[test]
    fn omega_and_nu() {
        assert_eq!(factor(&q("360"), 100).unwrap().omega(), 3);
        assert_eq!(FactoredRational::one().omega(), 0);
        assert_eq!(factor(&q("3/4"), 100).unwrap().omega(), 2);

        let twelve = factor(&q("12"), 100).unwrap();
        assert_eq!(twelve.nu(p(2)), 2);
        assert_eq!(twelve.nu(p(5)), 0);
        assert_eq!(factor(&q("3/4"), 100).unwrap().nu(p(2)), -2);
    }

    #[test]
    fn qs_membership() {
        let s = [p(2), p(3)];
        assert!(factor(&q("4/3"), 100).unwrap().in_qs(&s));
        assert!(!factor(&q("5"), 100).unwrap().in_qs(&s));
        assert!(FactoredRational::one().in_qs(&[]));
    }

    #[test]
    fn s_free_split() {
        let two = [p(2)];
        let (x1, x2) = factor(&q("12"), 100).unwrap().s_free_part(&two);
        assert_eq!((x1.to_exact(), x2.to_exact()), (q("3"), q("4")));
        let (x1, x2) = factor(&q("27"), 100).unwrap().s_free_part(&two);
        assert_eq!((x1.to_exact(), x2.to_exact()), (q("27"), q("1")));
        let (x1, x2) = factor(&q("-8"), 100).unwrap().s_free_part(&two);
        assert_eq!((x1.to_exact(), x2.to_exact()), (q("-1"), q("8")));
    }

    #[test]
    fn group_operations() {
        let f = FactoredRational::from_factors(Sign::Positive, [(p(2), -2), (p(3), 1)]);
        assert_eq!(f.to_exact(), q("3/4"));
        let two = factor(&q("2"), 10).unwrap();
        let half = factor(&q("1/2"), 10).unwrap();
        assert!(two.mul(&half).is_one());
        assert_eq!(f.inverse().to_exact(), q("4/3"));
        assert_eq!(f.div(&f), FactoredRational::one());
        assert_eq!(factor(&q("-2"), 10).unwrap().pow(3).to_exact(), q("-8"));
        assert_eq!(factor(&q("-2"), 10).unwrap().pow(-2).to_exact(), q("1/4"));
    }

    #[test]
    fn factor_over_given_primes() {
        let f = factor_over(&q("-45/8"), &[p(2), p(3), p(5)]).unwrap();
        assert_eq!(f.to_exact(), q("-45/8"));
        assert!(factor_over(&q("7"), &[p(2)]).is_err());
    }

    #[test]
    fn canonical_json() {
        let f = factor(&q("-25/88"), 100).unwrap(); // -(5^2) / (2^3 * 11)
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"sign":-1,"factors":{"2":-3,"5":2,"11":-1}}"#);
        let back: FactoredRational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<FactoredRational>(r#"{"sign":2,"factors":{}}"#).is_err());
        assert!(serde_json::from_str::<FactoredRational>(r#"{"sign":1,"factors":{"4":1}}"#).is_err());
    }
}
