use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default trial-division bound for ingestion.
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(value: u64) -> Result<Self> {
        if is_prime(value) {
            Ok(Prime(value))
        } else {
            Err(Error::NotPrime(value))
        }
    }

    /// Skips the primality test; callers must already know `value` is prime.
    pub(crate) fn new_unchecked(value: u64) -> Self {
        debug_assert!(is_prime(value));
        Prime(value)
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Prime {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.0)
    }
}

impl<'de> Deserialize<'de> for Prime {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = u64::deserialize(deserializer)?;
        Prime::new(v).map_err(serde::de::Error::custom)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve primes as bases are exact for all of `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Sieve of Eratosthenes over odd numbers.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n / 2 + 1];
    let mut out = vec![2];
    let mut i = 3usize;
    while i <= n {
        if !composite[i / 2] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j / 2] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

static DEFAULT_SIEVE: OnceLock<Vec<u64>> = OnceLock::new();

/// Primes up to `bound`, served from a shared sieve when `bound` is within the default.
pub(crate) fn sieve(bound: u64) -> std::borrow::Cow<'static, [u64]> {
    if bound <= DEFAULT_FACTOR_BOUND {
        let all = DEFAULT_SIEVE.get_or_init(|| primes_up_to(DEFAULT_FACTOR_BOUND));
        let end = all.partition_point(|&p| p <= bound);
        std::borrow::Cow::Borrowed(&all[..end])
    } else {
        std::borrow::Cow::Owned(primes_up_to(bound))
    }
}

/// An ascending list of distinct primes plus the trial-division bound used with it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePool {
    primes: Vec<Prime>,
    bound: u64,
}

impl PrimePool {
    pub fn new(mut primes: Vec<Prime>, bound: u64) -> Result<Self> {
        if bound == 0 {
            return Err(Error::InvalidParameter("factorization bound must be positive".into()));
        }
        primes.sort_unstable();
        let before = primes.len();
        primes.dedup();
        if primes.len() != before {
            return Err(Error::InvalidParameter("prime pool has duplicates".into()));
        }
        Ok(PrimePool { primes, bound })
    }

    /// The first `count` primes.
    pub fn first(count: usize) -> Self {
        let mut primes = Vec::with_capacity(count);
        let mut n = 2u64;
        while primes.len() < count {
            if is_prime(n) {
                primes.push(Prime(n));
            }
            n += 1;
        }
        PrimePool {
            primes,
            bound: DEFAULT_FACTOR_BOUND,
        }
    }

    pub fn from_values(values: &[u64]) -> Result<Self> {
        let primes = values.iter().map(|&v| Prime::new(v)).collect::<Result<Vec<_>>>()?;
        PrimePool::new(primes, DEFAULT_FACTOR_BOUND)
    }

    pub fn primes(&self) -> &[Prime] {
        &self.primes
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}
