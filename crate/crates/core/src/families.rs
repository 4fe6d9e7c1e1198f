//! Example families: Balog–Wooley sets, geometric progressions and random
//! sets whose elements have few prime factors.

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::energy::additive_energy;
use crate::error::{Error, Result};
use crate::factored::{factor, FactoredRational, Sign};
use crate::prime::{Prime, PrimePool, DEFAULT_FACTOR_BOUND};
use crate::rational::ExactRational;
use crate::set::FiniteSet;
use crate::setops::product_set;
use crate::verify::{CheckReport, Relation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    BalogWooley {
        m: u64,
        n: u32,
    },
    Geometric {
        q: ExactRational,
        n: u32,
    },
    RandomFewPrime {
        pool: Vec<Prime>,
        k: usize,
        e_max: u32,
        size: usize,
        seed: u64,
        integer_mode: bool,
    },
    Explicit {
        path: PathBuf,
    },
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::BalogWooley { .. } => "balog_wooley",
            FamilySpec::Geometric { .. } => "geometric",
            FamilySpec::RandomFewPrime { .. } => "random_few_prime",
            FamilySpec::Explicit { .. } => "explicit",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            FamilySpec::RandomFewPrime { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    /// Compact parameter string, e.g. `M=8;N=4`.
    pub fn params(&self) -> String {
        match self {
            FamilySpec::BalogWooley { m, n } => format!("M={m};N={n}"),
            FamilySpec::Geometric { q, n } => format!("q={q};n={n}"),
            FamilySpec::RandomFewPrime {
                pool,
                k,
                e_max,
                size,
                integer_mode,
                ..
            } => format!(
                "pool={};k={k};e_max={e_max};size={size};integer={integer_mode}",
                pool.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
            ),
            FamilySpec::Explicit { path } => format!("path={}", path.display()),
        }
    }

    pub fn generate(&self) -> Result<FiniteSet> {
        match self {
            FamilySpec::BalogWooley { m, n } => balog_wooley(*m, *n),
            FamilySpec::Geometric { q, n } => geometric(&factor(q, DEFAULT_FACTOR_BOUND)?, *n),
            FamilySpec::RandomFewPrime {
                pool,
                k,
                e_max,
                size,
                seed,
                integer_mode,
            } => {
                let pool = PrimePool::new(pool.clone(), DEFAULT_FACTOR_BOUND)?;
                random_few_prime(&pool, *k, *e_max, *size, *seed, *integer_mode)
            }
            FamilySpec::Explicit { path } => Ok(crate::io::read_set_file(path)?.set),
        }
    }
}

/// A = {p M^j : 1 <= p <= M, 1 <= j <= N}, deduplicated.
pub fn balog_wooley(m: u64, n: u32) -> Result<FiniteSet> {
    if m < 2 || n < 1 {
        return Err(Error::InvalidParameter(format!("need M >= 2 and N >= 1, got M={m} N={n}")));
    }
    let base = factor(&ExactRational::from_integer(m), DEFAULT_FACTOR_BOUND)?;
    let mut out = Vec::with_capacity((m as usize) * n as usize);
    for p in 1..=m {
        let fp = factor(&ExactRational::from_integer(p), DEFAULT_FACTOR_BOUND)?;
        for j in 1..=n {
            out.push(fp.mul(&base.pow(i64::from(j))));
        }
    }
    Ok(FiniteSet::from_factored(out))
}

/// {q, q^2, ..., q^n}.
pub fn geometric(q: &FactoredRational, n: u32) -> Result<FiniteSet> {
    if q.factors().is_empty() {
        return Err(Error::InvalidParameter("geometric ratio must not be +-1".into()));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("geometric length n must be at least 1".into()));
    }
    Ok(FiniteSet::from_factored((1..=i64::from(n)).map(|i| q.pow(i))))
}

/// Random elements +-prod p^e over at most k pool primes with exponents in
/// [-e_max, e_max] \ {0}, or positive integers with exponents in [1, e_max]
/// in integer mode. The same arguments always give the same set.
pub fn random_few_prime(
    pool: &PrimePool,
    k: usize,
    e_max: u32,
    size: usize,
    seed: u64,
    integer_mode: bool,
) -> Result<FiniteSet> {
    if k == 0 || e_max == 0 {
        return Err(Error::InvalidParameter("k and e_max must be at least 1".into()));
    }
    if pool.len() < k {
        return Err(Error::InvalidParameter(format!(
            "prime pool has {} primes, fewer than k = {k}",
            pool.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: BTreeSet<ExactRational> = BTreeSet::new();
    let mut elements = Vec::with_capacity(size);
    let max_attempts = 1000 + 50 * size;
    let mut attempts = 0;
    let e = i64::from(e_max);
    while elements.len() < size {
        if attempts == max_attempts {
            return Err(Error::ExhaustedSampler {
                attempts,
                found: elements.len(),
                wanted: size,
            });
        }
        attempts += 1;
        let t = rng.gen_range(1..=k);
        let picks = sample(&mut rng, pool.len(), t);
        let mut pairs: Vec<(Prime, i64)> = picks
            .iter()
            .map(|i| {
                let exp = if integer_mode {
                    rng.gen_range(1..=e)
                } else {
                    let v = rng.gen_range(1..=e);
                    if rng.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                };
                (pool.primes()[i], exp)
            })
            .collect();
        pairs.sort_unstable();
        let sign = if !integer_mode && rng.gen_bool(0.5) {
            Sign::Negative
        } else {
            Sign::Positive
        };
        let x = FactoredRational::from_factors(sign, pairs);
        debug_assert!(x.omega() <= k);
        if found.insert(x.to_exact()) {
            elements.push(x);
        }
    }
    Ok(FiniteSet::from_factored(elements))
}

/// Exact facts about a Balog–Wooley set: |A| <= MN (with equality
/// MN - N + 1 for prime M), |AA| <= M^2 (2N-1), E(A) >= sum_j E(P M^j), and
/// the measured E(A) against N M^3 / 8 (report only).
pub fn balog_wooley_checks(m: u64, n: u32, budget: &Budget) -> Result<Vec<CheckReport>> {
    let a = balog_wooley(m, n)?;
    let size = a.len();
    budget.check_enumeration((size as u128) * (size as u128))?;
    let aa = product_set(&a, &a)?.len();
    let mm = Integer::from(m);
    let nn = Integer::from(n);
    let mut checks = vec![
        CheckReport::exact("bw_size", Integer::from(size), Relation::Le, Integer::from(&mm * &nn)),
        CheckReport::exact(
            "bw_product_set",
            Integer::from(aa),
            Relation::Le,
            Integer::from(&mm * &mm) * Integer::from(2 * n - 1),
        ),
    ];
    if crate::prime::is_prime(m) {
        checks.push(CheckReport::exact(
            "bw_size_prime_m",
            Integer::from(size),
            Relation::Eq,
            Integer::from(&mm * &nn) - &nn + 1u32,
        ));
    }
    let energy = additive_energy(&a, &a).value;
    let p = FiniteSet::from_integers(1..=m as i64);
    let class_energy = additive_energy(&p, &p).value * &nn;
    checks.push(CheckReport::exact("bw_energy_classes", energy.clone(), Relation::Ge, class_energy));
    let m3 = Integer::from(&mm * &mm) * &mm;
    checks.push(
        CheckReport::exact(
            "bw_energy_trend",
            energy,
            Relation::Ge,
            rug::Rational::from((m3 * &nn, 8)),
        )
        .report_only(),
    );
    Ok(checks
        .into_iter()
        .map(|c| c.with("M", m).with("N", n).with("size", size).with("products", aa))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balog_wooley_examples() {
        assert_eq!(balog_wooley(2, 2).unwrap(), FiniteSet::from_integers([2, 4, 8]));
        let a = balog_wooley(5, 1).unwrap();
        assert_eq!(a, FiniteSet::from_integers([5, 10, 15, 20, 25]));
        assert_eq!(balog_wooley(7, 3).unwrap().len(), 7 * 3 - 3 + 1);
        assert!(balog_wooley(1, 3).is_err());
    }

    #[test]
    fn balog_wooley_facts() {
        let checks = balog_wooley_checks(8, 4, &Budget::default()).unwrap();
        assert!(checks.iter().all(|c| c.passes()));
        let checks = balog_wooley_checks(7, 3, &Budget::default()).unwrap();
        assert!(checks.iter().any(|c| c.name == "bw_size_prime_m" && c.holds));
    }

    #[test]
    fn geometric_examples() {
        let two = factor(&ExactRational::from(2), 100).unwrap();
        assert_eq!(geometric(&two, 4).unwrap(), FiniteSet::from_integers([2, 4, 8, 16]));
        let three = factor(&ExactRational::from(3), 100).unwrap();
        let g = geometric(&three, 6).unwrap();
        assert_eq!(crate::setops::product_set(&g, &g).unwrap().len(), 11);
        assert!(geometric(&FactoredRational::one(), 3).is_err());
    }

    #[test]
    fn random_is_seed_stable() {
        let pool = PrimePool::first(10);
        let a = random_few_prime(&pool, 2, 3, 40, 7, true).unwrap();
        let b = random_few_prime(&pool, 2, 3, 40, 7, true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 40);
        assert!(a.max_omega().unwrap() <= 2);
        assert!(a.iter().all(|x| x.is_integer() && *x > ExactRational::zero()));
        let c = random_few_prime(&pool, 2, 3, 40, 8, true).unwrap();
        assert_ne!(a, c);
        let r = random_few_prime(&pool, 3, 2, 50, 1, false).unwrap();
        assert!(r.max_omega().unwrap() <= 3);
        assert!(!r.contains_zero());
    }

    #[test]
    fn sampler_exhaustion() {
        let pool = PrimePool::from_values(&[2]).unwrap();
        let a = random_few_prime(&pool, 1, 3, 3, 0, true).unwrap();
        assert_eq!(a, FiniteSet::from_integers([2, 4, 8]));
        assert!(matches!(
            random_few_prime(&pool, 1, 3, 4, 0, true),
            Err(Error::ExhaustedSampler { found: 3, wanted: 4, .. })
        ));
    }

    #[test]
    fn spec_round_trip() {
        let spec = FamilySpec::RandomFewPrime {
            pool: PrimePool::first(3).primes().to_vec(),
            k: 2,
            e_max: 2,
            size: 5,
            seed: 11,
            integer_mode: true,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.starts_with(r#"{"family":"random_few_prime""#));
        let back: FamilySpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.seed(), Some(11));
    }
}
