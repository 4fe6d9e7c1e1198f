//! Covering few-prime sets by dilates of Q_S.
//!
//! A prime set S is chosen either by popularity (every prime dividing at
//! least |A|/2l elements) or by a greedy chain, then A is split by S-free
//! part and the classes with at least L members are kept. All thresholds
//! are exact rationals.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::factored::{factor, FactoredRational};
use crate::prime::{Prime, DEFAULT_FACTOR_BOUND};
use crate::rational::ExactRational;
use crate::set::FiniteSet;
use crate::setops::{iterated_product_bounded, product_set};
use crate::verify::{CheckReport, Relation};

fn require_omega(set: &FiniteSet, bound: usize, name: &str) -> Result<()> {
    for (x, f) in set.factored_pairs()? {
        if f.omega() > bound {
            return Err(Error::HypothesisViolated(format!(
                "omega({x}) = {} exceeds the bound {bound} for {name}",
                f.omega()
            )));
        }
    }
    Ok(())
}

fn require_params(k: usize, l: usize) -> Result<()> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidParameter("k and l must be at least 1".into()));
    }
    Ok(())
}

/// Primes of each element that lie outside `s`.
fn outside(set: &FiniteSet, s: &[Prime]) -> Result<Vec<Vec<Prime>>> {
    Ok(set
        .require_factored()?
        .iter()
        .map(|f| f.support().filter(|p| s.binary_search(p).is_err()).collect())
        .collect())
}

fn disjoint(x: &[Prime], y: &[Prime]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

/// #{(a, b) : P(a) and P(b) share only primes of `s`}.
pub fn good_pairs(a: &FiniteSet, b: &FiniteSet, s: &[Prime], budget: &Budget) -> Result<u128> {
    budget.check_enumeration(a.len() as u128 * b.len() as u128)?;
    let ta = outside(a, s)?;
    let tb = outside(b, s)?;
    Ok(ta
        .par_iter()
        .map(|x| tb.iter().filter(|y| disjoint(x, y)).count() as u128)
        .sum())
}

fn divisor_counts<'a>(
    factors: impl Iterator<Item = &'a FactoredRational>,
    exclude: &[Prime],
) -> BTreeMap<Prime, usize> {
    let mut counts = BTreeMap::new();
    for f in factors {
        for p in f.support() {
            if !exclude.contains(&p) {
                *counts.entry(p).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Output of either prime selection rule.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrimeSelection {
    pub primes: Vec<Prime>,
    /// The subset the primes were selected on: all of A, or the chain's A_0.
    pub subset: Vec<ExactRational>,
    pub good_pairs: u128,
    pub checks: Vec<CheckReport>,
}

/// S = {p : p divides at least |A|/2l elements of A}.
pub fn popular_primes(
    a: &FiniteSet,
    b: &FiniteSet,
    k: usize,
    l: usize,
    budget: &Budget,
) -> Result<PrimeSelection> {
    require_params(k, l)?;
    require_omega(a, k, "A")?;
    require_omega(b, l, "B")?;
    let n = a.len();
    let counts = divisor_counts(a.require_factored()?.iter(), &[]);
    let primes: Vec<Prime> = counts
        .into_iter()
        .filter(|&(_, c)| c * 2 * l >= n)
        .map(|(p, _)| p)
        .collect();
    let good = good_pairs(a, b, &primes, budget)?;
    let checks = vec![
        CheckReport::exact(
            "prime_count",
            Integer::from(primes.len()),
            Relation::Le,
            Integer::from(2 * k * l),
        ),
        CheckReport::exact(
            "good_pairs",
            Integer::from(good),
            Relation::Ge,
            Rational::from((n * b.len(), 2)),
        ),
    ];
    Ok(PrimeSelection {
        primes,
        subset: a.elements().to_vec(),
        good_pairs: good,
        checks,
    })
}

/// Repeatedly adds a prime dividing at least (current size)/2l of the
/// surviving elements and restricts to its multiples. Ties go to the prime
/// with the most multiples, then the smallest.
pub fn greedy_prime_chain(
    a: &FiniteSet,
    b: &FiniteSet,
    k: usize,
    l: usize,
    budget: &Budget,
) -> Result<(PrimeSelection, FiniteSet)> {
    require_params(k, l)?;
    require_omega(a, k, "A")?;
    require_omega(b, l, "B")?;
    let factors = a.require_factored()?;
    let mut current: Vec<usize> = (0..a.len()).collect();
    let mut primes: Vec<Prime> = Vec::new();
    loop {
        let counts = divisor_counts(current.iter().map(|&i| &factors[i]), &primes);
        let best = counts
            .into_iter()
            .filter(|&(_, c)| c * 2 * l >= current.len())
            .max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)));
        let Some((p, _)) = best else { break };
        primes.push(p);
        current.retain(|&i| factors[i].divisible_by(p));
    }
    let kept: Vec<&ExactRational> = current.iter().map(|&i| &a.elements()[i]).collect();
    let a0 = a.filter(|x| kept.binary_search(&x).is_ok());
    primes.sort_unstable();
    let good = good_pairs(&a0, b, &primes, budget)?;
    let scale = Integer::from(2 * l).pow(primes.len() as u32);
    let checks = vec![
        CheckReport::exact("prime_count", Integer::from(primes.len()), Relation::Le, Integer::from(k)),
        CheckReport::exact(
            "chain_subset_size",
            Integer::from(a0.len()) * scale,
            Relation::Ge,
            Integer::from(a.len()),
        ),
        CheckReport::exact(
            "good_pairs",
            Integer::from(good),
            Relation::Ge,
            Rational::from((a0.len() * b.len(), 2)),
        ),
    ];
    Ok((
        PrimeSelection {
            primes,
            subset: a0.elements().to_vec(),
            good_pairs: good,
            checks,
        },
        a0,
    ))
}

/// One class c * Gamma_c of the split by S-free part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverClass {
    pub representative: ExactRational,
    pub parts: Vec<ExactRational>,
    pub kept: bool,
}

/// Groups elements by their S-free part c (sign included); the Q_S parts
/// of each class are sorted.
pub fn split_by_s_free_part(
    a: &FiniteSet,
    s: &[Prime],
) -> Result<BTreeMap<ExactRational, Vec<ExactRational>>> {
    let mut classes: BTreeMap<ExactRational, Vec<ExactRational>> = BTreeMap::new();
    for (_, f) in a.factored_pairs()? {
        let (x1, x2) = f.s_free_part(s);
        classes.entry(x1.to_exact()).or_default().push(x2.to_exact());
    }
    for parts in classes.values_mut() {
        parts.sort_unstable();
    }
    Ok(classes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "1")]
    Popular,
    #[serde(rename = "2")]
    Chain,
}

impl Variant {
    pub fn from_number(v: u8) -> Result<Variant> {
        match v {
            1 => Ok(Variant::Popular),
            2 => Ok(Variant::Chain),
            _ => Err(Error::InvalidParameter(format!("variant must be 1 or 2, got {v}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverParams {
    pub k: usize,
    pub l: usize,
    /// L = |A||B| / (2^(k+l+2) |AB|)
    pub threshold: ExactRational,
    pub variant: Option<Variant>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoveringCertificate {
    pub s: Vec<Prime>,
    pub a_prime: Vec<ExactRational>,
    pub c: Vec<ExactRational>,
    pub classes: Vec<CoverClass>,
    pub params: CoverParams,
    /// Size of the decomposed set (A, or A_0 for the chain variant).
    pub decomposed_size: usize,
    pub input_size: usize,
    pub product_size: usize,
    /// M = |C|.
    pub cover_ratio: usize,
    /// L <= 1, so every class is kept.
    pub degenerate_threshold: bool,
    pub checks: Vec<CheckReport>,
}

impl CoveringCertificate {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.passes())
    }

    pub fn a_prime_set(&self) -> FiniteSet {
        FiniteSet::from_values(self.a_prime.iter().cloned())
    }

    pub fn c_set(&self) -> FiniteSet {
        FiniteSet::from_values(self.c.iter().cloned())
    }
}

/// Keeps the classes with |Gamma_c| >= L and certifies the result.
pub fn covering_decomposition(
    a: &FiniteSet,
    b: &FiniteSet,
    s: &[Prime],
    k: usize,
    l: usize,
    budget: &Budget,
) -> Result<CoveringCertificate> {
    require_params(k, l)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter("covering needs nonempty A and B".into()));
    }
    require_omega(a, k, "A")?;
    require_omega(b, l, "B")?;
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();

    let good = good_pairs(a, b, &s, budget)?;
    let pairs = a.len() * b.len();
    if 2 * good < pairs as u128 {
        return Err(Error::HypothesisViolated(format!(
            "only {good} of {pairs} pairs share no prime outside S; need at least half"
        )));
    }
    budget.check_enumeration(pairs as u128)?;
    let ab = product_set(a, b)?.len();
    let scale = Integer::from(1) << (k + l + 2) as u32;
    let threshold = Rational::from((Integer::from(pairs), Integer::from(&scale * ab)));

    let split = split_by_s_free_part(a, &s)?;
    let mut classes = Vec::with_capacity(split.len());
    let mut a_prime = Vec::new();
    let mut c = Vec::new();
    for (rep, parts) in split {
        let kept = Rational::from(parts.len()) >= threshold;
        if kept {
            c.push(rep.clone());
            a_prime.extend(parts.iter().map(|g| &rep * g));
        }
        classes.push(CoverClass {
            representative: rep,
            parts,
            kept,
        });
    }
    a_prime.sort_unstable();

    let a_prime_set = a.filter(|x| a_prime.binary_search(x).is_ok());
    let c_set = FiniteSet::from_values(c.iter().cloned());
    let witness = m_covered_check(&a_prime_set, &s, &c_set)?;

    let checks = vec![
        CheckReport::exact(
            "good_pairs",
            Integer::from(good),
            Relation::Ge,
            Rational::from((pairs, 2)),
        ),
        CheckReport::exact(
            "class_count_times_threshold",
            Rational::from(&threshold * Integer::from(c.len())),
            Relation::Le,
            Integer::from(a_prime.len()),
        ),
        CheckReport::exact(
            "class_count",
            Integer::from(c.len()),
            Relation::Le,
            Rational::from((Integer::from(&scale * ab), Integer::from(b.len()))),
        ),
        CheckReport::exact(
            "kept_quarter",
            Integer::from(4 * a_prime.len()),
            Relation::Ge,
            Integer::from(a.len()),
        ),
        CheckReport::exact(
            "covered_elements",
            Integer::from(witness.covered_count()),
            Relation::Eq,
            Integer::from(a_prime.len()),
        ),
    ];
    let checks = checks
        .into_iter()
        .map(|r| r.with("k", k).with("l", l).with("L", ExactRational::from(threshold.clone())))
        .collect();

    Ok(CoveringCertificate {
        s,
        cover_ratio: c.len(),
        a_prime,
        c,
        classes,
        params: CoverParams {
            k,
            l,
            threshold: ExactRational::from(threshold.clone()),
            variant: None,
        },
        decomposed_size: a.len(),
        input_size: a.len(),
        product_size: ab,
        degenerate_threshold: threshold <= 1,
        checks,
    })
}

/// Prime selection (by variant) followed by the decomposition.
pub fn cover_pipeline(
    a: &FiniteSet,
    b: &FiniteSet,
    k: usize,
    l: usize,
    variant: Variant,
    budget: &Budget,
) -> Result<CoveringCertificate> {
    let mut cert = match variant {
        Variant::Popular => {
            let sel = popular_primes(a, b, k, l, budget)?;
            let mut cert = covering_decomposition(a, b, &sel.primes, k, l, budget)?;
            cert.checks.splice(0..0, sel.checks);
            cert
        }
        Variant::Chain => {
            let (sel, a0) = greedy_prime_chain(a, b, k, l, budget)?;
            let mut cert = covering_decomposition(&a0, b, &sel.primes, k, l, budget)?;
            cert.checks.splice(0..0, sel.checks);
            let scale = Integer::from(2 * l).pow(k as u32);
            cert.checks.push(
                CheckReport::exact(
                    "kept_fraction_of_input",
                    Integer::from(4 * cert.a_prime.len()) * scale,
                    Relation::Ge,
                    Integer::from(a.len()),
                )
                .with("k", k)
                .with("l", l),
            );
            cert.input_size = a.len();
            cert
        }
    };
    cert.params.variant = Some(variant);
    Ok(cert)
}

/// Which element of C (if any) covers each element of A.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverWitness {
    pub assignment: Vec<(ExactRational, Option<ExactRational>)>,
}

impl CoverWitness {
    pub fn covered(&self) -> bool {
        self.assignment.iter().all(|(_, c)| c.is_some())
    }

    pub fn covered_count(&self) -> usize {
        self.assignment.iter().filter(|(_, c)| c.is_some()).count()
    }

    pub fn uncovered(&self) -> impl Iterator<Item = &ExactRational> {
        self.assignment
            .iter()
            .filter(|(_, c)| c.is_none())
            .map(|(a, _)| a)
    }
}

fn factored_elements(set: &FiniteSet) -> Result<Vec<FactoredRational>> {
    match set.factorizations() {
        Some(f) => Ok(f.to_vec()),
        None => set.iter().map(|x| factor(x, DEFAULT_FACTOR_BOUND)).collect(),
    }
}

/// Checks A against Q_S * C: a is covered by c iff P(a/c) lies in S.
pub fn m_covered_check(a: &FiniteSet, s: &[Prime], c: &FiniteSet) -> Result<CoverWitness> {
    let mut s = s.to_vec();
    s.sort_unstable();
    let free_abs = |f: &FactoredRational| f.s_free_part(&s).0.abs().to_exact();
    let mut reps: BTreeMap<ExactRational, ExactRational> = BTreeMap::new();
    for (x, f) in c.iter().zip(factored_elements(c)?) {
        reps.entry(free_abs(&f)).or_insert_with(|| x.clone());
    }
    let assignment = a
        .iter()
        .zip(factored_elements(a)?)
        .map(|(x, f)| (x.clone(), reps.get(&free_abs(&f)).cloned()))
        .collect();
    Ok(CoverWitness { assignment })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PigeonholeLevel {
    pub i: usize,
    /// |A^(i+1)| / |A^(i)|
    pub ratio: ExactRational,
    /// |A^(j)| for j = 1..=m
    pub sizes: Vec<usize>,
    pub check: CheckReport,
}

/// The level i in [1, m-1] minimizing |A A^(i)| / |A^(i)| (smallest i on ties).
pub fn pigeonhole_level(a: &FiniteSet, m: usize, budget: &Budget) -> Result<(PigeonholeLevel, FiniteSet)> {
    if m < 2 {
        return Err(Error::InvalidParameter("pigeonhole level needs m >= 2".into()));
    }
    a.require_zero_free("pigeonhole level")?;
    if a.is_empty() {
        return Err(Error::InvalidParameter("pigeonhole level of an empty set".into()));
    }
    let mut levels = vec![a.clone()];
    for _ in 1..m {
        let last = levels.last().expect("nonempty");
        budget.check_enumeration(last.len() as u128 * a.len() as u128)?;
        let next = product_set(last, a)?;
        levels.push(next);
    }
    let sizes: Vec<usize> = levels.iter().map(|s| s.len()).collect();
    let (i, ratio) = (1..m)
        .map(|i| (i, Rational::from((sizes[i], sizes[i - 1]))))
        .min_by(|x, y| x.1.cmp(&y.1).then(x.0.cmp(&y.0)))
        .expect("m >= 2");
    let lhs = Rational::from((&ratio).pow((m - 1) as u32));
    let rhs = Rational::from((sizes[m - 1], sizes[0]));
    let check = CheckReport::exact("pigeonhole_ratio", lhs, Relation::Le, rhs)
        .with("m", m)
        .with("i", i);
    let b = iterated_product_bounded(a, i, budget)?;
    Ok((
        PigeonholeLevel {
            i,
            ratio: ExactRational::from(ratio),
            sizes,
            check,
        },
        b,
    ))
}
