//! Representation functions and additive energies.
//!
//! Everything is counted exactly. Higher energies come from the m-fold
//! convolution counter, so memory scales with |mA| rather than time with
//! |A|^(2m).

mod counter;
mod cycles;

use rug::ops::Pow;
use rug::Integer;
use serde::{Deserialize, Serialize};

pub use counter::Counter;
pub use cycles::cycle_homomorphism_count;

use crate::budget::{saturating_pow, Budget};
use crate::error::{Error, Result};
use crate::kernel::{
    combine_counts, dispatch, lookup, merge_sorted_counts, sum_headroom, unit_counts, Key, LiftedTask, Mult,
};
use crate::rational::ExactRational;
use crate::set::FiniteSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyMethod {
    Convolution,
    BruteForce,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub m: usize,
    #[serde(with = "crate::serde_integer")]
    pub value: Integer,
    pub method: EnergyMethod,
}

impl EnergyReport {
    /// `|A|^m <= value <= |A|^(2m-1)`, the trivial bounds for E_2m of a set of size `n`.
    pub fn within_trivial_bounds(&self, n: usize) -> bool {
        let n = Integer::from(n);
        let lo = n.clone().pow(self.m as u32);
        let hi = n.pow((2 * self.m).saturating_sub(1) as u32);
        self.value >= lo && self.value <= hi
    }
}

/// Sign of a summand in a signed linear form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

fn add_op<K: Key>(x: &K, y: &K) -> K {
    x.add(y)
}

fn sub_op<K: Key>(x: &K, y: &K) -> K {
    x.sub(y)
}

fn to_counter<K: Key, M: Mult>(counts: Vec<(K, M)>, denom: &Integer) -> Counter {
    Counter::from_sorted(
        counts
            .into_iter()
            .map(|(k, c)| (k.to_exact(denom), c.to_integer()))
            .collect(),
    )
}

struct Pairwise {
    subtract: bool,
}

impl LiftedTask for Pairwise {
    type Output = Counter;
    fn run<K: Key>(self, sets: &[Vec<K>], denom: &Integer) -> Counter {
        let op = if self.subtract { sub_op::<K> } else { add_op::<K> };
        let counts = combine_counts::<K, u128>(&unit_counts(&sets[0]), &sets[1], op);
        to_counter(counts, denom)
    }
}

/// x -> #{(a, b) : a + b = x}.
pub fn convolve(a: &FiniteSet, b: &FiniteSet) -> Counter {
    if a.is_empty() || b.is_empty() {
        return Counter::default();
    }
    dispatch(&[a.elements(), b.elements()], 2, Pairwise { subtract: false })
}

/// x -> #{(a, b) : a - b = x}.
pub fn co_convolve(a: &FiniteSet, b: &FiniteSet) -> Counter {
    if a.is_empty() || b.is_empty() {
        return Counter::default();
    }
    dispatch(&[a.elements(), b.elements()], 2, Pairwise { subtract: true })
}

/// E(A, B) = #{a1 - a2 = b1 - b2}.
pub fn additive_energy(a: &FiniteSet, b: &FiniteSet) -> EnergyReport {
    EnergyReport {
        m: 2,
        value: co_convolve(a, b).sum_of_squares(),
        method: EnergyMethod::Convolution,
    }
}

fn m_fold<K: Key, M: Mult>(xs: &[K], m: usize, budget: &Budget) -> Result<Vec<(K, M)>> {
    let mut acc = unit_counts::<K, M>(xs);
    for _ in 1..m {
        budget.check_support(acc.len() as u128 * xs.len() as u128)?;
        acc = combine_counts(&acc, xs, add_op::<K>);
    }
    Ok(acc)
}

struct MFold<'a> {
    m: usize,
    budget: &'a Budget,
}

impl LiftedTask for MFold<'_> {
    type Output = Result<Counter>;
    fn run<K: Key>(self, sets: &[Vec<K>], denom: &Integer) -> Result<Counter> {
        let xs = &sets[0];
        // multiplicities are at most |A|^m
        if saturating_pow(xs.len() as u128, self.m as u32) < u128::MAX {
            Ok(to_counter(m_fold::<K, u128>(xs, self.m, self.budget)?, denom))
        } else {
            Ok(to_counter(m_fold::<K, Integer>(xs, self.m, self.budget)?, denom))
        }
    }
}

/// The m-fold convolution 1_A * ... * 1_A.
pub fn m_fold_convolution(a: &FiniteSet, m: usize, budget: &Budget) -> Result<Counter> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    if a.is_empty() {
        return Ok(Counter::default());
    }
    dispatch(&[a.elements()], sum_headroom(m), MFold { m, budget })
}

/// E_2m(A) = sum_x 1_A^(m)(x)^2.
pub fn higher_energy(a: &FiniteSet, m: usize, budget: &Budget) -> Result<EnergyReport> {
    let counter = m_fold_convolution(a, m, budget)?;
    Ok(EnergyReport {
        m,
        value: counter.sum_of_squares(),
        method: EnergyMethod::Convolution,
    })
}

struct Nondegenerate {
    m: usize,
}

impl LiftedTask for Nondegenerate {
    type Output = Integer;
    fn run<K: Key>(self, sets: &[Vec<K>], _denom: &Integer) -> Integer {
        use rayon::prelude::*;
        let xs = &sets[0];
        let m = self.m;
        let width = 2 * m;
        let n = xs.len();
        let full_mask: usize = (1 << width) - 1;
        // the first coordinate shards the work; the last is solved for
        let per_first: Vec<u128> = (0..n)
            .into_par_iter()
            .map(|first| {
                let mut count: u128 = 0;
                let free = width - 2;
                let mut idx = vec![0usize; free];
                let mut terms: Vec<K> = Vec::with_capacity(width);
                let mut subset_sums: Vec<Option<K>> = vec![None; 1 << width];
                loop {
                    terms.clear();
                    terms.push(xs[first].clone());
                    for (pos, &i) in idx.iter().enumerate() {
                        let v = &xs[i];
                        // positions 1..m are added, m.. subtracted
                        terms.push(if pos + 1 < m { v.clone() } else { v.neg() });
                    }
                    // a_1 + .. + a_m - a_(m+1) - .. - a_(2m) = 0 fixes a_(2m)
                    let mut last = terms[0].clone();
                    for t in &terms[1..] {
                        last = last.add(t);
                    }
                    if xs.binary_search(&last).is_ok() {
                        terms.push(last.neg());
                        if nondegenerate_terms(&terms, full_mask, &mut subset_sums) {
                            count += 1;
                        }
                    }
                    // odometer
                    let mut pos = 0;
                    loop {
                        if pos == free {
                            return count;
                        }
                        idx[pos] += 1;
                        if idx[pos] < n {
                            break;
                        }
                        idx[pos] = 0;
                        pos += 1;
                    }
                }
            })
            .collect();
        Integer::from(per_first.iter().sum::<u128>())
    }
}

// No nonempty proper subset of the signed terms sums to zero.
fn nondegenerate_terms<K: Key>(terms: &[K], full_mask: usize, sums: &mut [Option<K>]) -> bool {
    sums[0] = None;
    for mask in 1..full_mask {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let value = match &sums[rest] {
            Some(s) => s.add(&terms[low]),
            None => terms[low].clone(),
        };
        if value.is_zero() {
            return false;
        }
        sums[mask] = Some(value);
    }
    true
}

/// E*_2m(A): solutions of a_1 + .. + a_m = a_(m+1) + .. + a_2m in which no
/// nonempty proper subset of the signed summands sums to zero. Brute force
/// over |A|^(2m-1) tuples.
pub fn nondegenerate_energy(a: &FiniteSet, m: usize, budget: &Budget) -> Result<EnergyReport> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    a.require_zero_free("nondegenerate energy")?;
    if m > 8 {
        return Err(Error::InvalidParameter("nondegenerate energy supports m <= 8".into()));
    }
    budget.check_brute_force(saturating_pow(a.len() as u128, (2 * m - 1) as u32))?;
    let value = if a.is_empty() {
        Integer::new()
    } else {
        dispatch(&[a.elements()], sum_headroom(2 * m), Nondegenerate { m })
    };
    Ok(EnergyReport {
        m,
        value,
        method: EnergyMethod::BruteForce,
    })
}

fn signed_counts<K: Key, M: Mult>(xs: &[K], signs: &[Sign]) -> Vec<(K, M)> {
    let negated: Vec<K> = xs.iter().map(|x| x.neg()).collect();
    let mut acc: Vec<(K, M)> = Vec::new();
    for (i, s) in signs.iter().enumerate() {
        let ys = match s {
            Sign::Plus => xs,
            Sign::Minus => &negated[..],
        };
        acc = if i == 0 {
            merge_sorted_counts(unit_counts(ys))
        } else {
            combine_counts(&acc, ys, add_op::<K>)
        };
    }
    acc
}

struct SignedCount<'a> {
    signs: &'a [Sign],
}

impl SignedCount<'_> {
    fn meet<K: Key, M: Mult>(&self, xs: &[K], target: &K) -> Integer {
        let (left, right) = self.signs.split_at(self.signs.len() / 2);
        let right_counts = signed_counts::<K, M>(xs, right);
        if left.is_empty() {
            return lookup(&right_counts, target).map(|c| c.to_integer()).unwrap_or_default();
        }
        let left_counts = signed_counts::<K, M>(xs, left);
        let mut total = Integer::new();
        for (y, c) in &left_counts {
            if let Some(d) = lookup(&right_counts, &target.sub(y)) {
                total += c.to_integer() * d.to_integer();
            }
        }
        total
    }
}

impl LiftedTask for SignedCount<'_> {
    type Output = Integer;
    fn run<K: Key>(self, sets: &[Vec<K>], _denom: &Integer) -> Integer {
        let xs = &sets[0];
        let target = &sets[1][0];
        let half = self.signs.len() - self.signs.len() / 2;
        if saturating_pow(xs.len() as u128, half as u32) < u128::MAX {
            self.meet::<K, u128>(xs, target)
        } else {
            self.meet::<K, Integer>(xs, target)
        }
    }
}

/// #{(a_1..a_n) in A^n : sum eps_i a_i = x}, by meet in the middle over the
/// two halves of the sign pattern.
pub fn signed_representation_count(a: &FiniteSet, x: &ExactRational, signs: &[Sign]) -> Result<Integer> {
    if signs.is_empty() {
        return Err(Error::InvalidParameter("sign pattern must be nonempty".into()));
    }
    if a.is_empty() {
        return Ok(Integer::new());
    }
    let target = [x.clone()];
    Ok(dispatch(
        &[a.elements(), &target],
        sum_headroom(signs.len() + 1),
        SignedCount { signs },
    ))
}

/// sum_{x != 0} (1_A o 1_A)(x)^k.
pub fn moment_sum(a: &FiniteSet, k: u32) -> Integer {
    co_convolve(a, a)
        .iter()
        .filter(|(x, _)| !x.is_zero())
        .map(|(_, c)| c.clone().pow(k))
        .sum()
}

/// max_{x != 0} (1_A o 1_A)(x), zero when |A| <= 1.
pub fn max_nonzero_coconv(a: &FiniteSet) -> Integer {
    co_convolve(a, a)
        .iter()
        .filter(|(x, _)| !x.is_zero())
        .map(|(_, c)| c.clone())
        .max()
        .unwrap_or_default()
}
