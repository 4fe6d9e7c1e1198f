//! Shared counting kernel.
//!
//! Sets of rationals are lifted to a common denominator so that additive
//! work runs on integers: `i128` when the bit budget allows it, GMP
//! integers otherwise. All outputs are sorted, so results never depend on
//! how the work was sharded.

use std::hash::Hash;

use rayon::prelude::*;
use rug::{Integer, Rational};

use crate::rational::ExactRational;

const CHUNK: usize = 64;

pub(crate) trait Key: Clone + Ord + Hash + Send + Sync {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Value of the lifted key over the common denominator.
    fn to_exact(&self, denom: &Integer) -> ExactRational;
}

impl Key for i128 {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn to_exact(&self, denom: &Integer) -> ExactRational {
        ExactRational::from_parts(Integer::from(*self), denom.clone())
    }
}

impl Key for Integer {
    fn add(&self, other: &Self) -> Self {
        Integer::from(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Integer::from(self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Integer::from(self * other)
    }
    fn neg(&self) -> Self {
        Integer::from(-self)
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
    fn to_exact(&self, denom: &Integer) -> ExactRational {
        ExactRational::from_parts(self.clone(), denom.clone())
    }
}

impl Key for ExactRational {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        ExactRational::is_zero(self)
    }
    fn to_exact(&self, denom: &Integer) -> ExactRational {
        if *denom == 1 {
            self.clone()
        } else {
            ExactRational::from(Rational::from((self.numer().clone(), Integer::from(self.denom() * denom))))
        }
    }
}

/// Multiplicity type for counters.
pub(crate) trait Mult: Clone + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add_assign(&mut self, other: &Self);
    fn to_integer(&self) -> Integer;
    /// `self += a * b`
    fn add_product(&mut self, a: &Self, b: &Self);
}

impl Mult for u128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn add_assign(&mut self, other: &Self) {
        *self += *other;
    }
    fn to_integer(&self) -> Integer {
        Integer::from(*self)
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

impl Mult for Integer {
    fn zero() -> Self {
        Integer::new()
    }
    fn one() -> Self {
        Integer::from(1)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn to_integer(&self) -> Integer {
        self.clone()
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

/// Integer values over a shared denominator, in one of two widths.
#[derive(Clone, Debug)]
pub(crate) enum Lifted {
    Small(Vec<Vec<i128>>),
    Big(Vec<Vec<Integer>>),
}

/// Lifts several sets to a common denominator. `headroom_bits` is the growth
/// the caller's arithmetic needs on top of the largest lifted magnitude.
pub(crate) fn lift_common(sets: &[&[ExactRational]], headroom_bits: u32) -> (Integer, Lifted) {
    let mut denom = Integer::from(1);
    for set in sets {
        for x in set.iter() {
            if *x.denom() != 1 {
                denom.lcm_mut(x.denom());
            }
        }
    }
    let big: Vec<Vec<Integer>> = sets
        .iter()
        .map(|set| {
            set.iter()
                .map(|x| {
                    if *x.denom() == denom {
                        x.numer().clone()
                    } else {
                        Integer::from(x.numer() * Integer::from(&denom / x.denom()))
                    }
                })
                .collect()
        })
        .collect();
    let max_bits = big
        .iter()
        .flatten()
        .map(|v| v.significant_bits())
        .max()
        .unwrap_or(0);
    if max_bits + headroom_bits <= 126 {
        let small = big
            .iter()
            .map(|v| v.iter().map(|x| x.to_i128().expect("bit bound checked")).collect())
            .collect();
        (denom, Lifted::Small(small))
    } else {
        (denom, Lifted::Big(big))
    }
}

/// A computation that runs on lifted integers of either width.
pub(crate) trait LiftedTask {
    type Output;
    fn run<K: Key>(self, sets: &[Vec<K>], denom: &Integer) -> Self::Output;
}

pub(crate) fn dispatch<T: LiftedTask>(sets: &[&[ExactRational]], headroom_bits: u32, task: T) -> T::Output {
    let (denom, lifted) = lift_common(sets, headroom_bits);
    match lifted {
        Lifted::Small(v) => task.run(&v, &denom),
        Lifted::Big(v) => task.run(&v, &denom),
    }
}

/// Bits needed to add `terms` values together without overflow.
pub(crate) fn sum_headroom(terms: usize) -> u32 {
    usize::BITS - terms.max(1).leading_zeros() + 1
}

pub(crate) fn to_exact_sorted<K: Key>(keys: Vec<K>, denom: &Integer) -> Vec<ExactRational> {
    let mut out: Vec<ExactRational> = keys.par_iter().map(|k| k.to_exact(denom)).collect();
    // a positive common denominator preserves order, but keys of mixed
    // representation (rational keys) are re-sorted to be safe
    out.par_sort_unstable();
    out
}

/// `{op(x, y)}` over all pairs, sorted and deduplicated.
pub(crate) fn combine_distinct<K: Key>(xs: &[K], ys: &[K], op: fn(&K, &K) -> K) -> Vec<K> {
    let mut out: Vec<K> = xs
        .par_chunks(CHUNK)
        .flat_map_iter(|chunk| {
            let mut local: Vec<K> = Vec::with_capacity(chunk.len() * ys.len());
            for x in chunk {
                for y in ys {
                    local.push(op(x, y));
                }
            }
            local.sort_unstable();
            local.dedup();
            local
        })
        .collect();
    out.par_sort_unstable();
    out.dedup();
    out
}

/// Sorted counter of `op(x, y)` over all pairs.
pub(crate) fn combine_counts<K: Key, M: Mult>(
    xs: &[(K, M)],
    ys: &[K],
    op: fn(&K, &K) -> K,
) -> Vec<(K, M)> {
    let partial: Vec<(K, M)> = xs
        .par_chunks(CHUNK)
        .flat_map_iter(|chunk| {
            let mut local: Vec<(K, M)> = Vec::with_capacity(chunk.len() * ys.len());
            for (x, c) in chunk {
                for y in ys {
                    local.push((op(x, y), c.clone()));
                }
            }
            merge_sorted_counts(local)
        })
        .collect();
    merge_sorted_counts(partial)
}

pub(crate) fn merge_sorted_counts<K: Key, M: Mult>(mut entries: Vec<(K, M)>) -> Vec<(K, M)> {
    entries.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(K, M)> = Vec::with_capacity(entries.len());
    for (k, c) in entries {
        match out.last_mut() {
            Some((last, acc)) if *last == k => acc.add_assign(&c),
            _ => out.push((k, c)),
        }
    }
    out
}

pub(crate) fn unit_counts<K: Key, M: Mult>(xs: &[K]) -> Vec<(K, M)> {
    xs.iter().map(|x| (x.clone(), M::one())).collect()
}

/// Looks up the multiplicity of `key` in a sorted counter.
pub(crate) fn lookup<'a, K: Key, M: Mult>(counts: &'a [(K, M)], key: &K) -> Option<&'a M> {
    counts
        .binary_search_by(|(k, _)| k.cmp(key))
        .ok()
        .map(|i| &counts[i].1)
}
