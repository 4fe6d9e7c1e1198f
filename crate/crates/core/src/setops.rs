//! Exact sumsets, difference sets, product sets and their iterates.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::kernel::{combine_distinct, lift_common, to_exact_sorted, Key, Lifted};
use crate::rational::ExactRational;
use crate::set::FiniteSet;

fn add_op<K: Key>(x: &K, y: &K) -> K {
    x.add(y)
}

fn sub_op<K: Key>(x: &K, y: &K) -> K {
    x.sub(y)
}

fn mul_op<K: Key>(x: &K, y: &K) -> K {
    x.mul(y)
}

#[derive(Clone, Copy)]
enum Additive {
    Add,
    Sub,
}

fn additive(a: &FiniteSet, b: &FiniteSet, op: Additive) -> FiniteSet {
    if a.is_empty() || b.is_empty() {
        return FiniteSet::empty();
    }
    let (denom, lifted) = lift_common(&[a.elements(), b.elements()], 2);
    let values = match (lifted, op) {
        (Lifted::Small(v), Additive::Add) => {
            to_exact_sorted(combine_distinct(&v[0], &v[1], add_op::<i128>), &denom)
        }
        (Lifted::Small(v), Additive::Sub) => {
            to_exact_sorted(combine_distinct(&v[0], &v[1], sub_op::<i128>), &denom)
        }
        (Lifted::Big(v), Additive::Add) => {
            to_exact_sorted(combine_distinct(&v[0], &v[1], add_op::<rug::Integer>), &denom)
        }
        (Lifted::Big(v), Additive::Sub) => {
            to_exact_sorted(combine_distinct(&v[0], &v[1], sub_op::<rug::Integer>), &denom)
        }
    };
    FiniteSet::from_sorted(values)
}

/// A + B.
pub fn sumset(a: &FiniteSet, b: &FiniteSet) -> FiniteSet {
    additive(a, b, Additive::Add)
}

/// A - B.
pub fn difference_set(a: &FiniteSet, b: &FiniteSet) -> FiniteSet {
    additive(a, b, Additive::Sub)
}

/// -A.
pub fn negate(a: &FiniteSet) -> FiniteSet {
    FiniteSet::from_values(a.iter().map(|x| -x))
}

/// c * A for a nonzero c.
pub fn dilate(c: &ExactRational, a: &FiniteSet) -> Result<FiniteSet> {
    if c.is_zero() {
        return Err(Error::ZeroElement("dilation factor"));
    }
    Ok(FiniteSet::from_values(a.iter().map(|x| x * c)))
}

fn bits(set: &FiniteSet) -> u32 {
    set.iter()
        .map(|x| x.numer().significant_bits())
        .max()
        .unwrap_or(0)
}

/// AB. Both sets must be zero-free.
pub fn product_set(a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet> {
    a.require_zero_free("product set")?;
    b.require_zero_free("product set")?;
    if a.is_empty() || b.is_empty() {
        return Ok(FiniteSet::empty());
    }
    let integral = a.iter().chain(b.iter()).all(|x| x.is_integer());
    let one = rug::Integer::from(1);
    let values = if integral && bits(a) + bits(b) <= 126 {
        let xs: Vec<i128> = a.iter().map(|x| x.numer().to_i128().expect("bits checked")).collect();
        let ys: Vec<i128> = b.iter().map(|x| x.numer().to_i128().expect("bits checked")).collect();
        to_exact_sorted(combine_distinct(&xs, &ys, mul_op::<i128>), &one)
    } else if integral {
        let xs: Vec<rug::Integer> = a.iter().map(|x| x.numer().clone()).collect();
        let ys: Vec<rug::Integer> = b.iter().map(|x| x.numer().clone()).collect();
        to_exact_sorted(combine_distinct(&xs, &ys, mul_op::<rug::Integer>), &one)
    } else {
        combine_distinct(a.elements(), b.elements(), mul_op::<ExactRational>)
    };
    Ok(FiniteSet::from_sorted(values))
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        Err(Error::InvalidParameter("iteration count m must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// A pairwise step visits `pairs` pairs and may keep as many distinct values.
fn check_pairs(budget: &Budget, pairs: u128) -> Result<()> {
    budget.check_enumeration(pairs)?;
    budget.check_support(pairs)
}

/// mA, built by repeated pairwise sums with deduplication after every step.
pub fn iterated_sumset(a: &FiniteSet, m: usize) -> Result<FiniteSet> {
    iterated_sumset_bounded(a, m, &Budget {
        max_enumeration: u128::MAX,
        ..Budget::default()
    })
}

/// Like [`iterated_sumset`] but refuses any step whose pair count exceeds the budget.
pub fn iterated_sumset_bounded(a: &FiniteSet, m: usize, budget: &Budget) -> Result<FiniteSet> {
    check_m(m)?;
    let mut acc = a.clone();
    for _ in 1..m {
        check_pairs(budget, acc.len() as u128 * a.len() as u128)?;
        acc = sumset(&acc, a);
    }
    Ok(acc)
}

/// A^(m). The set must be zero-free.
pub fn iterated_product(a: &FiniteSet, m: usize) -> Result<FiniteSet> {
    iterated_product_bounded(a, m, &Budget {
        max_enumeration: u128::MAX,
        ..Budget::default()
    })
}

pub fn iterated_product_bounded(a: &FiniteSet, m: usize, budget: &Budget) -> Result<FiniteSet> {
    check_m(m)?;
    a.require_zero_free("iterated product")?;
    let mut acc = a.clone();
    for _ in 1..m {
        check_pairs(budget, acc.len() as u128 * a.len() as u128)?;
        acc = product_set(&acc, a)?;
    }
    Ok(acc)
}

/// A + AA. The set must be zero-free.
pub fn a_plus_aa(a: &FiniteSet) -> Result<FiniteSet> {
    let aa = product_set(a, a)?;
    Ok(sumset(a, &aa))
}

pub fn a_plus_aa_bounded(a: &FiniteSet, budget: &Budget) -> Result<FiniteSet> {
    a.require_zero_free("A + AA")?;
    check_pairs(budget, a.len() as u128 * a.len() as u128)?;
    let aa = product_set(a, a)?;
    check_pairs(budget, a.len() as u128 * aa.len() as u128)?;
    Ok(sumset(a, &aa))
}
