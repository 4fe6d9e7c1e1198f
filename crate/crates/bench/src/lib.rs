//! Fixed inputs shared by the benchmarks.

use sumprod_core::families::{geometric, random_few_prime};
use sumprod_core::{factor, ExactRational, FiniteSet, PrimePool};

/// {1, ..., n}
pub fn interval(n: i64) -> FiniteSet {
    FiniteSet::from_integers(1..=n)
}

/// {2, 4, ..., 2^n}
pub fn powers_of_two(n: u32) -> FiniteSet {
    geometric(&factor(&ExactRational::from(2), 10).expect("2 factors"), n).expect("valid ratio")
}

/// Integers with at most two prime factors from the first ten primes.
pub fn few_prime(n: usize, seed: u64) -> FiniteSet {
    random_few_prime(&PrimePool::first(10), 2, 5, n, seed, true).expect("pool is large enough")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_requested_size() {
        assert_eq!(interval(7).len(), 7);
        assert_eq!(powers_of_two(9).len(), 9);
        assert_eq!(few_prime(40, 1).len(), 40);
    }
}
