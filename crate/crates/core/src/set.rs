use std::sync::Arc;

use crate::error::{Error, Result};
use crate::factored::{factor, factor_over, FactoredRational};
use crate::prime::Prime;
use crate::rational::ExactRational;

/// A finite set of rationals kept sorted by value.
///
/// Factorizations are either attached to every element or absent; sets
/// containing zero can never carry them.
#[derive(Clone, Debug, Default)]
pub struct FiniteSet {
    elements: Vec<ExactRational>,
    factors: Option<Arc<[FactoredRational]>>,
}

impl PartialEq for FiniteSet {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for FiniteSet {}

impl FiniteSet {
    pub fn empty() -> Self {
        FiniteSet::default()
    }

    pub fn from_values(values: impl IntoIterator<Item = ExactRational>) -> Self {
        let mut elements: Vec<ExactRational> = values.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        FiniteSet {
            elements,
            factors: None,
        }
    }

    pub fn from_integers(values: impl IntoIterator<Item = i64>) -> Self {
        FiniteSet::from_values(values.into_iter().map(ExactRational::from))
    }

    /// Sorted, deduplicated input is trusted as-is.
    pub(crate) fn from_sorted(elements: Vec<ExactRational>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        FiniteSet {
            elements,
            factors: None,
        }
    }

    pub fn from_factored(values: impl IntoIterator<Item = FactoredRational>) -> Self {
        let mut pairs: Vec<(ExactRational, FactoredRational)> =
            values.into_iter().map(|f| (f.to_exact(), f)).collect();
        pairs.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        pairs.dedup_by(|a, b| a.0 == b.0);
        let (elements, factors): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        FiniteSet {
            elements,
            factors: Some(factors.into()),
        }
    }

    /// Attaches factorizations by trial division up to `bound`.
    pub fn with_factorizations(mut self, bound: u64) -> Result<Self> {
        if self.factors.is_none() {
            let factors = self
                .elements
                .iter()
                .map(|x| factor(x, bound))
                .collect::<Result<Vec<_>>>()?;
            self.factors = Some(factors.into());
        }
        Ok(self)
    }

    /// Attaches factorizations using only `primes`, e.g. the support of a
    /// set this one was multiplied out of.
    pub fn with_factorizations_over(mut self, primes: &[Prime]) -> Result<Self> {
        if self.factors.is_none() {
            let factors = self
                .elements
                .iter()
                .map(|x| factor_over(x, primes))
                .collect::<Result<Vec<_>>>()?;
            self.factors = Some(factors.into());
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ExactRational] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ExactRational> {
        self.elements.iter()
    }

    pub fn contains(&self, x: &ExactRational) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&ExactRational::zero())
    }

    pub fn require_zero_free(&self, context: &'static str) -> Result<()> {
        if self.contains_zero() {
            Err(Error::ZeroElement(context))
        } else {
            Ok(())
        }
    }

    pub fn factorizations(&self) -> Option<&[FactoredRational]> {
        self.factors.as_deref()
    }

    pub fn require_factored(&self) -> Result<&[FactoredRational]> {
        self.factorizations().ok_or_else(|| {
            Error::InvalidParameter("set elements must carry factorizations".into())
        })
    }

    pub fn factored_pairs(&self) -> Result<impl Iterator<Item = (&ExactRational, &FactoredRational)>> {
        let f = self.require_factored()?;
        Ok(self.elements.iter().zip(f.iter()))
    }

    /// Union of the prime supports, ascending.
    pub fn prime_support(&self) -> Result<Vec<Prime>> {
        let mut primes: Vec<Prime> = self
            .require_factored()?
            .iter()
            .flat_map(|f| f.support())
            .collect();
        primes.sort_unstable();
        primes.dedup();
        Ok(primes)
    }

    pub fn max_omega(&self) -> Result<usize> {
        Ok(self
            .require_factored()?
            .iter()
            .map(|f| f.omega())
            .max()
            .unwrap_or(0))
    }

    /// Keeps the elements for which `keep` holds; factorizations follow along.
    pub fn filter(&self, mut keep: impl FnMut(&ExactRational) -> bool) -> FiniteSet {
        match &self.factors {
            Some(f) => {
                let (elements, factors): (Vec<_>, Vec<_>) = self
                    .elements
                    .iter()
                    .zip(f.iter())
                    .filter(|(x, _)| keep(x))
                    .map(|(x, f)| (x.clone(), f.clone()))
                    .unzip();
                FiniteSet {
                    elements,
                    factors: Some(factors.into()),
                }
            }
            None => FiniteSet::from_sorted(self.elements.iter().filter(|x| keep(x)).cloned().collect()),
        }
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.elements.iter().all(|x| other.contains(x))
    }

    pub fn max_abs(&self) -> Option<ExactRational> {
        self.elements.iter().map(|x| x.abs()).max()
    }
}

impl<'a> IntoIterator for &'a FiniteSet {
    type Item = &'a ExactRational;
    type IntoIter = std::slice::Iter<'a, ExactRational>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

impl FromIterator<ExactRational> for FiniteSet {
    fn from_iter<T: IntoIterator<Item = ExactRational>>(iter: T) -> Self {
        FiniteSet::from_values(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedup_and_order() {
        let s = FiniteSet::from_integers([3, 1, 2, 3, -1]);
        assert_eq!(s.len(), 4);
        assert_eq!(s.elements()[0], ExactRational::from(-1));
        assert!(s.contains(&ExactRational::from(2)));
        assert!(!s.contains_zero());
    }

    #[test]
    fn factorizations_follow_filter() {
        let s = FiniteSet::from_integers([2, 4, 8, 27]).with_factorizations(100).unwrap();
        let odd = s.filter(|x| !x.numer().is_even());
        assert_eq!(odd.len(), 1);
        assert_eq!(odd.factorizations().unwrap()[0].omega(), 1);
        assert_eq!(s.prime_support().unwrap().len(), 2);
        assert_eq!(s.max_omega().unwrap(), 1);
    }

    #[test]
    fn zero_cannot_be_factored() {
        let s = FiniteSet::from_integers([0, 1]);
        assert!(s.contains_zero());
        assert!(s.with_factorizations(10).is_err());
    }
}
