use std::io::Write;

use rug::Integer;

use crate::error::Result;
use crate::rational::ExactRational;

/// Exact multiplicity function, sorted by value, zero multiplicities never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Counter {
    entries: Vec<(ExactRational, Integer)>,
}

impl Counter {
    pub(crate) fn from_sorted(entries: Vec<(ExactRational, Integer)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|(_, c)| *c > 0));
        Counter { entries }
    }

    pub fn get(&self, x: &ExactRational) -> Integer {
        self.entries
            .binary_search_by(|(k, _)| k.cmp(x))
            .map(|i| self.entries[i].1.clone())
            .unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ExactRational, &Integer)> {
        self.entries.iter().map(|(k, v)| (k, v))
    }

    pub fn support(&self) -> impl Iterator<Item = &ExactRational> {
        self.entries.iter().map(|(k, _)| k)
    }

    pub fn total_mass(&self) -> Integer {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    pub fn sum_of_squares(&self) -> Integer {
        self.entries.iter().map(|(_, c)| Integer::from(c * c)).sum()
    }

    pub fn max(&self) -> Integer {
        self.entries.iter().map(|(_, c)| c.clone()).max().unwrap_or_default()
    }

    /// CSV with header `value,multiplicity`, rows in ascending value order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["value", "multiplicity"])?;
        for (k, c) in &self.entries {
            w.write_record([k.to_string(), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use crate::energy::convolve;
    use crate::set::FiniteSet;

    #[test]
    fn csv_layout() {
        let a = FiniteSet::from_integers([0, 1]);
        let mut buf = Vec::new();
        convolve(&a, &a).write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "value,multiplicity\n0,1\n1,2\n2,1\n");
    }
}
