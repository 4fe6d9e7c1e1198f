//! Linear equations over finitely generated subgroups of Q^x.
//!
//! A group is given by independent generators (and optionally -1) and is
//! looked at through a box |e_i| <= H on the exponents. Membership of a
//! rational is decided by factoring it over the generators' primes and
//! solving for the exponent vector, so the group is only enumerated where
//! a full list is needed.

use std::io::Write;

use rayon::prelude::*;
use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::factored::{factor_over, FactoredRational, Sign};
use crate::prime::Prime;
use crate::rational::ExactRational;
use crate::set::FiniteSet;

/// Generators of the free part plus a torsion flag (adjoin -1).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawGroupSpec", into = "RawGroupSpec")]
pub struct GroupSpec {
    generators: Vec<FactoredRational>,
    include_torsion: bool,
    primes: Vec<Prime>,
    pivots: Vec<usize>,
    // inverse of the generator exponent matrix restricted to the pivot columns
    inverse: Vec<Vec<Rational>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroupSpec {
    generators: Vec<FactoredRational>,
    include_torsion: bool,
}

impl TryFrom<RawGroupSpec> for GroupSpec {
    type Error = Error;
    fn try_from(raw: RawGroupSpec) -> Result<GroupSpec> {
        GroupSpec::new(raw.generators, raw.include_torsion)
    }
}

impl From<GroupSpec> for RawGroupSpec {
    fn from(g: GroupSpec) -> RawGroupSpec {
        RawGroupSpec {
            generators: g.generators,
            include_torsion: g.include_torsion,
        }
    }
}

/// Row reduction over Q. Returns the pivot columns.
fn pivot_columns(rows: &[Vec<Rational>]) -> Vec<usize> {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(row, p);
        let lead = m[row][col].clone();
        for i in 0..m.len() {
            if i != row && m[i][col] != 0 {
                let f = Rational::from(&m[i][col] / &lead);
                for c in col..cols {
                    let d = Rational::from(&f * &m[row][c]);
                    m[i][c] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

/// Gauss-Jordan inverse of a nonsingular square matrix.
fn invert(square: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = square.len();
    let mut m: Vec<Vec<Rational>> = square
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| Rational::from(u32::from(i == j))));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| m[i][col] != 0).expect("nonsingular");
        m.swap(col, p);
        let lead = m[col][col].clone();
        for c in 0..2 * n {
            m[col][c] /= &lead;
        }
        for i in 0..n {
            if i != col && m[i][col] != 0 {
                let f = m[i][col].clone();
                for c in 0..2 * n {
                    let d = Rational::from(&f * &m[col][c]);
                    m[i][c] -= d;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

impl GroupSpec {
    /// Validates that the generators are multiplicatively independent
    /// (up to sign, which the torsion flag accounts for).
    pub fn new(generators: Vec<FactoredRational>, include_torsion: bool) -> Result<GroupSpec> {
        let mut primes: Vec<Prime> = generators.iter().flat_map(|g| g.support()).collect();
        primes.sort_unstable();
        primes.dedup();
        let rows: Vec<Vec<Rational>> = generators
            .iter()
            .map(|g| primes.iter().map(|&p| Rational::from(g.nu(p))).collect())
            .collect();
        let pivots = pivot_columns(&rows);
        if pivots.len() < generators.len() {
            return Err(Error::DependentGenerators {
                rank: pivots.len(),
                generators: generators.len(),
            });
        }
        let square: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| pivots.iter().map(|&c| r[c].clone()).collect())
            .collect();
        let inverse = invert(&square);
        Ok(GroupSpec {
            generators,
            include_torsion,
            primes,
            pivots,
            inverse,
        })
    }

    pub fn generators(&self) -> &[FactoredRational] {
        &self.generators
    }

    pub fn include_torsion(&self) -> bool {
        self.include_torsion
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn primes(&self) -> &[Prime] {
        &self.primes
    }

    /// Exponents (e_1..e_r) and whether -1 is needed, if x = +-prod g_i^e_i.
    pub fn exponents(&self, x: &ExactRational) -> Option<(Vec<i64>, bool)> {
        if x.is_zero() {
            return None;
        }
        let f = factor_over(x, &self.primes).ok()?;
        let v: Vec<i64> = self.primes.iter().map(|&p| f.nu(p)).collect();
        let r = self.rank();
        let mut e = Vec::with_capacity(r);
        for j in 0..r {
            let mut acc = Rational::new();
            for (i, &c) in self.pivots.iter().enumerate() {
                acc += Rational::from(&self.inverse[i][j] * v[c]);
            }
            if *acc.denom() != 1 {
                return None;
            }
            e.push(acc.numer().to_i64()?);
        }
        for (c, &target) in v.iter().enumerate() {
            let got: i64 = (0..r).map(|j| e[j] * self.generators[j].nu(self.primes[c])).sum();
            if got != target {
                return None;
            }
        }
        let negative_generators = (0..r)
            .filter(|&j| self.generators[j].sign() == Sign::Negative && e[j] % 2 != 0)
            .count();
        let sign = if negative_generators % 2 == 1 {
            Sign::Negative
        } else {
            Sign::Positive
        };
        Some((e, sign != f.sign()))
    }

    /// Membership in the boxed group slice.
    pub fn contains(&self, x: &ExactRational, boxed: ExponentBox) -> bool {
        match self.exponents(x) {
            Some((e, needs_torsion)) => {
                (!needs_torsion || self.include_torsion)
                    && e.iter().all(|v| v.unsigned_abs() <= u64::from(boxed.h))
            }
            None => false,
        }
    }

    /// (2H+1)^r, doubled with torsion.
    pub fn box_size(&self, boxed: ExponentBox) -> u128 {
        let side = 2 * u128::from(boxed.h) + 1;
        let mut n: u128 = if self.include_torsion { 2 } else { 1 };
        for _ in 0..self.rank() {
            n = n.saturating_mul(side);
        }
        n
    }
}

/// Exponent window |e_i| <= h.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentBox {
    pub h: u32,
}

impl ExponentBox {
    pub fn new(h: u32) -> Result<ExponentBox> {
        if h == 0 {
            return Err(Error::InvalidParameter("box size H must be at least 1".into()));
        }
        Ok(ExponentBox { h })
    }
}

/// a0 = a_1 z_1 + ... + a_m z_m.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawEquation", into = "RawEquation")]
pub struct EquationInstance {
    a0: ExactRational,
    coeffs: Vec<ExactRational>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEquation {
    a0: ExactRational,
    coeffs: Vec<ExactRational>,
}

impl TryFrom<RawEquation> for EquationInstance {
    type Error = Error;
    fn try_from(raw: RawEquation) -> Result<EquationInstance> {
        EquationInstance::new(raw.a0, raw.coeffs)
    }
}

impl From<EquationInstance> for RawEquation {
    fn from(e: EquationInstance) -> RawEquation {
        RawEquation {
            a0: e.a0,
            coeffs: e.coeffs,
        }
    }
}

impl EquationInstance {
    pub fn new(a0: ExactRational, coeffs: Vec<ExactRational>) -> Result<EquationInstance> {
        if a0.is_zero() {
            return Err(Error::ZeroElement("equation constant a0"));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("equation needs at least one term".into()));
        }
        if coeffs.iter().any(|c| c.is_zero()) {
            return Err(Error::ZeroElement("equation coefficient"));
        }
        Ok(EquationInstance { a0, coeffs })
    }

    pub fn a0(&self) -> &ExactRational {
        &self.a0
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn m(&self) -> usize {
        self.coeffs.len()
    }

    /// True if some nonempty subset of the terms a_i z_i sums to zero.
    pub fn is_degenerate(&self, z: &[ExactRational]) -> bool {
        let terms: Vec<ExactRational> = self.coeffs.iter().zip(z).map(|(a, z)| a * z).collect();
        let m = terms.len();
        (1u32..(1 << m)).any(|mask| {
            let mut sum = ExactRational::zero();
            for (i, t) in terms.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    sum = &sum + t;
                }
            }
            sum.is_zero()
        })
    }
}

/// All +-prod g_i^e_i with |e_i| <= H, with factorizations attached.
pub fn enumerate_group(spec: &GroupSpec, boxed: ExponentBox, budget: &Budget) -> Result<FiniteSet> {
    budget.check_enumeration(spec.box_size(boxed))?;
    let h = i64::from(boxed.h);
    let r = spec.rank();
    let side = (2 * h + 1) as usize;
    let total = side.pow(r as u32);
    let elements: Vec<FactoredRational> = (0..total)
        .into_par_iter()
        .flat_map_iter(|mut idx| {
            let mut x = FactoredRational::one();
            for g in &spec.generators {
                let e = (idx % side) as i64 - h;
                idx /= side;
                x = x.mul(&g.pow(e));
            }
            let neg = spec.include_torsion.then(|| x.negate());
            std::iter::once(x).chain(neg)
        })
        .collect();
    Ok(FiniteSet::from_factored(elements))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionCount {
    pub nondegenerate: u128,
    pub degenerate: u128,
    /// The nondegenerate solutions, in lexicographic order of (z_1..z_m).
    pub solutions: Vec<Vec<ExactRational>>,
}

impl SolutionCount {
    pub fn total(&self) -> u128 {
        self.nondegenerate + self.degenerate
    }
}

/// Counts solutions with every z_i in the boxed group. The first m-1
/// coordinates are enumerated and the last is solved for and looked up.
pub fn count_nondegenerate_solutions(
    eq: &EquationInstance,
    spec: &GroupSpec,
    boxed: ExponentBox,
    budget: &Budget,
) -> Result<SolutionCount> {
    let group = enumerate_group(spec, boxed, budget)?;
    let g = group.elements();
    let m = eq.m();
    let free = m - 1;
    let mut work: u128 = 1;
    for _ in 0..free {
        work = work.saturating_mul(g.len() as u128);
    }
    budget.check_enumeration(work)?;

    let last = &eq.coeffs[m - 1];
    let solve = |prefix: &[ExactRational]| -> Option<ExactRational> {
        let mut rest = eq.a0.clone();
        for (a, z) in eq.coeffs.iter().zip(prefix) {
            rest = &rest - &(a * z);
        }
        let z = &rest / last;
        group.contains(&z).then_some(z)
    };

    let per_first = |first: Option<&ExactRational>| -> (Vec<Vec<ExactRational>>, u128) {
        let mut found = Vec::new();
        let mut degenerate = 0u128;
        let inner = free.saturating_sub(1);
        let mut idx = vec![0usize; inner];
        loop {
            let mut prefix: Vec<ExactRational> = first.into_iter().cloned().collect();
            prefix.extend(idx.iter().map(|&i| g[i].clone()));
            if let Some(z) = solve(&prefix) {
                prefix.push(z);
                if eq.is_degenerate(&prefix) {
                    degenerate += 1;
                } else {
                    found.push(prefix);
                }
            }
            let mut pos = inner;
            loop {
                if pos == 0 {
                    return (found, degenerate);
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < g.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    };

    let parts: Vec<(Vec<Vec<ExactRational>>, u128)> = if free == 0 {
        vec![per_first(None)]
    } else {
        g.par_iter().map(|z1| per_first(Some(z1))).collect()
    };
    let mut solutions = Vec::new();
    let mut degenerate = 0;
    for (s, d) in parts {
        solutions.extend(s);
        degenerate += d;
    }
    Ok(SolutionCount {
        nondegenerate: solutions.len() as u128,
        degenerate,
        solutions,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub h: u32,
    pub nondegenerate: u128,
    pub degenerate: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationScan {
    pub rows: Vec<ScanRow>,
    /// Smallest scanned H from which the nondegenerate count no longer changes.
    pub plateau_h: Option<u32>,
    /// The plateau covers at least two scanned values.
    pub eventually_constant: bool,
}

impl StabilizationScan {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["H", "nondegenerate_count", "degenerate_count"])?;
        for r in &self.rows {
            w.write_record([r.h.to_string(), r.nondegenerate.to_string(), r.degenerate.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| {
            w[0].h > w[1].h
                || (w[0].nondegenerate <= w[1].nondegenerate && w[0].degenerate <= w[1].degenerate)
        })
    }
}

/// Counts at each H; the list is sorted and deduplicated first.
pub fn stabilization_scan(
    eq: &EquationInstance,
    spec: &GroupSpec,
    hs: &[u32],
    budget: &Budget,
) -> Result<StabilizationScan> {
    let mut hs = hs.to_vec();
    hs.sort_unstable();
    hs.dedup();
    let mut rows = Vec::with_capacity(hs.len());
    for &h in &hs {
        let c = count_nondegenerate_solutions(eq, spec, ExponentBox::new(h)?, budget)?;
        rows.push(ScanRow {
            h,
            nondegenerate: c.nondegenerate,
            degenerate: c.degenerate,
        });
    }
    let (plateau_h, span) = match rows.last() {
        Some(last) => {
            let start = rows
                .iter()
                .rposition(|r| r.nondegenerate != last.nondegenerate)
                .map_or(0, |i| i + 1);
            (Some(rows[start].h), rows.len() - start)
        }
        None => (None, 0),
    };
    Ok(StabilizationScan {
        rows,
        plateau_h,
        eventually_constant: span >= 2,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientEdge {
    pub from: ExactRational,
    pub to: ExactRational,
    /// #{(g1, g2) : g1 b1 - g2 b2 = x}
    pub solutions: u128,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientGraph {
    pub vertices: usize,
    pub edges: Vec<QuotientEdge>,
    pub edge_count: usize,
    pub max_out_degree: usize,
    /// edges / |B|
    pub degree: ExactRational,
    pub max_solutions_per_edge: u128,
    pub total_solutions: u128,
}

/// Edge b1 -> b2 iff g1 b1 - g2 b2 = x for some g1, g2 in the boxed group.
pub fn quotient_graph(
    b: &FiniteSet,
    spec: &GroupSpec,
    boxed: ExponentBox,
    x: &ExactRational,
    budget: &Budget,
) -> Result<QuotientGraph> {
    if x.is_zero() {
        return Err(Error::ZeroElement("quotient graph target"));
    }
    b.require_zero_free("quotient graph vertices")?;
    let group = enumerate_group(spec, boxed, budget)?;
    let n = b.len() as u128;
    budget.check_enumeration(n.saturating_mul(n).saturating_mul(group.len() as u128))?;

    let rows: Vec<Vec<QuotientEdge>> = b
        .elements()
        .par_iter()
        .map(|b1| {
            let shifted: Vec<ExactRational> = group
                .iter()
                .map(|g1| &(g1 * b1) - x)
                .filter(|y| !y.is_zero())
                .collect();
            b.iter()
                .filter_map(|b2| {
                    let solutions = shifted
                        .iter()
                        .filter(|y| spec.contains(&(*y / b2), boxed))
                        .count() as u128;
                    (solutions > 0).then(|| QuotientEdge {
                        from: b1.clone(),
                        to: b2.clone(),
                        solutions,
                    })
                })
                .collect()
        })
        .collect();

    let max_out_degree = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let edges: Vec<QuotientEdge> = rows.into_iter().flatten().collect();
    let edge_count = edges.len();
    let degree = if b.is_empty() {
        ExactRational::zero()
    } else {
        ExactRational::from(Rational::from((edge_count, b.len())))
    };
    Ok(QuotientGraph {
        vertices: b.len(),
        edge_count,
        max_out_degree,
        degree,
        max_solutions_per_edge: edges.iter().map(|e| e.solutions).max().unwrap_or(0),
        total_solutions: edges.iter().map(|e| e.solutions).sum(),
        edges,
    })
}

/// Parses "2,3" or "2,-3/5" into generator values and factors them.
pub fn parse_generators(text: &str, bound: u64) -> Result<Vec<FactoredRational>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| crate::factored::factor(&s.parse::<ExactRational>()?, bound))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    fn spec(gens: &[i64], torsion: bool) -> GroupSpec {
        let g = gens
            .iter()
            .map(|&v| crate::factored::factor(&ExactRational::from(v), 100).unwrap())
            .collect();
        GroupSpec::new(g, torsion).unwrap()
    }

    fn bx(h: u32) -> ExponentBox {
        ExponentBox::new(h).unwrap()
    }

    #[test]
    fn enumerate_examples() {
        let b = Budget::default();
        let g = enumerate_group(&spec(&[2], true), bx(1), &b).unwrap();
        let want: FiniteSet = ["-2", "-1", "-1/2", "1/2", "1", "2"].iter().map(|s| q(s)).collect();
        assert_eq!(g, want);
        let g = enumerate_group(&spec(&[], true), bx(3), &b).unwrap();
        assert_eq!(g, FiniteSet::from_integers([-1, 1]));
        let g = enumerate_group(&spec(&[2, 3], false), bx(1), &b).unwrap();
        assert_eq!(g.len(), 9);
        assert!(g.contains(&q("2/3")));
    }

    #[test]
    fn dependent_generators_rejected() {
        let g = [2i64, 4]
            .iter()
            .map(|&v| crate::factored::factor(&ExactRational::from(v), 100).unwrap())
            .collect();
        assert!(matches!(
            GroupSpec::new(g, false),
            Err(Error::DependentGenerators { rank: 1, generators: 2 })
        ));
    }

    #[test]
    fn membership() {
        let s = spec(&[6, 10], false);
        assert_eq!(s.exponents(&q("3/5")), Some((vec![1, -1], false)));
        assert!(s.contains(&q("3/5"), bx(1)));
        assert!(!s.contains(&q("-3/5"), bx(1)));
        assert!(!s.contains(&q("2"), bx(5)));
        assert!(!s.contains(&q("36"), bx(1)));
        assert!(s.contains(&q("36"), bx(2)));
    }

    #[test]
    fn unit_equation_has_three_solutions() {
        let s = spec(&[2], true);
        let eq = EquationInstance::new(q("1"), vec![q("1"), q("-1")]).unwrap();
        let c = count_nondegenerate_solutions(&eq, &s, bx(4), &Budget::default()).unwrap();
        assert_eq!(c.nondegenerate, 3);
        assert_eq!(c.degenerate, 0);
        let mut sols = c.solutions.clone();
        sols.sort();
        assert_eq!(
            sols,
            vec![
                vec![q("-1"), q("-2")],
                vec![q("1/2"), q("-1/2")],
                vec![q("2"), q("1")],
            ]
        );
    }

    #[test]
    fn single_term_membership() {
        let s = spec(&[2], true);
        let eq = EquationInstance::new(q("8"), vec![q("1")]).unwrap();
        let c = count_nondegenerate_solutions(&eq, &s, bx(3), &Budget::default()).unwrap();
        assert_eq!(c.nondegenerate, 1);
        let eq = EquationInstance::new(q("5"), vec![q("1")]).unwrap();
        let scan = stabilization_scan(&eq, &s, &[1, 2, 3], &Budget::default()).unwrap();
        assert!(scan.rows.iter().all(|r| r.nondegenerate == 0));
        assert!(EquationInstance::new(q("0"), vec![q("1"), q("1")]).is_err());
    }

    #[test]
    fn degenerate_solutions_counted() {
        // z1 + z2 + z3 = 1 has z1 = 1, z2 = -z3 as degenerate families
        let s = spec(&[2], true);
        let eq = EquationInstance::new(q("1"), vec![q("1"), q("1"), q("1")]).unwrap();
        let c = count_nondegenerate_solutions(&eq, &s, bx(2), &Budget::default()).unwrap();
        assert!(c.degenerate > 0);
        for z in &c.solutions {
            assert!(!eq.is_degenerate(z));
        }
    }

    #[test]
    fn scan_csv() {
        let s = spec(&[2], true);
        let eq = EquationInstance::new(q("1"), vec![q("1"), q("-1")]).unwrap();
        let scan = stabilization_scan(&eq, &s, &[1, 2, 3, 4], &Budget::default()).unwrap();
        assert!(scan.eventually_constant);
        assert_eq!(scan.plateau_h, Some(1));
        let mut buf = Vec::new();
        scan.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "H,nondegenerate_count,degenerate_count\n1,3,0\n2,3,0\n3,3,0\n4,3,0\n"
        );
    }

    #[test]
    fn quotient_graph_self_loop() {
        let s = spec(&[2], true);
        let g = quotient_graph(&FiniteSet::from_integers([1]), &s, bx(2), &q("1"), &Budget::default())
            .unwrap();
        assert_eq!(g.edge_count, 1);
        assert_eq!(g.total_solutions, 3);
        let g = quotient_graph(&FiniteSet::from_integers([1]), &s, bx(2), &q("7"), &Budget::default())
            .unwrap();
        assert_eq!(g.edge_count, 0);
    }
}
