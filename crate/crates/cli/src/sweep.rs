//! Exponent sweeps: one CSV row of exact growth counts and log-ratios per set.

use std::io::Write;

use rayon::prelude::*;
use sumprod_core::verify::{log_ratio, report_exponents, ExponentRow};
use sumprod_core::{Budget, ExactRational, FamilySpec, FiniteSet, PrimePool, Result};

const NA: &str = "NA";

/// The default grid: geometric 2^i and random integers with at most two
/// prime factors from the first ten primes at each size, then the
/// Balog–Wooley sets (8,4), (16,8), (32,8).
pub fn default_grid(sizes: &[u32], seed: u64) -> Vec<FamilySpec> {
    let pool = PrimePool::first(10).primes().to_vec();
    let mut grid = Vec::new();
    for &n in sizes {
        grid.push(FamilySpec::Geometric {
            q: ExactRational::from(2),
            n,
        });
    }
    for &n in sizes {
        grid.push(FamilySpec::RandomFewPrime {
            pool: pool.clone(),
            k: 2,
            e_max: 5,
            size: n as usize,
            seed,
            integer_mode: true,
        });
    }
    for (m, n) in [(8, 4), (16, 8), (32, 8)] {
        grid.push(FamilySpec::BalogWooley { m, n });
    }
    grid
}

pub struct SweepRow {
    pub spec: FamilySpec,
    pub row: ExponentRow,
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| NA.to_string(), |v| v.to_string())
}

fn ratio(v: Option<usize>, n: usize) -> String {
    v.and_then(|v| log_ratio(v, n)).unwrap_or_else(|| NA.to_string())
}

/// |AA| <= M^2 (2N-1) for Balog–Wooley rows, NA elsewhere.
fn aa_bound(spec: &FamilySpec, products: Option<usize>) -> String {
    match (spec, products) {
        (FamilySpec::BalogWooley { m, n }, Some(p)) => {
            let bound = u128::from(*m) * u128::from(*m) * (2 * u128::from(*n) - 1);
            ((p as u128) <= bound).to_string()
        }
        _ => NA.to_string(),
    }
}

pub fn compute_row(set: &FiniteSet, spec: FamilySpec, ms: &[usize], budget: &Budget) -> Result<SweepRow> {
    Ok(SweepRow {
        row: report_exponents(set, ms, budget)?,
        spec,
    })
}

/// Generates and measures every set; rows keep grid order.
pub fn run_sweep(grid: &[FamilySpec], ms: &[usize], budget: &Budget) -> Result<Vec<SweepRow>> {
    grid.par_iter()
        .map(|spec| {
            let set = spec.generate()?;
            compute_row(&set, spec.clone(), ms, budget)
        })
        .collect()
}

pub fn header(ms: &[usize]) -> Vec<String> {
    let mut h: Vec<String> = ["family", "params", "seed", "n", "sums", "differences", "products", "a_plus_aa", "energy"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for m in ms {
        h.push(format!("sums_{m}"));
    }
    for m in ms {
        h.push(format!("products_{m}"));
    }
    for name in ["sums", "differences", "products", "a_plus_aa"] {
        h.push(format!("log_{name}@256"));
    }
    for m in ms {
        h.push(format!("log_sums_{m}@256"));
    }
    for m in ms {
        h.push(format!("log_products_{m}@256"));
    }
    h.push("log_max_sum_prod@256".into());
    h.push("log_max_prod_energy@256".into());
    h.push("aa_bound_holds".into());
    h
}

pub fn record(r: &SweepRow, seed: u64) -> Vec<String> {
    let row = &r.row;
    let n = row.n;
    let mut out = vec![
        r.spec.name().to_string(),
        r.spec.params(),
        r.spec.seed().unwrap_or(seed).to_string(),
        n.to_string(),
        opt(row.sums),
        opt(row.differences),
        opt(row.products),
        opt(row.a_plus_aa),
        row.energy.as_ref().map_or_else(|| NA.to_string(), |e| e.to_string()),
    ];
    out.extend(row.m_sums.iter().map(|(_, v)| opt(*v)));
    out.extend(row.m_products.iter().map(|(_, v)| opt(*v)));
    for v in [row.sums, row.differences, row.products, row.a_plus_aa] {
        out.push(ratio(v, n));
    }
    out.extend(row.m_sums.iter().map(|(_, v)| ratio(*v, n)));
    out.extend(row.m_products.iter().map(|(_, v)| ratio(*v, n)));
    out.push(ratio(row.max_sum_product(), n));
    out.push(row.log_max_product_energy().unwrap_or_else(|| NA.to_string()));
    out.push(aa_bound(&r.spec, row.products));
    out
}

pub fn write_csv<W: Write>(rows: &[SweepRow], ms: &[usize], seed: u64, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header(ms))?;
    for r in rows {
        w.write_record(record(r, seed))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_csv() {
        let grid = default_grid(&[10], 3);
        let rows = run_sweep(&grid, &[3], &Budget::default()).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &[3], 3, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + grid.len());
        assert!(lines[0].contains("log_max_sum_prod@256"));
        assert!(!text.contains('\r'));
        // geometric 2^1..2^10: |A+A| = 55, |AA| = 19
        assert!(lines[1].starts_with("geometric,q=2;n=10,3,10,55,"));
        let cols: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cols[6], "19");
        assert!(lines.last().unwrap().ends_with(",true"));
    }
}
