use rayon::prelude::*;
use rug::Integer;

use crate::budget::{saturating_pow, Budget};
use crate::error::{Error, Result};
use crate::kernel::{lift_common, Key, Lifted, Mult};
use crate::set::FiniteSet;

type Matrix<M> = Vec<Vec<M>>;

fn mat_mul<M: Mult>(x: &Matrix<M>, y: &Matrix<M>) -> Matrix<M> {
    let n = y.first().map_or(0, |r| r.len());
    x.par_iter()
        .map(|row| {
            let mut out = vec![M::zero(); n];
            for (k, xik) in row.iter().enumerate() {
                for (j, cell) in out.iter_mut().enumerate() {
                    cell.add_product(xik, &y[k][j]);
                }
            }
            out
        })
        .collect()
}

/// Gram matrix G = N N^T of a 0/1 biadjacency matrix given by rows.
fn gram<M: Mult>(rows: &[Vec<bool>]) -> Matrix<M> {
    rows.par_iter()
        .map(|ri| {
            rows.iter()
                .map(|rj| {
                    let shared = ri.iter().zip(rj).filter(|(a, b)| **a && **b).count();
                    let mut m = M::zero();
                    for _ in 0..shared {
                        m.add_assign(&M::one());
                    }
                    m
                })
                .collect()
        })
        .collect()
}

fn trace_power<M: Mult>(g: &Matrix<M>, k: usize) -> Integer {
    let mut power = g.clone();
    for _ in 1..k {
        power = mat_mul(&power, g);
    }
    let mut tr = M::zero();
    for (i, row) in power.iter().enumerate() {
        tr.add_assign(&row[i]);
    }
    tr.to_integer()
}

fn adjacency<K: Key>(xs: &[K], ys: &[K], targets: &[K]) -> Vec<Vec<bool>> {
    xs.par_iter()
        .map(|x| {
            ys.iter()
                .map(|y| targets.binary_search(&x.add(y)).is_ok())
                .collect()
        })
        .collect()
}

/// V_2k: closed walks a_1 b_1 a_2 b_2 .. a_k b_k with every a_i + b_i and
/// b_i + a_(i+1) in C (indices mod k).
///
/// Computed as tr((N N^T)^k) where N is the A x B matrix of a + b in C,
/// taking the Gram matrix on the smaller side.
pub fn cycle_homomorphism_count(
    a: &FiniteSet,
    b: &FiniteSet,
    c: &FiniteSet,
    k: usize,
    budget: &Budget,
) -> Result<Integer> {
    if k == 0 {
        return Err(Error::InvalidParameter("cycle half-length k must be at least 1".into()));
    }
    if a.is_empty() || b.is_empty() || c.is_empty() {
        return Ok(Integer::new());
    }
    budget.check_matrix(a.len().min(b.len()))?;
    budget.check_support(a.len() as u128 * b.len() as u128)?;
    let (_, lifted) = lift_common(&[a.elements(), b.elements(), c.elements()], 2);
    let mut rows = match &lifted {
        Lifted::Small(v) => adjacency(&v[0], &v[1], &v[2]),
        Lifted::Big(v) => adjacency(&v[0], &v[1], &v[2]),
    };
    if b.len() < a.len() {
        rows = (0..b.len())
            .map(|j| rows.iter().map(|r| r[j]).collect())
            .collect();
    }
    // every entry of G^j is at most |A|^(j-1) |B|^j, so the trace is at most (|A||B|)^k
    let bound = saturating_pow(a.len() as u128 * b.len() as u128, k as u32);
    Ok(if bound < u128::MAX {
        trace_power(&gram::<u128>(&rows), k)
    } else {
        trace_power(&gram::<Integer>(&rows), k)
    })
}
