//! Inequality suites for `sumprod verify`.

use clap::ValueEnum;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sumprod_core::energy::Sign;
use sumprod_core::families::balog_wooley_checks;
use sumprod_core::setops::sumset;
use sumprod_core::verify::{
    check_asymmetric_energy, check_cauchy_schwarz_sumset, check_energy_interpolation,
    check_holder_energy, check_nondegenerate_below_full, check_shkredov_steps, popular_set,
    PopularMode,
};
use sumprod_core::{Budget, CheckReport, ExactRational, FiniteSet, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Holder,
    Interpolation,
    Popular,
    Shkredov,
    Asymmetric,
    CauchySchwarz,
    Nondegenerate,
    BalogWooley,
    All,
}

impl Suite {
    const EACH: [Suite; 8] = [
        Suite::Holder,
        Suite::Interpolation,
        Suite::Popular,
        Suite::Shkredov,
        Suite::Asymmetric,
        Suite::CauchySchwarz,
        Suite::Nondegenerate,
        Suite::BalogWooley,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Holder => "holder",
            Suite::Interpolation => "interpolation",
            Suite::Popular => "popular",
            Suite::Shkredov => "shkredov",
            Suite::Asymmetric => "asymmetric",
            Suite::CauchySchwarz => "cauchy-schwarz",
            Suite::Nondegenerate => "nondegenerate",
            Suite::BalogWooley => "balog-wooley",
            Suite::All => "all",
        }
    }
}

/// A zero-free set of `1..=max_size` integers drawn from a window a few
/// times wider than the set, so that sums collide often.
pub fn random_set(rng: &mut ChaCha8Rng, max_size: usize) -> FiniteSet {
    let size = rng.gen_range(1..=max_size.max(1));
    let span = 3 * size as i64 + 2;
    let mut values: Vec<i64> = (-span..=span).filter(|v| *v != 0).collect();
    values.shuffle(rng);
    FiniteSet::from_integers(values.into_iter().take(size))
}

/// Roughly half of A+B, never empty.
fn random_target(rng: &mut ChaCha8Rng, a: &FiniteSet, b: &FiniteSet) -> FiniteSet {
    let s = sumset(a, b);
    let mut kept: Vec<ExactRational> = s.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    if kept.is_empty() {
        kept.push(s.elements()[0].clone());
    }
    FiniteSet::from_values(kept)
}

fn random_signs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Sign> {
    (0..n)
        .map(|_| if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus })
        .collect()
}

/// The sets a suite runs on: explicit files, or random sets drawn from a seed.
#[derive(Clone, Debug)]
pub enum Inputs {
    Files(Vec<FiniteSet>),
    Random { instances: usize, max_size: usize, seed: u64 },
}

fn tag(reports: Vec<CheckReport>, suite: Suite, instance: usize, seed: Option<u64>) -> Vec<CheckReport> {
    reports
        .into_iter()
        .map(|r| {
            let r = r.with("suite", suite.name()).with("instance", instance);
            match seed {
                Some(s) => r.with("seed", s),
                None => r,
            }
        })
        .collect()
}

fn holder(a: &FiniteSet, budget: &Budget) -> Result<Vec<CheckReport>> {
    (2..=3).map(|m| check_holder_energy(a, m, budget)).collect()
}

/// Ten (x, signs, r, k) draws: x is a signed sum of elements, so the count is positive.
fn interpolation(a: &FiniteSet, rng: &mut ChaCha8Rng, budget: &Budget) -> Result<Vec<CheckReport>> {
    let mut out = Vec::with_capacity(10);
    for _ in 0..10 {
        let k = rng.gen_range(1..=3);
        let n = rng.gen_range(2..=2 * k);
        let r = rng.gen_range(1..=n / 2);
        let signs = random_signs(rng, n);
        let x = if rng.gen_bool(0.2) {
            ExactRational::zero()
        } else {
            signs.iter().fold(ExactRational::zero(), |acc, s| {
                let v = a.elements().choose(rng).expect("nonempty").clone();
                match s {
                    Sign::Plus => &acc + &v,
                    Sign::Minus => &acc - &v,
                }
            })
        };
        out.push(check_energy_interpolation(a, &x, &signs, r, k, budget)?);
    }
    Ok(out)
}

fn popular(a: &FiniteSet, budget: &Budget) -> Result<Vec<CheckReport>> {
    let mut out = popular_set(a, PopularMode::Sums, budget)?.checks;
    out.extend(popular_set(a, PopularMode::Differences, budget)?.checks);
    Ok(out)
}

fn asymmetric(a: &FiniteSet, b: &FiniteSet, budget: &Budget) -> Result<Vec<CheckReport>> {
    [(2, 2), (3, 2), (2, 3)]
        .into_iter()
        .map(|(m, n)| check_asymmetric_energy(a, b, m, n, budget))
        .collect()
}

fn nondegenerate(a: &FiniteSet, budget: &Budget) -> Result<Vec<CheckReport>> {
    (1..=2).map(|m| check_nondegenerate_below_full(a, m, budget)).collect()
}

fn balog_wooley(budget: &Budget) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (m, n) in [(8, 4), (16, 8), (32, 8)] {
        out.extend(balog_wooley_checks(m, n, budget)?);
    }
    Ok(out)
}

/// One random instance of one suite; every instance has its own stream.
fn random_instance(suite: Suite, seed: u64, instance: usize, max_size: usize, budget: &Budget) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(instance as u64 + 1);
    let a = random_set(&mut rng, max_size);
    match suite {
        Suite::Holder => holder(&a, budget),
        Suite::Interpolation => interpolation(&a, &mut rng, budget),
        Suite::Popular => popular(&a, budget),
        Suite::Shkredov => {
            let b = random_set(&mut rng, max_size);
            let c = random_target(&mut rng, &a, &b);
            let k = rng.gen_range(1..=3);
            check_shkredov_steps(&a, &b, &c, k, budget)
        }
        Suite::Asymmetric => {
            let b = random_set(&mut rng, max_size);
            asymmetric(&a, &b, budget)
        }
        Suite::CauchySchwarz => {
            let b = random_set(&mut rng, max_size);
            Ok(vec![check_cauchy_schwarz_sumset(&a, &b)])
        }
        Suite::Nondegenerate => nondegenerate(&a, budget),
        Suite::BalogWooley | Suite::All => unreachable!("expanded by run_suite"),
    }
}

fn file_instance(suite: Suite, sets: &[FiniteSet], seed: u64, budget: &Budget) -> Result<Vec<CheckReport>> {
    let a = &sets[0];
    let b = sets.get(1).unwrap_or(a);
    match suite {
        Suite::Holder => sets.iter().map(|s| holder(s, budget)).flat(),
        Suite::Interpolation => sets
            .iter()
            .map(|s| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                interpolation(s, &mut rng, budget)
            })
            .flat(),
        Suite::Popular => sets.iter().map(|s| popular(s, budget)).flat(),
        Suite::Shkredov => {
            let c = match sets.get(2) {
                Some(c) => c.clone(),
                None => sumset(a, b),
            };
            (1..=3).map(|k| check_shkredov_steps(a, b, &c, k, budget)).flat()
        }
        Suite::Asymmetric => asymmetric(a, b, budget),
        Suite::CauchySchwarz => Ok(vec![check_cauchy_schwarz_sumset(a, b)]),
        Suite::Nondegenerate => sets.iter().map(|s| nondegenerate(s, budget)).flat(),
        Suite::BalogWooley | Suite::All => unreachable!("expanded by run_suite"),
    }
}

trait Flat {
    fn flat(self) -> Result<Vec<CheckReport>>;
}

impl<I: Iterator<Item = Result<Vec<CheckReport>>>> Flat for I {
    fn flat(self) -> Result<Vec<CheckReport>> {
        let mut out = Vec::new();
        for r in self {
            out.extend(r?);
        }
        Ok(out)
    }
}

/// Runs a suite (or all of them, in a fixed order). Report order does not
/// depend on the thread count.
pub fn run_suite(suite: Suite, inputs: &Inputs, seed: u64, budget: &Budget) -> Result<Vec<CheckReport>> {
    if suite == Suite::All {
        let mut out = Vec::new();
        for s in Suite::EACH {
            out.extend(run_suite(s, inputs, seed, budget)?);
        }
        return Ok(out);
    }
    if suite == Suite::BalogWooley {
        return Ok(tag(balog_wooley(budget)?, suite, 0, None));
    }
    match inputs {
        Inputs::Files(sets) => {
            if sets.is_empty() {
                return Err(sumprod_core::Error::InvalidParameter(format!(
                    "suite {} needs at least one set file",
                    suite.name()
                )));
            }
            Ok(tag(file_instance(suite, sets, seed, budget)?, suite, 0, Some(seed)))
        }
        Inputs::Random {
            instances,
            max_size,
            seed,
        } => {
            let per: Vec<Vec<CheckReport>> = (0..*instances)
                .into_par_iter()
                .map(|i| Ok(tag(random_instance(suite, *seed, i, *max_size, budget)?, suite, i, Some(*seed))))
                .collect::<Result<_>>()?;
            Ok(per.into_iter().flatten().collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_shkredov_holds() {
        let inputs = Inputs::Random {
            instances: 10,
            max_size: 12,
            seed: 7,
        };
        let reports = run_suite(Suite::Shkredov, &inputs, 7, &Budget::default()).unwrap();
        assert_eq!(reports.len(), 30);
        assert!(reports.iter().all(|r| r.passes()));
    }

    #[test]
    fn same_seed_same_reports() {
        let inputs = Inputs::Random {
            instances: 4,
            max_size: 8,
            seed: 1,
        };
        let a = run_suite(Suite::Interpolation, &inputs, 1, &Budget::default()).unwrap();
        let b = run_suite(Suite::Interpolation, &inputs, 1, &Budget::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 40);
    }

    #[test]
    fn file_inputs() {
        let sets = vec![FiniteSet::from_integers([1, 2, 3, 5]), FiniteSet::from_integers([1, 4])];
        let reports = run_suite(Suite::All, &Inputs::Files(sets), 0, &Budget::default()).unwrap();
        assert!(reports.iter().all(|r| r.passes()));
        assert!(reports.iter().any(|r| r.name == "bw_product_set"));
    }
}
