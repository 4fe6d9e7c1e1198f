//! Inequality harness.
//!
//! Integer and rational checks are exact. Checks with fractional exponents
//! compare natural logarithms at 256 bits with an absolute slack of 1e-9.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::energy::{
    additive_energy, co_convolve, convolve, cycle_homomorphism_count, higher_energy,
    nondegenerate_energy, signed_representation_count, Counter, Sign,
};
use crate::error::{Error, Result};
use crate::rational::ExactRational;
use crate::set::FiniteSet;
use crate::setops::{
    a_plus_aa_bounded, difference_set, iterated_product_bounded, iterated_sumset_bounded,
    product_set, sumset,
};

pub const LOG_PRECISION: u32 = 256;
pub const LOG_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompareMode {
    Exact,
    LogSlack,
}

/// Assertions must hold; report-only rows carry constant-hiding statements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grade {
    Assertion,
    ReportOnly,
}

/// One side of a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Quantity {
    Exact { value: ExactRational },
    /// Natural logarithm, printed to 30 significant digits.
    Ln { value: String, precision_bits: u32 },
}

impl Quantity {
    fn ln(x: &Float) -> Quantity {
        Quantity::Ln {
            value: x.to_string_radix(10, Some(30)),
            precision_bits: x.prec(),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Exact { value } => write!(f, "{value}"),
            Quantity::Ln {
                value,
                precision_bits,
            } => write!(f, "ln:{value}@{precision_bits}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub lhs: Quantity,
    pub relation: Relation,
    pub rhs: Quantity,
    pub mode: CompareMode,
    pub holds: bool,
    pub grade: Grade,
    pub context: BTreeMap<String, String>,
}

impl CheckReport {
    pub fn exact(
        name: &str,
        lhs: impl Into<ExactRational>,
        relation: Relation,
        rhs: impl Into<ExactRational>,
    ) -> CheckReport {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        let holds = match relation {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        };
        CheckReport {
            name: name.to_string(),
            lhs: Quantity::Exact { value: lhs },
            relation,
            rhs: Quantity::Exact { value: rhs },
            mode: CompareMode::Exact,
            holds,
            grade: Grade::Assertion,
            context: BTreeMap::new(),
        }
    }

    /// Compares two natural logarithms with the fixed absolute slack.
    pub fn log_space(name: &str, lhs: &Float, relation: Relation, rhs: &Float) -> CheckReport {
        let diff = Float::with_val(LOG_PRECISION, lhs - rhs);
        let holds = match relation {
            Relation::Le => lhs.is_infinite() && lhs.is_sign_negative() || diff <= LOG_SLACK,
            Relation::Ge => rhs.is_infinite() && rhs.is_sign_negative() || diff >= -LOG_SLACK,
            Relation::Eq => diff.abs() <= LOG_SLACK,
        };
        CheckReport {
            name: name.to_string(),
            lhs: Quantity::ln(lhs),
            relation,
            rhs: Quantity::ln(rhs),
            mode: CompareMode::LogSlack,
            holds,
            grade: Grade::Assertion,
            context: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> CheckReport {
        self.context.insert(key.to_string(), value.to_string());
        self
    }

    pub fn report_only(mut self) -> CheckReport {
        self.grade = Grade::ReportOnly;
        self
    }

    /// True unless this is a failing assertion.
    pub fn passes(&self) -> bool {
        self.holds || self.grade == Grade::ReportOnly
    }

    /// Turns a failing assertion into an error.
    pub fn into_result(self) -> Result<CheckReport> {
        if self.passes() {
            Ok(self)
        } else {
            Err(Error::CheckFailed(Box::new(self)))
        }
    }

    fn params(&self) -> String {
        self.context
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// One JSON object per line.
pub fn write_json_lines<W: Write>(reports: &[CheckReport], mut out: W) -> Result<()> {
    for r in reports {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// CSV summary with columns name, holds, lhs, rhs, params.
pub fn write_summary_csv<W: Write>(reports: &[CheckReport], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["name", "holds", "lhs", "rhs", "params"])?;
    for r in reports {
        w.write_record([
            r.name.clone(),
            r.holds.to_string(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.params(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn ln_int(x: &Integer) -> Float {
    Float::with_val(LOG_PRECISION, x).ln()
}

fn ln_usize(x: usize) -> Float {
    ln_int(&Integer::from(x))
}

fn ratio_float(q: &Rational) -> Float {
    Float::with_val(LOG_PRECISION, q)
}

fn pow_rational(base: &Rational, exp: u32) -> Rational {
    Rational::from(base.pow(exp))
}

/// |mA| E_2m(A) >= |A|^2m.
pub fn check_holder_energy(a: &FiniteSet, m: usize, budget: &Budget) -> Result<CheckReport> {
    let ma = iterated_sumset_bounded(a, m, budget)?;
    let e = higher_energy(a, m, budget)?.value;
    let lhs = Integer::from(ma.len()) * e;
    let rhs = Integer::from(a.len()).pow(2 * m as u32);
    Ok(CheckReport::exact("holder_energy", lhs, Relation::Ge, rhs)
        .with("m", m)
        .with("n", a.len()))
}

/// Number of solutions of x = sum eps_i a_i against
/// E_2r^((2k-n)/(2k-2r)) E_2k^((n-2r)/(2k-2r)).
pub fn check_energy_interpolation(
    a: &FiniteSet,
    x: &ExactRational,
    signs: &[Sign],
    r: usize,
    k: usize,
    budget: &Budget,
) -> Result<CheckReport> {
    let n = signs.len();
    if r < 1 || 2 * r > n || n > 2 * k {
        return Err(Error::InvalidParameter(format!(
            "need k >= n/2 >= r >= 1, got k={k} n={n} r={r}"
        )));
    }
    let count = signed_representation_count(a, x, signs)?;
    let lhs = ln_int(&count);
    let rhs = if k == r {
        ln_int(&higher_energy(a, k, budget)?.value)
    } else {
        let e_r = ln_int(&higher_energy(a, r, budget)?.value);
        let e_k = ln_int(&higher_energy(a, k, budget)?.value);
        let den = (2 * k - 2 * r) as u32;
        let w_r = ratio_float(&Rational::from(((2 * k - n) as u32, den)));
        let w_k = ratio_float(&Rational::from(((n - 2 * r) as u32, den)));
        Float::with_val(LOG_PRECISION, &w_r * &e_r) + Float::with_val(LOG_PRECISION, &w_k * &e_k)
    };
    let pattern: String = signs.iter().map(|s| s.as_char()).collect();
    Ok(CheckReport::log_space("energy_interpolation", &lhs, Relation::Le, &rhs)
        .with("x", x)
        .with("signs", pattern)
        .with("r", r)
        .with("k", k)
        .with("count", count))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PopularMode {
    Sums,
    Differences,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PopularSet {
    pub c: Vec<ExactRational>,
    pub k: ExactRational,
    pub mode: PopularMode,
    #[serde(with = "crate::serde_integer")]
    pub mass: Integer,
    pub checks: Vec<CheckReport>,
}

impl PopularSet {
    pub fn set(&self) -> FiniteSet {
        FiniteSet::from_values(self.c.iter().cloned())
    }
}

/// Values where the (difference) convolution reaches |A|/2K, with the
/// mass, size and domination facts checked exactly.
pub fn popular_set(a: &FiniteSet, mode: PopularMode, budget: &Budget) -> Result<PopularSet> {
    if a.is_empty() {
        return Err(Error::InvalidParameter("popular set of an empty set".into()));
    }
    let n = a.len();
    let (counter, grown): (Counter, usize) = match mode {
        PopularMode::Sums => (convolve(a, a), sumset(a, a).len()),
        PopularMode::Differences => (co_convolve(a, a), difference_set(a, a).len()),
    };
    let k = Rational::from((grown, n));
    // |A| / 2K = |A|^2 / (2 |A+A|)
    let threshold = Rational::from((n * n, 2 * grown));
    let mut c = Vec::new();
    let mut mass = Integer::new();
    for (x, mult) in counter.iter() {
        if Rational::from(mult) >= threshold {
            c.push(x.clone());
            mass += mult;
        }
    }
    let c_set = FiniteSet::from_values(c.iter().cloned());
    let mode_name = match mode {
        PopularMode::Sums => "sums",
        PopularMode::Differences => "differences",
    };
    let mut checks = vec![
        CheckReport::exact(
            "popular_mass",
            mass.clone(),
            Relation::Ge,
            Rational::from((n * n, 2)),
        ),
        CheckReport::exact(
            "popular_size",
            Integer::from(c.len()),
            Relation::Le,
            Rational::from(&k * Rational::from(n)),
        ),
    ];
    // E_4(C) <= (2K)^4 |A|^-4 E_8(A)
    let e4c = higher_energy(&c_set, 2, budget)?.value;
    let e8a = higher_energy(a, 4, budget)?.value;
    let factor = pow_rational(&Rational::from(&k * 2u32), 4) / Rational::from(Integer::from(n).pow(4));
    checks.push(CheckReport::exact(
        "popular_domination",
        e4c,
        Relation::Le,
        Rational::from(factor * e8a),
    ));
    let checks = checks
        .into_iter()
        .map(|r| r.with("mode", mode_name).with("n", n).with("ell", 2))
        .collect();
    Ok(PopularSet {
        c,
        k: ExactRational::from(k),
        mode,
        mass,
        checks,
    })
}

fn coconv_moment(a: &FiniteSet, b: &FiniteSet, k: u32) -> Integer {
    let ca = co_convolve(a, a);
    co_convolve(b, b)
        .iter()
        .filter(|(x, _)| !x.is_zero())
        .map(|(x, cb)| {
            let va = ca.get(x);
            Integer::from(va.pow(k)) * Integer::from(cb.pow(k))
        })
        .sum()
}

/// The cycle-counting steps: (i) V_2k >= delta^2k |A|^k |B|^k,
/// (ii) V_2k^2 <= E_2k(C) (V_2k + sum_{x != 0} (1_A o 1_A)^k (1_B o 1_B)^k),
/// plus the combined form with its constant left out (report only).
pub fn check_shkredov_steps(
    a: &FiniteSet,
    b: &FiniteSet,
    c: &FiniteSet,
    k: usize,
    budget: &Budget,
) -> Result<Vec<CheckReport>> {
    let v = cycle_homomorphism_count(a, b, c, k, budget)?;
    let conv = convolve(a, b);
    let mass: Integer = c.iter().map(|x| conv.get(x)).sum();
    let ab = Integer::from(a.len()) * Integer::from(b.len());
    let ku = k as u32;

    let mut reports = Vec::with_capacity(3);
    if ab == 0 {
        reports.push(CheckReport::exact("shkredov_sidorenko", v.clone(), Relation::Ge, 0));
    } else {
        let delta = Rational::from((mass.clone(), ab.clone()));
        let rhs = pow_rational(&delta, 2 * ku) * Rational::from(ab.clone().pow(ku));
        reports.push(
            CheckReport::exact("shkredov_sidorenko", v.clone(), Relation::Ge, rhs)
                .with("delta", ExactRational::from(delta)),
        );
    }

    let e2k_c = higher_energy(c, k, budget)?.value;
    let moment = coconv_moment(a, b, ku);
    let lhs = Integer::from(v.square_ref());
    let rhs = e2k_c.clone() * Integer::from(&v + &moment);
    reports.push(CheckReport::exact("shkredov_cauchy_schwarz", lhs, Relation::Le, rhs));

    // mass^4k against |A|^2k |B|^2k E_2k(C) (E_2k(C) + moment)
    let lhs = mass.clone().pow(4 * ku);
    let rhs = ab.clone().pow(2 * ku) * e2k_c.clone() * Integer::from(&e2k_c + &moment);
    reports.push(
        CheckReport::exact("shkredov_combined", lhs, Relation::Le, rhs)
            .report_only(),
    );

    Ok(reports
        .into_iter()
        .map(|r| {
            r.with("k", k)
                .with("a", a.len())
                .with("b", b.len())
                .with("c", c.len())
                .with("v", &v)
        })
        .collect())
}

/// E(A,B) <= E_2m(A)^(1/m) E_2n(B)^(1/(m(n-1))) |B|^(1 - n/(m(n-1))).
pub fn check_asymmetric_energy(
    a: &FiniteSet,
    b: &FiniteSet,
    m: usize,
    n: usize,
    budget: &Budget,
) -> Result<CheckReport> {
    if m < 2 || n < 2 {
        return Err(Error::InvalidParameter(format!("need m, n >= 2, got m={m} n={n}")));
    }
    let e = additive_energy(a, b).value;
    let lhs = ln_int(&e);
    let e_a = ln_int(&higher_energy(a, m, budget)?.value);
    let e_b = ln_int(&higher_energy(b, n, budget)?.value);
    let mn1 = (m * (n - 1)) as i64;
    let w_a = ratio_float(&Rational::from((1, m as i64)));
    let w_b = ratio_float(&Rational::from((1, mn1)));
    let w_size = ratio_float(&Rational::from((mn1 - n as i64, mn1)));
    let rhs = Float::with_val(LOG_PRECISION, &w_a * &e_a)
        + Float::with_val(LOG_PRECISION, &w_b * &e_b)
        + Float::with_val(LOG_PRECISION, &w_size * &ln_usize(b.len()));
    Ok(CheckReport::log_space("asymmetric_energy", &lhs, Relation::Le, &rhs)
        .with("m", m)
        .with("n", n)
        .with("energy", e))
}

/// |A+B| E(A,B) >= |A|^2 |B|^2.
pub fn check_cauchy_schwarz_sumset(a: &FiniteSet, b: &FiniteSet) -> CheckReport {
    let s = sumset(a, b).len();
    let e = additive_energy(a, b).value;
    let lhs = Integer::from(s) * e;
    let rhs = (Integer::from(a.len()) * Integer::from(b.len())).pow(2);
    CheckReport::exact("cauchy_schwarz_sumset", lhs, Relation::Ge, rhs)
        .with("a", a.len())
        .with("b", b.len())
}

/// E*_2m(A) <= E_2m(A).
pub fn check_nondegenerate_below_full(a: &FiniteSet, m: usize, budget: &Budget) -> Result<CheckReport> {
    let star = nondegenerate_energy(a, m, budget)?.value;
    let full = higher_energy(a, m, budget)?.value;
    Ok(CheckReport::exact("nondegenerate_below_full", star, Relation::Le, full).with("m", m))
}

/// Exact growth quantities of one set; `None` where a budget was hit or a
/// multiplicative quantity is undefined because 0 is in A.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub n: usize,
    pub sums: Option<usize>,
    pub differences: Option<usize>,
    pub products: Option<usize>,
    pub a_plus_aa: Option<usize>,
    /// E(A)
    #[serde(with = "crate::serde_integer::option")]
    pub energy: Option<Integer>,
    pub m_sums: Vec<(usize, Option<usize>)>,
    pub m_products: Vec<(usize, Option<usize>)>,
}

fn soft<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_budget() => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn report_exponents(a: &FiniteSet, ms: &[usize], budget: &Budget) -> Result<ExponentRow> {
    let n = a.len() as u128;
    let pairs_ok = budget.check_enumeration(n * n).is_ok();
    let zero_free = !a.contains_zero();
    let sums = pairs_ok.then(|| sumset(a, a).len());
    let differences = pairs_ok.then(|| difference_set(a, a).len());
    let products = if zero_free && pairs_ok {
        Some(product_set(a, a)?.len())
    } else {
        None
    };
    let energy = pairs_ok.then(|| additive_energy(a, a).value);
    let a_plus_aa = if zero_free {
        soft(a_plus_aa_bounded(a, budget).map(|s| s.len()))?
    } else {
        None
    };
    let mut m_sums = Vec::with_capacity(ms.len());
    let mut m_products = Vec::with_capacity(ms.len());
    for &m in ms {
        m_sums.push((m, soft(iterated_sumset_bounded(a, m, budget).map(|s| s.len()))?));
        let prod = if zero_free {
            soft(iterated_product_bounded(a, m, budget).map(|s| s.len()))?
        } else {
            None
        };
        m_products.push((m, prod));
    }
    Ok(ExponentRow {
        n: a.len(),
        sums,
        differences,
        products,
        a_plus_aa,
        energy,
        m_sums,
        m_products,
    })
}

/// log(x) / log(n) at 256 bits, printed with 12 decimals; `None` when n <= 1.
pub fn log_ratio(x: usize, n: usize) -> Option<String> {
    if n <= 1 || x == 0 {
        return None;
    }
    let r = ln_usize(x) / ln_usize(n);
    Some(format_fixed(&r, 12))
}

pub(crate) fn format_fixed(x: &Float, digits: usize) -> String {
    let scale = Integer::from(10).pow(digits as u32);
    let scaled = Float::with_val(LOG_PRECISION, x * &scale).round();
    let int = scaled.to_integer().expect("finite value");
    let neg = int < 0;
    let abs = int.abs();
    let (whole, frac) = abs.div_rem(scale);
    let frac = frac.to_string();
    format!(
        "{}{}.{}{}",
        if neg { "-" } else { "" },
        whole,
        "0".repeat(digits - frac.len()),
        frac
    )
}

impl ExponentRow {
    /// max(|A+A|, |AA|), when both are known.
    pub fn max_sum_product(&self) -> Option<usize> {
        Some(self.sums?.max(self.products?))
    }

    /// log max(|AA|, |A|^4 / E(A)) / log |A|, printed like [`log_ratio`].
    pub fn log_max_product_energy(&self) -> Option<String> {
        if self.n <= 1 {
            return None;
        }
        let ln_n = ln_usize(self.n);
        let from_energy = Float::with_val(LOG_PRECISION, &ln_n * 4u32) - ln_int(self.energy.as_ref()?);
        let x = ln_usize(self.products?).max(&from_energy);
        Some(format_fixed(&(x / ln_n), 12))
    }
}
