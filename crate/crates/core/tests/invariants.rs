use proptest::prelude::*;
use rug::Integer;
use sumprod_core::covering::{cover_pipeline, m_covered_check, Variant};
use sumprod_core::energy::{additive_energy, convolve, higher_energy, nondegenerate_energy};
use sumprod_core::families::{geometric, random_few_prime};
use sumprod_core::setops::{dilate, product_set, sumset};
use sumprod_core::sunit::{quotient_graph, stabilization_scan, EquationInstance, ExponentBox, GroupSpec};
use sumprod_core::{factor, Budget, ExactRational, FiniteSet, PrimePool};

fn small_set(max: i64, len: usize) -> impl Strategy<Value = FiniteSet> {
    prop::collection::vec((-max..=max).prop_filter("nonzero", |v| *v != 0), 1..=len)
        .prop_map(FiniteSet::from_integers)
}

fn rational() -> impl Strategy<Value = ExactRational> {
    (-5000i64..=5000, 1i64..=5000)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(ExactRational::from)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factor_round_trip(x in rational()) {
        let f = factor(&x, 10_000).unwrap();
        prop_assert_eq!(f.to_exact(), x);
    }

    #[test]
    fn valuations_add(x in rational(), y in rational()) {
        let fx = factor(&x, 10_000).unwrap();
        let fy = factor(&y, 10_000).unwrap();
        let fxy = fx.mul(&fy);
        for p in fx.support().chain(fy.support()) {
            prop_assert_eq!(fxy.nu(p), fx.nu(p) + fy.nu(p));
        }
        prop_assert_eq!(fxy.to_exact(), factor(&rug::Rational::from(x.as_rational() * y.as_rational()).into(), 10_000).unwrap().to_exact());
    }

    #[test]
    fn s_free_part_reconstructs(x in rational(), picks in prop::collection::vec(0usize..6, 0..4)) {
        let pool = PrimePool::first(6);
        let mut s: Vec<_> = picks.iter().map(|&i| pool.primes()[i]).collect();
        s.sort_unstable();
        s.dedup();
        let f = factor(&x, 10_000).unwrap();
        let (free, inside) = f.s_free_part(&s);
        prop_assert!(inside.in_qs(&s));
        prop_assert!(free.support().all(|p| !s.contains(&p)));
        prop_assert_eq!(free.mul(&inside).to_exact(), x);
    }

    #[test]
    fn sumset_commutes_and_associates(a in small_set(40, 8), b in small_set(40, 8), c in small_set(40, 6)) {
        prop_assert_eq!(sumset(&a, &b), sumset(&b, &a));
        prop_assert_eq!(sumset(&sumset(&a, &b), &c), sumset(&a, &sumset(&b, &c)));
        prop_assert!(sumset(&a, &b).len() <= a.len() * b.len());
    }

    #[test]
    fn dilation_invariance(a in small_set(40, 10), t in rational()) {
        let ta = dilate(&t, &a).unwrap();
        prop_assert_eq!(sumset(&ta, &ta).len(), sumset(&a, &a).len());
        prop_assert_eq!(additive_energy(&ta, &ta).value, additive_energy(&a, &a).value);
        prop_assert_eq!(product_set(&ta, &ta).unwrap().len(), product_set(&a, &a).unwrap().len());
    }

    #[test]
    fn geometric_product_set(idx in 0usize..5, n in 1u32..30, negative in any::<bool>()) {
        let q = [2i64, 3, 5, 6, 10][idx];
        let q = ExactRational::from(if negative { -q } else { q });
        let g = geometric(&factor(&q, 100).unwrap(), n).unwrap();
        prop_assert_eq!(g.len(), n as usize);
        prop_assert_eq!(product_set(&g, &g).unwrap().len(), 2 * n as usize - 1);
    }

    #[test]
    fn parseval(a in small_set(30, 12), b in small_set(30, 12)) {
        let conv = convolve(&a, &b);
        prop_assert_eq!(conv.total_mass(), Integer::from(a.len() * b.len()));
        prop_assert_eq!(conv.sum_of_squares(), additive_energy(&a, &b).value);
    }

    #[test]
    fn nondegenerate_below_full(a in small_set(20, 7)) {
        let budget = Budget::default();
        for m in 1..=2 {
            let full = higher_energy(&a, m, &budget).unwrap();
            let star = nondegenerate_energy(&a, m, &budget).unwrap();
            prop_assert!(star.value <= full.value);
            prop_assert!(full.within_trivial_bounds(a.len()));
        }
    }

    #[test]
    fn cover_pipeline_invariants(seed in any::<u64>(), size in 4usize..24, k in 1usize..=3, l in 1usize..=3, chain in any::<bool>()) {
        let pool = PrimePool::first(8);
        let a = random_few_prime(&pool, k, 4, size, seed, true).unwrap();
        let b = random_few_prime(&pool, l, 2, 10, seed ^ 0x5eed, true).unwrap();
        let variant = if chain { Variant::Chain } else { Variant::Popular };
        let cert = match cover_pipeline(&a, &b, k, l, variant, &Budget::default()) {
            Ok(c) => c,
            Err(e) => {
                prop_assert!(matches!(e, sumprod_core::Error::HypothesisViolated(_)), "{e}");
                return Ok(());
            }
        };
        prop_assert!(cert.all_hold(), "{:?}", cert.checks.iter().filter(|c| !c.passes()).collect::<Vec<_>>());
        let a_prime = cert.a_prime_set();
        prop_assert!(a_prime.is_subset(&a));
        let witness = m_covered_check(&a_prime.with_factorizations(1000).unwrap(), &cert.s, &cert.c_set()).unwrap();
        prop_assert!(witness.covered());
        prop_assert_eq!(cert.cover_ratio, cert.c.len());
    }

    #[test]
    fn scan_is_monotone(c1 in 1i64..=4, c2 in 1i64..=4, s1 in any::<bool>(), s2 in any::<bool>()) {
        let spec = GroupSpec::new(
            vec![factor(&2.into(), 10).unwrap(), factor(&3.into(), 10).unwrap()],
            true,
        ).unwrap();
        let coeffs = vec![
            ExactRational::from(if s1 { c1 } else { -c1 }),
            ExactRational::from(if s2 { c2 } else { -c2 }),
        ];
        let eq = EquationInstance::new(ExactRational::from(1), coeffs).unwrap();
        let scan = stabilization_scan(&eq, &spec, &[1, 2, 3], &Budget::default()).unwrap();
        prop_assert!(scan.is_monotone());
    }
}

#[test]
fn quotient_graph_reverses_under_negation() {
    let spec = GroupSpec::new(vec![factor(&2.into(), 10).unwrap()], true).unwrap();
    let b = FiniteSet::from_integers([1, 3, 5, 6]);
    let boxed = ExponentBox::new(3).unwrap();
    let x = ExactRational::from(1);
    let budget = Budget::default();
    let g = quotient_graph(&b, &spec, boxed, &x, &budget).unwrap();
    let h = quotient_graph(&b, &spec, boxed, &-&x, &budget).unwrap();
    let mut forward: Vec<_> = g.edges.iter().map(|e| (e.from.clone(), e.to.clone(), e.solutions)).collect();
    let mut reversed: Vec<_> = h.edges.iter().map(|e| (e.to.clone(), e.from.clone(), e.solutions)).collect();
    forward.sort();
    reversed.sort();
    assert_eq!(forward, reversed);
    assert!(g.edge_count > 0);
}
