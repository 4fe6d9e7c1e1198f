use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sumprod_bench::{few_prime, interval, powers_of_two};
use sumprod_core::covering::{cover_pipeline, Variant};
use sumprod_core::energy::{additive_energy, cycle_homomorphism_count, higher_energy};
use sumprod_core::setops::{product_set, sumset};
use sumprod_core::sunit::{count_nondegenerate_solutions, EquationInstance, ExponentBox, GroupSpec};
use sumprod_core::{factor, Budget, ExactRational};

fn sets(c: &mut Criterion) {
    let mut g = c.benchmark_group("setops");
    for n in [100, 300] {
        let geo = powers_of_two(n as u32);
        let rnd = few_prime(n, 7);
        g.bench_with_input(BenchmarkId::new("sumset_geometric", n), &geo, |b, a| b.iter(|| sumset(a, a)));
        g.bench_with_input(BenchmarkId::new("product_set_few_prime", n), &rnd, |b, a| {
            b.iter(|| product_set(a, a).unwrap())
        });
    }
    g.finish();
}

fn energies(c: &mut Criterion) {
    let budget = Budget::default();
    let mut g = c.benchmark_group("energy");
    for n in [50, 200] {
        let a = interval(n);
        g.bench_with_input(BenchmarkId::new("e4_interval", n), &a, |b, a| b.iter(|| additive_energy(a, a)));
        g.bench_with_input(BenchmarkId::new("e6_interval", n), &a, |b, a| {
            b.iter(|| higher_energy(a, 3, &budget).unwrap())
        });
    }
    let a = few_prime(200, 3);
    g.bench_function("e8_few_prime_200", |b| b.iter(|| higher_energy(&a, 4, &budget).unwrap()));
    g.finish();
}

fn cycles(c: &mut Criterion) {
    let budget = Budget::default();
    let a = interval(60);
    let target = sumprod_core::FiniteSet::from_integers((2..=120).step_by(3));
    c.bench_function("cycles_v6_interval_60", |b| {
        b.iter(|| cycle_homomorphism_count(&a, &a, &target, 3, &budget).unwrap())
    });
}

fn covering(c: &mut Criterion) {
    let budget = Budget::default();
    let a = few_prime(300, 11);
    let b = few_prime(60, 12);
    c.bench_function("cover_popular_300", |bn| {
        bn.iter(|| cover_pipeline(&a, &b, 2, 2, Variant::Popular, &budget).unwrap())
    });
}

fn sunit(c: &mut Criterion) {
    let budget = Budget::default();
    let q = |v: i64| ExactRational::from(v);
    let spec = GroupSpec::new(vec![factor(&q(2), 10).unwrap(), factor(&q(3), 10).unwrap()], true).unwrap();
    let eq = EquationInstance::new(q(1), vec![q(1), q(-1), q(1)]).unwrap();
    c.bench_function("sunit_m3_h4", |b| {
        b.iter(|| count_nondegenerate_solutions(black_box(&eq), &spec, ExponentBox::new(4).unwrap(), &budget).unwrap())
    });
}

criterion_group!(benches, sets, energies, cycles, covering, sunit);
criterion_main!(benches);
