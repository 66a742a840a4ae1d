use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orbit_census::census::{periodic_sum_real, scan_periodic};
use orbit_census::par;
use orbit_census::potential::Potential;
use orbit_census::symbolic::{self, TransitionMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_potential(kappa: usize, depth: usize, seed: u64) -> Potential {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = TransitionMatrix::no_repeat(kappa);
    let cyl = symbolic::Cylinders::new(&a, depth).unwrap();
    let entries: Vec<_> = cyl.words().iter().map(|w| (w.clone(), rng.random_range(0.5..1.5))).collect();
    Potential::from_table(&a, depth, entries).unwrap()
}

fn window_count(f: &Potential, n: usize) -> u64 {
    let c = n as f64;
    scan_periodic(f, n, c - 0.5, c + 0.5, symbolic::DEFAULT_BUDGET, || 0u64, |k, _, _| *k += 1)
        .unwrap()
        .into_iter()
        .sum()
}

fn bench_census(c: &mut Criterion) {
    let f = random_potential(4, 2, 7);
    let mut group = c.benchmark_group("window_count");
    group.sample_size(10);
    for n in [10usize, 13] {
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| window_count(black_box(&f), n))
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| par::sequential(|| window_count(black_box(&f), n)))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("periodic_sum");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| periodic_sum_real(black_box(&f), 12, -0.7, u128::MAX)));
    group.bench_function("sequential", |b| {
        b.iter(|| par::sequential(|| periodic_sum_real(black_box(&f), 12, -0.7, u128::MAX)))
    });
    group.finish();
}

criterion_group!(benches, bench_census);
criterion_main!(benches);
