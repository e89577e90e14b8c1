//! Hot paths under criterion: exact transport on each solver family
//! (sorted sweep, circle cut search, planar flow), the two resolution
//! counters, and one entropy scan. Inputs are fixed-seed so numbers are
//! comparable across runs and machines.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use emergence_bench::{random_dirac_cloud, random_measure};
use emergence_core::{
    measure_space_covering_bounds, metric_emergence, periodic_points, quantization_number,
    topological_entropy, w1_distance, DiscreteMeasure, DynamicalSystem, PointSpace,
};

fn transport(c: &mut Criterion) {
    let mut group = c.benchmark_group("w1_distance");
    for (space, atoms) in [
        (PointSpace::UnitInterval, 256),
        (PointSpace::Circle, 256),
        (PointSpace::Torus2, 96),
    ] {
        let a = random_measure(space, atoms, 21);
        let b = random_measure(space, atoms, 22);
        group.bench_with_input(
            BenchmarkId::new(space.name(), atoms),
            &(a, b),
            |bench, (a, b)| bench.iter(|| w1_distance(black_box(a), black_box(b)).unwrap()),
        );
    }
    group.finish();
}

fn resolution(c: &mut Criterion) {
    let lattice = DiscreteMeasure::uniform_lattice(PointSpace::UnitInterval, 1001).unwrap();
    c.bench_function("quantization_number/lattice_1001", |b| {
        b.iter(|| quantization_number(black_box(&lattice), black_box(0.05)).unwrap())
    });

    let cloud = random_dirac_cloud(PointSpace::UnitInterval, 48, 23);
    c.bench_function("metric_emergence/diracs_48", |b| {
        b.iter(|| metric_emergence(black_box(&cloud), black_box(0.1)).unwrap())
    });

    c.bench_function("covering_bounds/interval_0.2", |b| {
        b.iter(|| {
            measure_space_covering_bounds(PointSpace::UnitInterval, black_box(0.2), 1600).unwrap()
        })
    });
}

fn dynamics(c: &mut Criterion) {
    let doubling = DynamicalSystem::mul_k(2).unwrap();
    c.bench_function("topological_entropy/mul_2_small", |b| {
        b.iter(|| topological_entropy(black_box(&doubling), &[0.1], &[2, 3, 4], 2048).unwrap())
    });
    c.bench_function("periodic_points/mul_2_n12", |b| {
        b.iter(|| periodic_points(black_box(&doubling), black_box(12)).unwrap())
    });
}

criterion_group!(benches, transport, resolution, dynamics);
criterion_main!(benches);
