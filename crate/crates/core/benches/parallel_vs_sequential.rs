use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use latmax::bodies::Body;
use latmax::ergodic::{ergodic_average_with, CyclicSystem};
use latmax::lattice::{fft_forward_in_place, GridFunction};
use latmax::par::Execution;
use num_complex::Complex64;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn fft(c: &mut Criterion) {
    let (dim, side) = (3, 64);
    let values = (0..side * side * side)
        .map(|i| Complex64::new((i as f64 * 0.37).sin(), 0.0))
        .collect();
    let grid = GridFunction::from_values(dim, side, values).unwrap();
    let mut group = c.benchmark_group("fft_64^3");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                let mut g = grid.clone();
                fft_forward_in_place(&mut g, exec);
                black_box(g)
            })
        });
    }
    group.finish();
}

fn ergodic(c: &mut Criterion) {
    let sys = CyclicSystem::from_fn(2, 128, |x| ((x[0] * 7 + x[1] * 3) % 11) as f64).unwrap();
    let cube = Body::cube(2).unwrap();
    let mut group = c.benchmark_group("ergodic_average_128^2_t4");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(ergodic_average_with(&sys, &cube, 4.0, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, fft, ergodic);
criterion_main!(benches);
