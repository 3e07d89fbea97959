//! Sequential against parallel execution of the grid-shaped kernels.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use toeplitz_core::bm::{bm_density, DensityOptions, SequenceSpec};
use toeplitz_core::debranges::{clark_basis_gram, HBFunction};
use toeplitz_core::grid::linspace;
use toeplitz_core::inner::arg_grid;
use toeplitz_core::{Exec, MifDescriptor, ZeroGenerator, ZeroRule};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn argument_grid(c: &mut Criterion) {
    let rule = ZeroRule::Arith { step: 1.0, offset: 0.0, height: 1.0 };
    let desc = MifDescriptor::from_generator(ZeroGenerator::symmetric(rule, 500).unwrap()).materialized();
    let xs = linspace(-200.0, 200.0, 4001);
    let mut g = c.benchmark_group("arg_grid");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(arg_grid(&desc, &xs, exec)))
        });
    }
    g.finish();
}

fn gram(c: &mut Criterion) {
    let e = HBFunction::paley_wiener(std::f64::consts::PI);
    let mut g = c.benchmark_group("clark_basis_gram");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(clark_basis_gram(&e, Complex64::new(1.0, 0.0), (-60.5, 60.5), exec).unwrap()))
        });
    }
    g.finish();
}

fn density(c: &mut Criterion) {
    let mut g = c.benchmark_group("bm_density");
    g.sample_size(10);
    let sample = SequenceSpec::Arith(1.0).sample(1 << 12);
    for (name, exec) in MODES {
        let opts = DensityOptions { budget: 1 << 12, exec, ..DensityOptions::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| black_box(bm_density(&sample, opts).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, argument_grid, gram, density);
criterion_main!(benches);
