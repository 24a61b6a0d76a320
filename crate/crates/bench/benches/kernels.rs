use std::hint::black_box;

use boundary_lab_bench::lipschitz_sample;
use boundary_lab_core::{
    estimate_functional, sample_ppp, BoundaryFunction, Envelope, FunctionalSpec, HolderClass, ModelConfig,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn sampling(c: &mut Criterion) {
    let holder = HolderClass::new(0.5, 1.0).unwrap();
    let mut group = c.benchmark_group("sample_ppp");
    for n in [256u64, 4096] {
        let config = ModelConfig::new(n, BoundaryFunction::power_ball(holder), holder).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &config, |b, config| {
            let mut seed = 0;
            b.iter(|| {
                seed += 1;
                sample_ppp(config, 3.0, seed).unwrap()
            })
        });
    }
    group.finish();
}

fn envelope(c: &mut Criterion) {
    let mut group = c.benchmark_group("envelope");
    for n in [256u64, 4096] {
        let (sample, holder) = lipschitz_sample(n, 1).unwrap();
        group.bench_with_input(BenchmarkId::new("build", n), &sample, |b, s| {
            b.iter(|| Envelope::new(black_box(s), holder).unwrap())
        });
        let env = Envelope::new(&sample, holder).unwrap();
        group.bench_with_input(BenchmarkId::new("evaluate_grid", n), &env, |b, env| {
            b.iter(|| env.evaluate_grid(8192))
        });
    }
    group.finish();
}

fn estimate(c: &mut Criterion) {
    let spec = FunctionalSpec::power(2.0).unwrap();
    let mut group = c.benchmark_group("estimate_functional");
    for n in [256u64, 4096] {
        let (sample, holder) = lipschitz_sample(n, 2).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &sample, |b, s| {
            b.iter(|| estimate_functional(s, holder, &spec, 8192).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sampling, envelope, estimate);
criterion_main!(benches);
