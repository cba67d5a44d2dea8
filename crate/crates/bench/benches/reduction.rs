use atropos_bench::formulas;
use atropos_core::{compile, validate_output, verify_reduction};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn compile_bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("compile");
    for (name, f) in formulas() {
        for k in [2, 3] {
            g.bench_with_input(BenchmarkId::new(format!("k{k}"), name), &f, |b, f| {
                b.iter(|| black_box(compile(f, k).unwrap()))
            });
        }
    }
    g.finish();
}

fn validate_bench(c: &mut Criterion) {
    let (name, f) = formulas().pop().unwrap();
    let out = compile(&f, 2).unwrap();
    c.bench_function(&format!("validate/{name}"), |b| b.iter(|| black_box(validate_output(&out, 2))));
}

fn verify_bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    for (name, f) in formulas().into_iter().take(3) {
        g.bench_with_input(BenchmarkId::new("k2", name), &f, |b, f| {
            b.iter(|| black_box(verify_reduction(f, 2).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, compile_bench, validate_bench, verify_bench);
criterion_main!(benches);
