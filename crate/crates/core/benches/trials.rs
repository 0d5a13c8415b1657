use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eja_core::{run_suite, Parallelism, SuiteConfig, SuiteId};

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    let cases = [(SuiteId::Thm31a, "sym:4"), (SuiteId::Thm31b, "spin:6"), (SuiteId::Cor33, "sym:5")];
    let modes = [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Parallel { jobs: None })];
    for (id, alg) in cases {
        for (label, mode) in modes {
            let mut cfg = SuiteConfig::new(alg.parse().unwrap(), 100, 1);
            cfg.parallelism = mode;
            group.bench_with_input(BenchmarkId::new(format!("{id}/{alg}"), label), &cfg, |b, cfg| {
                b.iter(|| run_suite(id, cfg).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, suites);
criterion_main!(benches);
