use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nte_bench::{disk_problem, milne_problem};
use nte_core::milne::{solve_milne, trace_characteristic, MilneOptions};
use nte_core::transport::{solve_transport, SolveMethod, SolverOptions};

fn transport(c: &mut Criterion) {
    let mut g = c.benchmark_group("transport");
    g.sample_size(10);
    for eps in [0.1, 0.025] {
        for (name, acceleration) in [("dsa", true), ("plain", false)] {
            let p = disk_problem(
                eps,
                SolverOptions {
                    acceleration,
                    max_iterations: 100_000,
                    ..SolverOptions::default()
                },
            );
            g.bench_with_input(BenchmarkId::new(name, eps), &p, |b, p| {
                b.iter(|| solve_transport(p).unwrap())
            });
        }
        let p = disk_problem(
            eps,
            SolverOptions {
                method: SolveMethod::Direct,
                ..SolverOptions::default()
            },
        );
        g.bench_with_input(BenchmarkId::new("direct", eps), &p, |b, p| {
            b.iter(|| solve_transport(p).unwrap())
        });
    }
    g.finish();
}

fn milne(c: &mut Criterion) {
    let mut g = c.benchmark_group("milne");
    g.sample_size(10);
    for n in [32, 64] {
        let p = milne_problem(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| solve_milne(p, &MilneOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn characteristics(c: &mut Criterion) {
    c.bench_function("trace non-convex", |b| {
        b.iter(|| trace_characteristic(0.1, -1.0, (2.0, -0.7), -40.0, 0.005))
    });
}

criterion_group!(benches, transport, milne, characteristics);
criterion_main!(benches);
