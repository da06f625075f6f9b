use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tscv::identities::IdentitySuite;
use tscv::{
    Certificate, CertifyOptions, DeltaNablaProblem, Execution, ExprLagrangian, ProbeOptions, SolveOptions,
    TimeScale,
};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn interval_problem(n: usize) -> DeltaNablaProblem {
    let ts = TimeScale::sampled_interval(0.0, 2.0, n).unwrap();
    let l = ExprLagrangian::parse("exp(v/2) + y^2 + t*y").unwrap().shared();
    let m = ExprLagrangian::parse("t*v^2 + y^2").unwrap().shared();
    DeltaNablaProblem::new(ts, 1.0, 0.5, l, m, 0.0, 1.0).unwrap()
}

fn identity_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("identity_suite");
    let suite = IdentitySuite::default();
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(suite.run(exec).unwrap()))
        });
    }
    group.finish();
}

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(20);
    for n in [16, 64] {
        let p = interval_problem(n);
        for (name, exec) in MODES {
            let opts = SolveOptions {
                exec,
                ..SolveOptions::default()
            };
            group.bench_with_input(BenchmarkId::new(name, n), &opts, |b, opts| {
                b.iter(|| black_box(p.solve(opts).unwrap()))
            });
        }
    }
    group.finish();
}

fn certify_and_probe(c: &mut Criterion) {
    let p = interval_problem(64);
    let sol = p.solve(&SolveOptions::default()).unwrap();
    assert_eq!(sol.certificate, Certificate::GlobalMin);
    let mut group = c.benchmark_group("certify");
    for (name, exec) in MODES {
        let opts = CertifyOptions::with_exec(exec);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(p.certify(&sol, &opts)))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("local_min_probe");
    for (name, exec) in MODES {
        let opts = ProbeOptions {
            exec,
            ..ProbeOptions::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(p.local_min_probe(&sol, &opts).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, identity_suite, solve, certify_and_probe);
criterion_main!(benches);
