use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tailgf::limits::yaglom;
use tailgf::sim::{simulate, SimConfig};
use tailgf::{f_implicit, f_ode, tail_gf, OffspringLaw, PsiKernel};
use tailgf_bench::fixtures;

fn tail_gfs(c: &mut Criterion) {
    let mut g = c.benchmark_group("tail_gf");
    for (name, law) in fixtures() {
        g.bench_function(format!("{name}/spread"), |b| {
            b.iter(|| tail_gf(&law, black_box(&[0.1, 0.5, 0.9, 1.3])).unwrap())
        });
        g.bench_function(format!("{name}/confluent"), |b| {
            b.iter(|| tail_gf(&law, black_box(&[0.5, 0.5, 0.5])).unwrap())
        });
    }
    g.finish();
}

fn transition(c: &mut Criterion) {
    let mut g = c.benchmark_group("transition");
    for (name, law) in fixtures() {
        let kernel = PsiKernel::new(&law).unwrap();
        g.bench_function(format!("{name}/ode"), |b| {
            b.iter(|| f_ode(&law, black_box(5.0), 0.4).unwrap())
        });
        g.bench_function(format!("{name}/implicit"), |b| {
            b.iter(|| f_implicit(&kernel, black_box(5.0), 0.4).unwrap())
        });
    }
    g.finish();
}

fn limits(c: &mut Criterion) {
    let law = OffspringLaw::mlf_from_shape(0.5, 2.0, 0.6, 0.5).unwrap();
    let kernel = PsiKernel::new(&law).unwrap();
    c.bench_function("yaglom/mlf/200", |b| {
        b.iter(|| yaglom(&kernel, black_box(200)).unwrap())
    });
}

fn simulation(c: &mut Criterion) {
    let law = OffspringLaw::finite(vec![0.4, 0.0, 0.4], 0.2).unwrap();
    let config = SimConfig::new(law, 10_000, 1).with_times(&[1.0, 3.0]);
    let mut g = c.benchmark_group("simulate");
    g.sample_size(10);
    g.bench_function("binary/10k", |b| {
        b.iter(|| simulate(black_box(&config)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, tail_gfs, transition, limits, simulation);
criterion_main!(benches);
