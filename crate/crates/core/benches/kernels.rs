//! Parallel and sequential execution of the ensemble kernels.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ibt_core::limits::{birkhoff_ensemble, correlation, Norming, Observable};
use ibt_core::{make_beta_icf, Execution, IbtMap, StableParams};

const EXECS: [(&str, Execution); 2] = [("rayon", Execution::Auto), ("sequential", Execution::Sequential)];

fn birkhoff(c: &mut Criterion) {
    let map = IbtMap::new(&make_beta_icf(2.0, 2.0).unwrap()).unwrap();
    let obs = Observable::linear_x(-1.0);
    let mut g = c.benchmark_group("birkhoff_ensemble");
    g.sample_size(10);
    for (name, exec) in EXECS {
        g.bench_function(BenchmarkId::new(name, "n=1000,traj=4096"), |b| {
            b.iter(|| birkhoff_ensemble(&obs, &map, 1000, 4096, Norming::Sqrt, 1, exec).unwrap())
        });
    }
    g.finish();
}

fn correlations(c: &mut Criterion) {
    let map = IbtMap::new(&make_beta_icf(1.0, 1.0).unwrap()).unwrap();
    let obs = Observable::linear_y(1.0);
    let ks: Vec<usize> = (0..=200).step_by(10).collect();
    let mut g = c.benchmark_group("correlation");
    g.sample_size(10);
    for (name, exec) in EXECS {
        g.bench_function(BenchmarkId::new(name, "k<=200,samples=20000"), |b| {
            b.iter(|| correlation(&obs, &obs, &map, &ks, 20_000, 2, exec).unwrap())
        });
    }
    g.finish();
}

fn stable_sampling(c: &mut Criterion) {
    let sp = StableParams::new(1.5, 1.0, 0.3).unwrap();
    let mut g = c.benchmark_group("stable_sample");
    for (name, exec) in EXECS {
        g.bench_function(BenchmarkId::new(name, "n=1e6"), |b| b.iter(|| black_box(sp.sample(3, 1_000_000, exec))));
    }
    g.finish();
}

criterion_group!(benches, birkhoff, correlations, stable_sampling);
criterion_main!(benches);
