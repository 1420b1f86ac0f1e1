//! Data-parallel kernels on a single-thread pool against the default pool.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use matroid_walks::entropy::{estimate_mlsc, exact_mixing_time, SearchConfig};
use matroid_walks::experiment::{bundled, hypercube};
use matroid_walks::matroid::verify_axioms;
use matroid_walks::negdep::{scp_check, BooleanDistribution};
use matroid_walks::walks::bases_exchange;
use rayon::ThreadPool;

fn pools() -> Vec<(&'static str, ThreadPool)> {
    vec![
        ("1-thread", rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("default", rayon::ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn benches(c: &mut Criterion) {
    let k4 = bundled().into_iter().find(|i| i.id == "k4").unwrap().complex;
    let cube = hypercube(8).unwrap().complex;
    let k4_walk = bases_exchange(&k4).unwrap();
    let cube_walk = bases_exchange(&cube).unwrap();
    let mu = BooleanDistribution::from_complex(&hypercube(4).unwrap().complex);
    let search = SearchConfig { restarts: 64, budget: 50, seed: 1 };

    let mut g = c.benchmark_group("parallel_vs_sequential");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new("estimate_mlsc/k4", name), |b| {
            b.iter(|| pool.install(|| estimate_mlsc(&k4_walk, &search).unwrap()))
        });
        g.bench_function(BenchmarkId::new("exact_mixing_time/cube-8", name), |b| {
            b.iter(|| pool.install(|| exact_mixing_time(&cube_walk, 0.25, 10_000).unwrap()))
        });
        g.bench_function(BenchmarkId::new("verify_axioms/cube-8", name), |b| {
            b.iter(|| pool.install(|| verify_axioms(cube.matroid()).unwrap()))
        });
        g.bench_function(BenchmarkId::new("scp_check/cube-4", name), |b| {
            b.iter(|| pool.install(|| scp_check(&mu).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(group, benches);
criterion_main!(group);
