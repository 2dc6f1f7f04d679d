//! Parallel vs sequential replication throughput.
//!
//! `run_replications` fans replications out over rayon when the crate's
//! default `parallel` feature is enabled; `run_replications_sequential` is
//! the single-threaded path. Built with `--no-default-features` the two
//! coincide, which makes the comparison a direct measure of the rayon win.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use robust_cs::simulate::{
    dist::DistributionSpec, ContaminationSpec, ExperimentConfig, Method, QuerySchedule,
    ScheduleSpec, run_replications, run_replications_sequential,
};
use robust_cs::RcsConfig;

fn bench_config() -> ExperimentConfig {
    ExperimentConfig {
        model: ContaminationSpec::HuberMixture {
            clean: DistributionSpec::gaussian(0.0, 9.0),
            contaminant: DistributionSpec::stable(0.75, 0.5, 0.0, 1.0),
            epsilon: 1.0 / 9.0,
        },
        method: Method::Rcs,
        cfg: RcsConfig::with_variance(9.0, 1.0 / 9.0, 0.05).unwrap(),
        lambda: Some(ScheduleSpec::Constant { value: 1.0 / 18.0 }),
        horizon: 2_000,
        n_reps: 32,
        base_seed: 99,
        query: QuerySchedule::Geometric { ratio: 1.2 },
        running_intersection: false,
        delta: 0.1,
        tol: None,
    }
}

fn bench_replications(c: &mut Criterion) {
    let config = bench_config();
    let mut group = c.benchmark_group("run_replications");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| run_replications(black_box(&config)).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| run_replications_sequential(black_box(&config)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_replications);
criterion_main!(benches);
