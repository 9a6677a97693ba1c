//! Parallel vs sequential evaluation of the data-parallel inner loops:
//! mismatch sweeps and per-sample entanglement columns.
//!
//! With the default `parallel` feature the first benchmark of each pair
//! runs on the rayon pool; the `*_sequential` one is the reference path.
//! Build with `--no-default-features` to compare the fallback build.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use twinbeam::dynamics::{MediumParams, MomentState};
use twinbeam::gaussian::{eof_along, log_negativity_along};
use twinbeam::propagation::integrate;
use twinbeam::sweep::{run_sweep, run_sweep_sequential, Objective, SweepAxis, SweepSpec};

fn mismatch_sweep_spec(points: usize) -> SweepSpec {
    let grid = (0..points).map(|k| -14.0 + 28.0 * k as f64 / (points - 1) as f64).collect();
    SweepSpec {
        axis: SweepAxis::DeltaK,
        grid,
        base: MediumParams::new(1.0, 0.0, 0.0, 22.7, 1.0).unwrap(),
        horizon: None,
        objective: Objective::FinalIntensity,
    }
}

fn bench_sweep(c: &mut Criterion) {
    let spec = mismatch_sweep_spec(512);
    let mut group = c.benchmark_group("mismatch_sweep_512");
    group.bench_function("parallel_feature", |b| {
        b.iter_batched(|| spec.clone(), |s| run_sweep(&s).unwrap(), BatchSize::SmallInput)
    });
    group.bench_function("sequential", |b| {
        b.iter_batched(
            || spec.clone(),
            |s| run_sweep_sequential(&s).unwrap(),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

fn bench_entanglement_columns(c: &mut Criterion) {
    let params = MediumParams::new(1.0, 11.5, 0.0, 22.7, 0.8).unwrap();
    let traj = integrate(&MomentState::vacuum(), &params, 96).unwrap();

    let mut group = c.benchmark_group("entanglement_columns_97");
    group.sample_size(10);
    group.bench_function("log_negativity", |b| {
        b.iter(|| log_negativity_along(&traj))
    });
    group.bench_function("eof_parallel_feature", |b| {
        b.iter(|| eof_along(&traj, 1e-8).unwrap())
    });
    group.bench_function("eof_sequential", |b| {
        b.iter(|| {
            traj.states
                .iter()
                .map(|s| {
                    twinbeam::gaussian::entanglement_of_formation(
                        &twinbeam::gaussian::covariance_from_moments(s),
                        1e-8,
                    )
                    .unwrap()
                })
                .collect::<Vec<_>>()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_entanglement_columns);
criterion_main!(benches);
