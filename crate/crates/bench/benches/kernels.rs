use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hardlimit_bench::{figure_grid, small_experiment, typical_counts};
use hardlimit_core::bounds::{self, HybridPrior, SystemPoint};
use hardlimit_core::estimators::{self, SolverOptions};
use hardlimit_core::gauss::{log_phi, qfunc, qfunc_inv};
use hardlimit_core::harness::{run_monte_carlo, sweep_loss};
use hardlimit_core::{GaussHermite, LossKind, LossMeasure, Mode, QuadratureSpec, Receiver};

fn gauss_kernels(c: &mut Criterion) {
    c.bench_function("qfunc", |b| b.iter(|| qfunc(black_box(1.3))));
    c.bench_function("qfunc_inv", |b| b.iter(|| qfunc_inv(black_box(0.0123))));
    c.bench_function("log_phi tail", |b| b.iter(|| log_phi(black_box(12.5))));
}

fn bounds_engine(c: &mut Criterion) {
    let p = SystemPoint::new(0.5, 0.3, 1000).unwrap();
    c.bench_function("crlb_1bit_unknown", |b| b.iter(|| bounds::crlb_1bit_unknown(black_box(&p))));
    c.bench_function("gauss_hermite rule (80)", |b| b.iter(|| GaussHermite::new(black_box(80))));
    let prior = HybridPrior::from_snr_db(-5.0).unwrap();
    let quad = QuadratureSpec::default();
    c.bench_function("loss_hybrid", |b| b.iter(|| bounds::loss_hybrid(black_box(0.4), &prior, &quad)));
    let (alpha, snr) = figure_grid();
    c.bench_function("sweep hybrid chi table", |b| {
        b.iter(|| sweep_loss(LossKind::new(LossMeasure::Chi, Mode::Hybrid), &alpha, &snr, &quad))
    });
}

fn estimators_bench(c: &mut Criterion) {
    let counts = typical_counts();
    let prior = HybridPrior::new(0.3).unwrap();
    let opts = SolverOptions::default();
    c.bench_function("onebit_jmle", |b| b.iter(|| estimators::onebit_jmle(black_box(&counts))));
    c.bench_function("onebit_jmapmle", |b| b.iter(|| estimators::onebit_jmapmle(black_box(&counts), &prior, &opts)));
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(20);
    for receiver in [Receiver::Ideal, Receiver::OnebitUnknown] {
        let cfg = small_experiment(receiver);
        group.bench_function(format!("{receiver:?} 64 trials"), |b| b.iter(|| run_monte_carlo(&cfg)));
    }
    group.finish();
}

criterion_group!(benches, gauss_kernels, bounds_engine, estimators_bench, monte_carlo);
criterion_main!(benches);
