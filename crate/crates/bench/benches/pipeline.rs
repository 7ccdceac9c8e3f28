use std::f64::consts::{FRAC_PI_2, TAU};
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use twinbeam_core::acquisition::simulate_run;
use twinbeam_core::conditioning::accumulate_segments;
use twinbeam_core::tomography::{
    fock_diagonal, fock_pdf, inverse_radon_symmetric, oracle_conditioned_state, pattern_diag, FilterSpec, GridSpec,
    OracleParams, PatternFunctions,
};
use twinbeam_core::*;

fn sampling(c: &mut Criterion) {
    let spec = SqueezerSpec::new(6.0, 8.5).unwrap();
    let state = GaussianTwoModeState::entangled_pair(&spec, FRAC_PI_2).unwrap();
    let detector = DetectorModel::new(0.95, 20.0, 0.03).unwrap();
    let mut group = c.benchmark_group("sampling");
    let n = 262_144;
    group.throughput(Throughput::Elements(n as u64));
    group.bench_function("locked_records", |b| {
        b.iter(|| simulate_run(&state, LockedSettings::criteria(n / 2), &detector, 1).unwrap().map(|r| r.q_a).sum::<f64>())
    });
    group.bench_function("scan_and_condition", |b| {
        let plan = ScanPlan::new(4, n / 4, 4, 3.0 * TAU).unwrap();
        b.iter(|| {
            let records = simulate_run(&state, plan, &detector, 1).unwrap();
            accumulate_segments(records, Binning::default(), Calibration::Unit)
        })
    });
    group.finish();
}

fn pattern_functions(c: &mut Criterion) {
    c.bench_function("pattern_table_n30", |b| b.iter(|| PatternFunctions::new(black_box(30)).unwrap()));
    let mut group = c.benchmark_group("pattern_eval");
    for n in [1usize, 10, 30] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| pattern_diag(n, black_box(1.2345)).unwrap()));
    }
    group.finish();
    let density = QuadratureDensity::from_fn(-6.0, 6.0, 201, |q| fock_pdf(1, q).unwrap());
    c.bench_function("fock_diagonal_201_bins_n10", |b| b.iter(|| fock_diagonal(black_box(&density), 10).unwrap()));
}

fn backprojection(c: &mut Criterion) {
    let density = QuadratureDensity::from_fn(-6.0, 6.0, 201, |q| fock_pdf(1, q).unwrap());
    let mut group = c.benchmark_group("inverse_radon_symmetric");
    group.sample_size(20);
    for points in [81usize, 101] {
        let grid = GridSpec { extent: 5.0, points };
        group.bench_with_input(BenchmarkId::from_parameter(points), &grid, |b, grid| {
            b.iter(|| inverse_radon_symmetric(black_box(&density), grid, &FilterSpec::default()).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let params = OracleParams { eta_a: 0.85, eta_b: 0.85, dark_variance: 0.01, ..OracleParams::ideal(0.3) };
    c.bench_function("oracle_conditioned_state", |b| b.iter(|| oracle_conditioned_state(black_box(&params), 10).unwrap()));
}

criterion_group!(benches, sampling, pattern_functions, backprojection, oracle);
criterion_main!(benches);
