use std::f64::consts::TAU;

use twinbeam_core::acquisition::{read_records, simulate_run, write_records};
use twinbeam_core::conditioning::{accumulate_segments, pooled, uniformity_test, WeightSource};
use twinbeam_core::criteria::estimate_from_records;
use twinbeam_core::tomography::fock_diagonal_with_errors;
use twinbeam_core::*;

fn plan() -> ScanPlan {
    ScanPlan::new(6, 20_000, 4, 3.0 * TAU).unwrap()
}

#[test]
fn binary_files_reproduce_the_streamed_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.bin");
    let state = GaussianTwoModeState::tmss(0.3).unwrap();
    let detector = DetectorModel::new(0.9, 20.0, 0.0).unwrap();
    let n = write_records(simulate_run(&state, plan(), &detector, 7).unwrap(), &path, RecordFormat::Binary).unwrap();
    assert_eq!(n, 120_000);

    let from_file = accumulate_segments(read_records(&path).unwrap(), Binning::default(), Calibration::Unit);
    let streamed = accumulate_segments(simulate_run(&state, plan(), &detector, 7).unwrap(), Binning::default(), Calibration::Unit);
    assert_eq!(from_file, streamed);
    assert_eq!(from_file.len(), 6);
    assert!(from_file.iter().all(|h| h.total_count() == 20_000));
}

#[test]
fn text_files_keep_nine_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.csv");
    let state = GaussianTwoModeState::tmss(0.5).unwrap();
    let records: Vec<_> = simulate_run(&state, LockedSettings::criteria(10_000), &DetectorModel::ideal(), 3).unwrap().collect();
    write_records(records.iter().copied(), &path, RecordFormat::Csv).unwrap();
    let back = read_records(&path).unwrap();
    assert_eq!(back.len(), records.len());
    for (a, b) in records.iter().zip(&back) {
        assert_eq!(a.index, b.index);
        assert!((a.q_a - b.q_a).abs() <= 1e-8 * a.q_a.abs().max(1e-300));
    }
    let direct = estimate_from_records(&records).unwrap();
    let via_file = estimate_from_records(&back).unwrap();
    assert!((direct.reid_product - via_file.reid_product).abs() < 1e-7);
}

#[test]
fn histogram_text_preserves_reconstruction() {
    let state = GaussianTwoModeState::tmss(0.2).unwrap();
    let segments = accumulate_segments(simulate_run(&state, plan(), &DetectorModel::ideal(), 11).unwrap(), Binning::default(), Calibration::Unit);
    let text: String = segments.iter().map(|h| h.to_text()).collect();
    let parsed = WeightedHistogram::parse_all(&text).unwrap();
    assert_eq!(parsed, segments);

    let a = fock_diagonal_with_errors(&pooled(&segments).unwrap(), 3).unwrap();
    let b = fock_diagonal_with_errors(&pooled(&parsed).unwrap(), 3).unwrap();
    assert_eq!(a, b);
    let ua = uniformity_test(&segments, WeightSource::Conditioned).unwrap();
    let ub = uniformity_test(&parsed, WeightSource::Conditioned).unwrap();
    assert_eq!(ua, ub);
}

#[test]
fn vacuum_records_cannot_be_conditioned() {
    let segments = accumulate_segments(
        simulate_run(&GaussianTwoModeState::vacuum(), plan(), &DetectorModel::ideal(), 5).unwrap(),
        Binning::default(),
        Calibration::Unit,
    );
    assert!(matches!(pooled(&segments).unwrap().normalize(), Err(Error::DegenerateConditioning(_))));
}
