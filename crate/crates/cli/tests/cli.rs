use std::path::Path;
use std::process::{Command, Output};

fn twinbeam(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twinbeam")).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = twinbeam(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.split_once(" = ").filter(|(k, _)| k.trim() == key).map(|(_, v)| v.trim().to_string()))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .parse()
        .unwrap()
}

fn fock_row(text: &str, n: usize) -> Vec<String> {
    let prefix = format!("{n},");
    let line = text.lines().find(|l| l.starts_with(&prefix)).unwrap_or_else(|| panic!("no row {n} in\n{text}"));
    line.split(',').map(str::to_string).collect()
}

const IDEAL: &str = "[detector]\nefficiency = 1.0\ndark_clearance_db = inf\n";

fn write(dir: &Path, name: &str, contents: &str) {
    std::fs::write(dir.join(name), contents).unwrap();
}

#[test]
fn analytic_criteria_for_the_default_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["criteria", "--analytic"]);
    assert!((value(&out, "duan_normalized") - 0.29863).abs() < 1e-5);
    assert!((value(&out, "reid_product") - 0.32728).abs() < 1e-5);
}

#[test]
fn sampled_criteria_for_vacuum_and_tmss() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ideal.toml", &format!("{IDEAL}[run]\nsamples_per_setting = 100000\n"));
    ok(dir.path(), &["simulate", "--config", "ideal.toml", "--state", "vacuum", "--out", "vac.csv"]);
    let vac = ok(dir.path(), &["criteria", "vac.csv"]);
    assert!((value(&vac, "duan_normalized") - 1.0).abs() < 0.02);
    assert!((value(&vac, "reid_product") - 1.0).abs() < 0.03);

    ok(dir.path(), &["simulate", "--config", "ideal.toml", "--state", "tmss", "--r", "0.5", "--format", "bin", "--out", "t.bin"]);
    let t = ok(dir.path(), &["criteria", "t.bin", "--out", "report.txt"]);
    let expected = 1.0 / 1.0f64.cosh().powi(2);
    assert!((value(&t, "reid_product") - expected).abs() < 4.0 * value(&t, "reid_product_se"));
    assert_eq!(std::fs::read_to_string(dir.path().join("report.txt")).unwrap(), t);
}

#[test]
fn runs_are_reproducible_across_seeds_threads_and_dumped_configs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "small.toml", "seed = 42\n[run]\nschedule = \"scan\"\nhistogram_count = 3\nsamples_per_histogram = 40000\n");
    ok(d, &["simulate", "--config", "small.toml", "--threads", "1", "--out", "a.csv"]);
    ok(d, &["simulate", "--config", "small.toml", "--threads", "4", "--out", "b.csv"]);
    let dumped = ok(d, &["--config", "small.toml", "--dump-config", "simulate"]);
    write(d, "dumped.toml", &dumped);
    ok(d, &["simulate", "--config", "dumped.toml", "--out", "c.csv"]);
    ok(d, &["simulate", "--config", "small.toml", "--seed", "43", "--out", "other.csv"]);
    let read = |n: &str| std::fs::read(d.join(n)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_eq!(read("a.csv"), read("c.csv"));
    assert_ne!(read("a.csv"), read("other.csv"));
    assert_eq!(ok(d, &["--config", "dumped.toml", "--dump-config", "oracle"]), dumped);
}

#[test]
fn weak_squeezing_heralds_a_central_dip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(
        d,
        "weak.toml",
        "[state]\nsqueeze_db = 0.8\nantisqueeze_db = 0.8\n[run]\nschedule = \"scan\"\n[conditioning]\nbins = 41\n",
    );
    ok(d, &["simulate", "--config", "weak.toml", "--format", "bin", "--out", "weak.bin"]);
    let out = ok(d, &["condition", "weak.bin", "--config", "weak.toml", "--per-phase", "--out", "weak.txt"]);
    assert!(value(&out, "density(0)") < value(&out, "density(1)"), "{out}");
    assert_eq!(value(&out, "segments"), 36.0);
    let report = std::fs::read_to_string(d.join("weak.uniformity.txt")).unwrap();
    assert_eq!(value(&report, "segments"), 36.0);
}

#[test]
fn reconstruction_outputs_and_loss_correction() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "ideal.toml", &format!("{IDEAL}[run]\nschedule = \"scan\"\nhistogram_count = 10\n[tomography]\nn_max = 4\n"));
    ok(d, &["simulate", "--config", "ideal.toml", "--state", "tmss", "--r", "0.3", "--format", "bin", "--out", "r.bin"]);
    ok(d, &["condition", "r.bin", "--config", "ideal.toml", "--out", "h.txt"]);
    let plain = ok(d, &["reconstruct", "h.txt", "--config", "ideal.toml", "--out", "plain"]);
    assert!(fock_row(&plain, 1)[3].is_empty());
    assert!(value(&plain, "W(0,0)") < 0.0);
    let corrected = ok(d, &["reconstruct", "h.txt", "--config", "ideal.toml", "--eta", "0.9", "--plot", "--out", "rec"]);
    let row = fock_row(&corrected, 1);
    assert!(row[3].parse::<f64>().unwrap() > row[1].parse::<f64>().unwrap());
    for f in ["wigner.csv", "wigner_matrix.txt", "fock.txt", "wigner.svg", "fock.svg", "histograms.svg"] {
        assert!(d.join("rec").join(f).exists(), "{f}");
    }
    ok(d, &["plot", "--histogram", "h.txt", "--wigner", "rec/wigner.csv", "--fock", "rec/fock.txt", "--out", "figs"]);
    let svg = std::fs::read_to_string(d.join("figs/fock.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn oracle_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "ideal.toml", IDEAL);
    let peak = ok(d, &["oracle", "--config", "ideal.toml", "--state", "tmss", "--r", "0.881373587019543"]);
    assert_eq!(value(&peak, "pair_probability_11"), 0.25);
    let weak = ok(d, &["oracle", "--config", "ideal.toml", "--state", "tmss", "--r", "0.1"]);
    let p = |n| fock_row(&weak, n)[1].parse::<f64>().unwrap();
    assert!(p(0).abs() < 1e-12);
    assert!((p(1) - 0.98023).abs() < 1e-5);
    assert!((p(2) - 0.01948).abs() < 1e-5);
    let default = ok(d, &["oracle"]);
    assert!((value(&default, "duan_normalized") - 0.29863).abs() < 1e-5);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "typo.toml", "[detector]\nefficency = 0.9\n");
    assert_eq!(twinbeam(d, &["oracle", "--config", "typo.toml"]).status.code(), Some(2));
    write(d, "bad.toml", "[detector]\nefficiency = 0.0\n");
    let out = twinbeam(d, &["oracle", "--config", "bad.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("detector"));
    assert_eq!(twinbeam(d, &["criteria"]).status.code(), Some(2));
    assert_eq!(twinbeam(d, &[]).status.code(), Some(2));
    assert!(ok(d, &["--dump-config"]).contains("[tomography]"));

    write(d, "junk.csv", "index,theta_a,theta_b,q_a,q_b\n0,0,0,zero,1\n");
    assert_eq!(twinbeam(d, &["criteria", "junk.csv"]).status.code(), Some(3));
    assert_eq!(twinbeam(d, &["condition", "missing.csv"]).status.code(), Some(3));

    ok(d, &["simulate", "--state", "vacuum", "--schedule", "scan", "--format", "bin", "--out", "vac.bin"]);
    let out = twinbeam(d, &["condition", "vac.bin"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));

    write(d, "few.toml", "[run]\nsamples_per_setting = 100\n");
    ok(d, &["simulate", "--config", "few.toml", "--out", "few.csv"]);
    assert_eq!(twinbeam(d, &["criteria", "few.csv"]).status.code(), Some(4));
}
