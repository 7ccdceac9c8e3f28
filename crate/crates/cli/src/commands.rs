use std::cell::RefCell;
use std::fs;
use std::path::{Path, PathBuf};

use twinbeam_core::acquisition::{read_records, simulate_run, write_records, RecordReader};
use twinbeam_core::conditioning::{accumulate_segments, pooled, uniformity_test, WeightSource};
use twinbeam_core::criteria::estimate_from_records;
use twinbeam_core::tomography::{
    fock_diagonal_with_errors, inverse_radon_symmetric, loss_correct, oracle_conditioned_state, FockReport,
    FockStateVectorTwoMode,
};
use twinbeam_core::{CriteriaReport, QuadratureRecord, RecordFormat, WeightedHistogram, WignerGrid};

use crate::config::{RunConfig, ScheduleKind};
use crate::error::{CliError, Result};
use crate::plot;

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn in_file(path: &Path, e: twinbeam_core::Error) -> CliError {
    match e {
        twinbeam_core::Error::Parse { line, message, .. } => {
            CliError::Data(format!("{}:{line}: {message}", path.display()))
        }
        other => CliError::Core(other),
    }
}

#[derive(Default)]
struct Moments {
    n: u64,
    sum: [f64; 2],
    sum_sq: [f64; 2],
}

impl Moments {
    fn add(&mut self, r: &QuadratureRecord) {
        self.n += 1;
        for (k, q) in [r.q_a, r.q_b].into_iter().enumerate() {
            self.sum[k] += q;
            self.sum_sq[k] += q * q;
        }
    }

    fn variance(&self, k: usize) -> f64 {
        let n = self.n as f64;
        let mean = self.sum[k] / n;
        (self.sum_sq[k] / n - mean * mean) * n / (n - 1.0).max(1.0)
    }
}

pub fn simulate(config: &RunConfig, schedule: ScheduleKind, out: Option<PathBuf>, format: RecordFormat) -> Result<()> {
    let state = config.state()?;
    let detector = config.detector()?;
    let path = out.unwrap_or_else(|| {
        PathBuf::from(match format {
            RecordFormat::Csv => "records.csv",
            RecordFormat::Binary => "records.bin",
        })
    });
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let moments = RefCell::new(Moments::default());
    let count = match schedule {
        ScheduleKind::Locked => {
            let stream = simulate_run(&state, config.locked(), &detector, config.seed)?;
            write_records(stream.inspect(|r| moments.borrow_mut().add(r)), &path, format)
        }
        ScheduleKind::Scan => {
            let stream = simulate_run(&state, config.scan_plan()?, &detector, config.seed)?;
            write_records(stream.inspect(|r| moments.borrow_mut().add(r)), &path, format)
        }
    }
    .map_err(|e| in_file(&path, e))?;
    let m = moments.into_inner();
    println!("wrote {count} records to {}", path.display());
    println!("schedule = {}", match schedule {
        ScheduleKind::Locked => "locked",
        ScheduleKind::Scan => "scan",
    });
    println!("var_q_a = {:.6}", m.variance(0));
    println!("var_q_b = {:.6}", m.variance(1));
    Ok(())
}

pub fn criteria(config: &RunConfig, input: Option<&Path>, analytic: bool, out: Option<PathBuf>) -> Result<()> {
    let report = match (input, analytic) {
        (_, true) => CriteriaReport::analytic(&config.state()?.detected(&config.detector()?)?)?,
        (Some(path), false) => {
            let records = read_records(path).map_err(|e| in_file(path, e))?;
            estimate_from_records(&records)?
        }
        (None, false) => {
            return Err(CliError::Config("criteria needs a record file or --analytic".into()));
        }
    };
    let text = report.to_text();
    print!("{text}");
    if let Some(path) = out {
        write_file(&path, &text)?;
    }
    Ok(())
}

/// Streams records from a file, remembering the first read error and
/// whether `θ_b` ever changes inside a constant-`θ_a` run.
struct CheckedRecords {
    reader: RecordReader<fs::File>,
    error: Option<twinbeam_core::Error>,
    last: Option<(f64, f64)>,
    swept: bool,
}

impl Iterator for CheckedRecords {
    type Item = QuadratureRecord;

    fn next(&mut self) -> Option<QuadratureRecord> {
        match self.reader.next()? {
            Ok(r) => {
                if let Some((ta, tb)) = self.last {
                    self.swept |= ta == r.theta_a && tb != r.theta_b;
                }
                self.last = Some((r.theta_a, r.theta_b));
                Some(r)
            }
            Err(e) => {
                self.error = Some(e);
                None
            }
        }
    }
}

pub fn condition(config: &RunConfig, input: &Path, per_phase: bool, out: Option<PathBuf>) -> Result<()> {
    let reader = RecordReader::open(input).map_err(|e| in_file(input, e))?;
    let mut records = CheckedRecords { reader, error: None, last: None, swept: false };
    let segments = accumulate_segments(&mut records, config.binning()?, config.calibration());
    if let Some(e) = records.error {
        return Err(in_file(input, e));
    }
    if segments.is_empty() {
        return Err(CliError::Data(format!("{}: no records", input.display())));
    }
    if !records.swept {
        return Err(CliError::Data(format!(
            "{}: θ_b is constant within every θ_a segment; heralding needs a θ_b sweep (simulate with --schedule scan)",
            input.display()
        )));
    }
    let all = pooled(&segments)?;
    let density = all.normalize()?;

    let path = out.unwrap_or_else(|| PathBuf::from("histogram.txt"));
    let text: String = if per_phase { segments.iter().map(WeightedHistogram::to_text).collect() } else { all.to_text() };
    write_file(&path, &text)?;
    println!("wrote {} histogram(s) to {}", if per_phase { segments.len() } else { 1 }, path.display());
    println!("records = {}", all.records_seen());
    println!("segments = {}", segments.len());
    println!("total_weight = {:.6e} ± {:.3e}", all.total_weight(), all.total_weight_se());
    println!("mean_weight = {:.6e}", all.mean_weight());
    println!("out_of_range_fraction = {:.3e}", all.out_of_range_fraction());
    let binning = all.binning();
    let at = |q: f64| binning.index(q).map(|j| density.values[j]).unwrap_or(0.0);
    println!("density(0) = {:.5}", at(0.0));
    println!("density(1) = {:.5}", at(1.0));

    if per_phase {
        let report = uniformity_test(&segments, WeightSource::Conditioned)?;
        let report_path = path.with_extension("uniformity.txt");
        write_file(&report_path, &report.to_text())?;
        print!("{}", report.to_text());
        println!("wrote uniformity report to {}", report_path.display());
    }
    Ok(())
}

fn load_histograms(path: &Path) -> Result<Vec<WeightedHistogram>> {
    let hs = WeightedHistogram::parse_all(&read_file(path)?).map_err(|e| in_file(path, e))?;
    if hs.is_empty() {
        return Err(CliError::Data(format!("{}: no histograms", path.display())));
    }
    Ok(hs)
}

pub fn reconstruct(config: &RunConfig, input: &Path, eta: Option<f64>, with_plots: bool, out: Option<PathBuf>) -> Result<()> {
    let segments = load_histograms(input)?;
    let all = pooled(&segments)?;
    let n_max = config.tomography.n_max;
    let (raw, errors) = fock_diagonal_with_errors(&all, n_max)?;
    let corrected = eta.map(|eta| loss_correct(&raw, eta).map(|c| (eta, c))).transpose()?;
    let density = all.normalize()?;
    let wigner = inverse_radon_symmetric(&density, &config.grid(), &config.filter())?;
    let report = FockReport { raw, standard_errors: Some(errors), corrected };

    let dir = out.unwrap_or_else(|| PathBuf::from("reconstruction"));
    write_file(&dir.join("wigner.csv"), &wigner.to_csv())?;
    write_file(&dir.join("wigner_matrix.txt"), &wigner.to_matrix_text())?;
    write_file(&dir.join("fock.txt"), &report.to_text())?;
    if with_plots {
        write_plots(&dir, Some(&segments), Some(&wigner), Some(&report))?;
    }
    print!("{}", report.to_text());
    println!("W(0,0) = {:.5}", wigner.at(0.0, 0.0));
    println!("wigner_integral = {:.5}", wigner.integral());
    println!("wrote reconstruction to {}", dir.display());
    Ok(())
}

pub fn oracle(config: &RunConfig, out: Option<PathBuf>) -> Result<()> {
    let mut text = CriteriaReport::analytic(&config.state()?.detected(&config.detector()?)?)?.to_text();
    match config.oracle_params() {
        Some(params) => {
            let state = FockStateVectorTwoMode::tmss_auto(params.r, 1e-12)?;
            let diag = oracle_conditioned_state(&params, config.tomography.n_max)?;
            text.push_str(&format!("r = {}\n", params.r));
            text.push_str(&format!("pair_probability_11 = {:.6}\n", state.pair_probability(1)));
            text.push_str(&FockReport { raw: diag, standard_errors: None, corrected: None }.to_text());
        }
        None => {
            log::info!("state is not a two-mode squeezed vacuum; skipping the Fock prediction");
            text.push_str("# conditioned Fock prediction needs a two-mode squeezed vacuum\n");
        }
    }
    print!("{text}");
    if let Some(path) = out {
        write_file(&path, &text)?;
    }
    Ok(())
}

fn write_plots(
    dir: &Path,
    segments: Option<&[WeightedHistogram]>,
    wigner: Option<&WignerGrid>,
    fock: Option<&FockReport>,
) -> Result<()> {
    if let Some(segments) = segments {
        let all = pooled(segments)?;
        let per_phase: Vec<_> = if segments.len() > 1 { segments.iter().filter_map(|h| h.normalize().ok()).collect() } else { Vec::new() };
        let svg = plot::histogram_overlay(&per_phase, &all.normalize()?, None);
        write_file(&dir.join("histograms.svg"), &svg)?;
    }
    if let Some(w) = wigner {
        write_file(&dir.join("wigner.svg"), &plot::wigner_map(w))?;
    }
    if let Some(f) = fock {
        write_file(&dir.join("fock.svg"), &plot::fock_bars(f))?;
    }
    Ok(())
}

pub fn plot(histogram: Option<&Path>, wigner: Option<&Path>, fock: Option<&Path>, out: Option<PathBuf>) -> Result<()> {
    if histogram.is_none() && wigner.is_none() && fock.is_none() {
        return Err(CliError::Config("plot needs at least one of --histogram, --wigner, --fock".into()));
    }
    let segments = histogram.map(load_histograms).transpose()?;
    let grid = wigner
        .map(|p| read_file(p).and_then(|t| WignerGrid::parse_csv(&t).map_err(|e| in_file(p, e))))
        .transpose()?;
    let report = fock.map(|p| read_file(p).and_then(|t| FockReport::parse(&t).map_err(|e| in_file(p, e)))).transpose()?;
    let dir = out.unwrap_or_else(|| PathBuf::from("plots"));
    write_plots(&dir, segments.as_deref(), grid.as_ref(), report.as_ref())?;
    println!("wrote plots to {}", dir.display());
    Ok(())
}
