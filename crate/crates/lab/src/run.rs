//! Job execution: parallel evaluation over the time grid, CSV rendering,
//! atomic file placement and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use brokensym_core::analysis::{fit_series, DecayFit, DistanceSeries};
use brokensym_core::fermion_corr::{build_table, CorrelatorTable};
use brokensym_core::quench::QuenchProtocol;
use brokensym_core::rdm::{DistanceEngine, DistanceSample, SpinSubset, WickSettings};
use brokensym_core::wick::{horizon_from_differences, PauliString};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{sweep_model, ExperimentConfig, JobKind, ModelConfig, Violation};
use crate::ed::EdError;
use crate::oracle::{compare, EnvelopeSettings, OracleReport};

/// Pipeline and oracle may differ by at most this much.
pub const ORACLE_TOLERANCE: f64 = 1e-8;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Overrides `output_dir` from the environment.
pub const OUTPUT_DIR_ENV: &str = "BROKENSYM_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration")]
    Invalid(Vec<Violation>),
    #[error("at t = {t}: {source}")]
    AtTime { t: f64, source: brokensym_core::Error },
    #[error(transparent)]
    Core(#[from] brokensym_core::Error),
    #[error(transparent)]
    Ed(#[from] EdError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("manifest serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Invalid(_) => 1,
            _ => 2,
        }
    }
}

type RunResult<T> = Result<T, RunError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JobStatus {
    Failed,
    Success,
    /// Samples past t* were withheld because `allow_unconverged` was off.
    UnconvergedRefused,
}

impl JobStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            JobStatus::Success => 0,
            JobStatus::Failed => 2,
            JobStatus::UnconvergedRefused => 3,
        }
    }
}

/// t* of one tracked operator; `None` when it lies beyond the time window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorizonEntry {
    /// Sweep point or separation the entry belongs to, if any.
    pub context: Option<String>,
    pub operator: String,
    pub t_star: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub version: String,
    pub job: JobKind,
    pub status: JobStatus,
    pub grid: String,
    pub config: ExperimentConfig,
    pub t_star: Vec<HorizonEntry>,
    /// Samples with t >= this value are past the smallest t*.
    pub unconverged_from: Option<f64>,
    pub unconverged_rows: usize,
    /// True when unconverged rows were dropped from the data files.
    pub clipped: bool,
    pub files: Vec<String>,
    pub notes: Vec<String>,
    pub error: Option<String>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    fn started(config: &ExperimentConfig) -> Self {
        RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            job: config.job,
            status: JobStatus::Failed,
            grid: config.grid.resolution(),
            config: config.clone(),
            t_star: Vec::new(),
            unconverged_from: None,
            unconverged_rows: 0,
            clipped: false,
            files: Vec::new(),
            notes: Vec::new(),
            error: None,
            wall_clock_seconds: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub manifest: RunManifest,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.manifest.status.exit_code()
    }
}

/// Everything a job hands back before files are placed.
#[derive(Default)]
struct JobOutput {
    files: Vec<(String, String)>,
    t_star: Vec<HorizonEntry>,
    unconverged_from: Option<f64>,
    unconverged_rows: usize,
    clipped: bool,
    notes: Vec<String>,
    /// Set when the data were produced but fail the job's own check.
    failure: Option<String>,
}

/// Floats carry 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

fn write_atomic(path: &Path, contents: &str) -> RunResult<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    std::fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    std::fs::rename(&tmp, path).map_err(io_err(path))
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> RunResult<()> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    write_atomic(&dir.join(MANIFEST_FILE), &text)
}

/// Validates, runs the configured job and writes every output file.
///
/// The manifest is written as failed before any work starts and replaced
/// once the data files are in place, so an interrupted run leaves only a
/// failed manifest behind.
pub fn run(config: &ExperimentConfig) -> RunResult<RunOutcome> {
    let errors = config.errors();
    if !errors.is_empty() {
        return Err(RunError::Invalid(errors));
    }
    let dir = config.output_dir.clone();
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let mut manifest = RunManifest::started(config);
    write_manifest(&dir, &manifest)?;
    let clock = Instant::now();

    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.workers).build()?;
    let result = pool.install(|| match config.job {
        JobKind::Distance => distance_job(config),
        JobKind::Correlators => correlators_job(config),
        JobKind::TauSweep => tau_sweep_job(config),
        JobKind::OracleCompare => oracle_job(config),
        JobKind::Horizon => horizon_job(config),
    });
    manifest.wall_clock_seconds = clock.elapsed().as_secs_f64();

    let out = match result {
        Ok(out) => out,
        Err(e) => {
            manifest.error = Some(e.to_string());
            write_manifest(&dir, &manifest)?;
            return Err(e);
        }
    };
    let mut staged = Vec::with_capacity(out.files.len());
    for (name, contents) in &out.files {
        let path = dir.join(name);
        let tmp = dir.join(format!(".{name}.tmp"));
        std::fs::write(&tmp, contents).map_err(io_err(&tmp))?;
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        std::fs::rename(&tmp, &path).map_err(io_err(&path))?;
    }

    manifest.files = out.files.iter().map(|(n, _)| n.clone()).collect();
    manifest.t_star = out.t_star;
    manifest.unconverged_from = out.unconverged_from;
    manifest.unconverged_rows = out.unconverged_rows;
    manifest.clipped = out.clipped;
    manifest.notes = out.notes;
    manifest.status = if let Some(f) = out.failure {
        manifest.error = Some(f);
        JobStatus::Failed
    } else if out.clipped {
        JobStatus::UnconvergedRefused
    } else {
        JobStatus::Success
    };
    write_manifest(&dir, &manifest)?;
    Ok(RunOutcome { output_dir: dir, manifest })
}

/// Evaluates `f` at every time in parallel, keeping time order; the first
/// failing time (in grid order) is reported.
fn par_times<T: Send>(times: &[f64], f: impl Fn(f64) -> brokensym_core::Result<T> + Sync) -> RunResult<Vec<T>> {
    let results: Vec<brokensym_core::Result<T>> = times.par_iter().map(|&t| f(t)).collect();
    times.iter().zip(results).map(|(&t, r)| r.map_err(|source| RunError::AtTime { t, source })).collect()
}

fn protocol(config: &ExperimentConfig, model_final: ModelConfig) -> RunResult<QuenchProtocol> {
    Ok(QuenchProtocol::new(config.model_initial.to_spec()?, model_final.to_spec()?, config.grid.to_grid())?)
}

struct Evaluated {
    subsets: Vec<SpinSubset>,
    tracked: Vec<PauliString>,
    times: Vec<f64>,
    samples: Vec<DistanceSample>,
    /// t* per tracked operator, in tracked order.
    t_star: Vec<f64>,
}

impl Evaluated {
    fn horizon(&self) -> f64 {
        self.t_star.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn entries(&self, context: Option<&str>) -> Vec<HorizonEntry> {
        self.tracked
            .iter()
            .zip(&self.t_star)
            .map(|(op, &t)| HorizonEntry {
                context: context.map(str::to_string),
                operator: op.label(),
                t_star: t.is_finite().then_some(t),
            })
            .collect()
    }

    fn series(&self, i: usize) -> brokensym_core::Result<DistanceSeries> {
        let values = self.samples.iter().map(|s| s.distances[i]).collect();
        DistanceSeries::new(self.subsets[i].label(), self.times.clone(), values, self.horizon())
    }
}

fn evaluate(
    config: &ExperimentConfig,
    model_final: ModelConfig,
    wick: WickSettings,
    with_subsets: bool,
) -> RunResult<Evaluated> {
    let subsets = if with_subsets { config.spin_subsets()? } else { Vec::new() };
    let tracked = config.tracked_operators()?;
    let engine = DistanceEngine::new(protocol(config, model_final)?, &subsets, &tracked, wick, config.l_max)?;
    let times = config.time.samples();
    let samples = par_times(&times, |t| engine.sample(t))?;
    let mut t_star = Vec::with_capacity(tracked.len());
    for j in 0..tracked.len() {
        let gaps: Vec<f64> = samples.iter().map(|s| s.gaps[j]).collect();
        t_star.push(horizon_from_differences(&times, &gaps, wick.threshold)?);
    }
    Ok(Evaluated { subsets, tracked, times, samples, t_star })
}

fn header(first: &str, labels: impl IntoIterator<Item = String>) -> String {
    let mut s = first.to_string();
    for l in labels {
        s.push(',');
        s.push_str(&l);
    }
    s.push('\n');
    s
}

fn fit_row(out: &mut String, key: &str, fit: &brokensym_core::Result<DecayFit>) {
    match fit {
        Ok(f) => {
            let _ = writeln!(
                out,
                "{key},{},{},{},{},{}",
                num(f.tau),
                num(f.log_amplitude),
                num(f.t_lo),
                num(f.t_hi),
                num(f.rms_residual)
            );
        }
        Err(_) => {
            let nan = num(f64::NAN);
            let _ = writeln!(out, "{key},{nan},{nan},{nan},{nan},{nan}");
        }
    }
}

fn distance_job(config: &ExperimentConfig) -> RunResult<JobOutput> {
    let ev = evaluate(config, config.model_final, config.wick(), true)?;
    let horizon = ev.horizon();
    let unconverged = ev.times.iter().filter(|&&t| t >= horizon).count();
    let clipped = unconverged > 0 && !config.allow_unconverged;
    let keep = |t: f64| !clipped || t < horizon;

    let mut distance = header("t", ev.subsets.iter().map(SpinSubset::label));
    let mut broken = header("t", ev.tracked.iter().map(PauliString::label));
    for s in ev.samples.iter().filter(|s| keep(s.t)) {
        distance.push_str(&num(s.t));
        for d in &s.distances {
            distance.push(',');
            distance.push_str(&num(*d));
        }
        distance.push('\n');
        broken.push_str(&num(s.t));
        for m in &s.magnitudes {
            broken.push(',');
            broken.push_str(&num(*m));
        }
        broken.push('\n');
    }

    let mut notes = Vec::new();
    let mut fits = String::from("subset,tau,log_amplitude,t_lo,t_hi,rms_residual\n");
    for (i, s) in ev.subsets.iter().enumerate() {
        let fit = ev.series(i).and_then(|series| fit_series(&series));
        if let Err(e) = &fit {
            notes.push(format!("fit {}: {e}", s.label()));
        }
        fit_row(&mut fits, &s.label(), &fit);
    }
    if unconverged > 0 {
        notes.push(if clipped {
            format!("{unconverged} samples at t >= {horizon} withheld")
        } else {
            format!("{unconverged} samples at t >= {horizon} are past the validity horizon")
        });
    }

    Ok(JobOutput {
        files: vec![("distance.csv".into(), distance), ("broken.csv".into(), broken), ("fits.csv".into(), fits)],
        t_star: ev.entries(None),
        unconverged_from: horizon.is_finite().then_some(horizon),
        unconverged_rows: unconverged,
        clipped,
        notes,
        failure: None,
    })
}

/// Rows of the fermion correlator dump, one per (t, r).
pub fn correlator_rows(out: &mut String, table: &CorrelatorTable) {
    for row in table.rows() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(row.t),
            row.r,
            num(row.f.re),
            num(row.f.im),
            num(row.g),
            num(row.h.re),
            num(row.h.im)
        );
    }
}

pub const CORRELATOR_HEADER: &str = "t,r,f_re,f_im,g,h_re,h_im\n";

fn correlators_job(config: &ExperimentConfig) -> RunResult<JobOutput> {
    let q = protocol(config, config.model_final)?;
    let tables = par_times(&config.time.samples(), |t| build_table(&q, t, config.r_max))?;
    let mut csv = CORRELATOR_HEADER.to_string();
    for table in &tables {
        correlator_rows(&mut csv, table);
    }
    Ok(JobOutput { files: vec![("correlators.csv".into(), csv)], ..Default::default() })
}

fn tau_sweep_job(config: &ExperimentConfig) -> RunResult<JobOutput> {
    let sweep = config.sweep.as_ref().expect("validated: sweep present");
    let subsets = config.spin_subsets()?;
    let mut tables: Vec<String> =
        subsets.iter().map(|_| String::from("param,tau,log_amplitude,t_lo,t_hi,rms_residual\n")).collect();
    let mut t_star = Vec::new();
    let mut notes = Vec::new();
    for &value in &sweep.values {
        let model = sweep_model(config.model_final, sweep.parameter, value);
        let ev = evaluate(config, model, config.wick(), true)?;
        let context = format!("{value}");
        t_star.extend(ev.entries(Some(&context)));
        for (i, s) in subsets.iter().enumerate() {
            let fit = ev.series(i).and_then(|series| fit_series(&series));
            if let Err(e) = &fit {
                notes.push(format!("fit {} at {value}: {e}", s.label()));
            }
            fit_row(&mut tables[i], &num(value), &fit);
        }
    }
    let mut files = vec![("tau.csv".to_string(), tables[0].clone())];
    if subsets.len() > 1 {
        for (s, table) in subsets.iter().zip(tables) {
            files.push((format!("tau_{}.csv", s.label()), table));
        }
    }
    Ok(JobOutput { files, t_star, notes, ..Default::default() })
}

/// Runs the oracle comparison and renders its report.
pub fn oracle_report(config: &ExperimentConfig) -> RunResult<OracleReport> {
    let n_sites = match config.grid {
        crate::config::GridConfig::Finite { n_sites } => n_sites,
        crate::config::GridConfig::Thermodynamic { .. } => unreachable!("validated: finite grid"),
    };
    let settings = config.oracle.clone().unwrap_or_default();
    let envelope = if settings.envelope {
        Some(EnvelopeSettings {
            subsets: config.spin_subsets()?,
            grid: brokensym_core::model::MomentumGrid::thermodynamic(settings.envelope_points),
            wick: config.wick(),
        })
    } else {
        None
    };
    Ok(compare(
        &config.model_initial.to_spec()?,
        &config.model_final.to_spec()?,
        n_sites,
        &settings.times,
        envelope.as_ref(),
    )?)
}

fn oracle_job(config: &ExperimentConfig) -> RunResult<JobOutput> {
    let report = oracle_report(config)?;
    let mut rows = String::from("t,operator,pipeline_re,pipeline_im,oracle_re,oracle_im,deviation\n");
    for r in &report.rows {
        let _ = writeln!(
            rows,
            "{},{},{},{},{},{},{}",
            num(r.t),
            r.operator.label(),
            num(r.pipeline.re),
            num(r.pipeline.im),
            num(r.oracle.re),
            num(r.oracle.im),
            num(r.deviation())
        );
    }
    let mut tables = CORRELATOR_HEADER.to_string();
    for t in &report.ed_tables {
        correlator_rows(&mut tables, t);
    }
    let mut files = vec![("oracle.csv".to_string(), rows), ("ed_correlators.csv".to_string(), tables)];
    if !report.distances.is_empty() {
        let mut d = String::from("t,subset,pipeline,oracle\n");
        for row in &report.distances {
            let _ = writeln!(d, "{},{},{},{}", num(row.t), row.subset, num(row.pipeline), num(row.oracle));
        }
        files.push(("oracle_distance.csv".to_string(), d));
    }
    let deviation = report.max_deviation();
    let mut notes = vec![
        format!("max deviation {deviation:e}"),
        format!("parity splitting of the initial ring {:e}", report.splitting),
    ];
    let failure = (deviation > ORACLE_TOLERANCE).then(|| {
        let worst =
            report.worst().map(|w| format!(" (worst: {} at t = {})", w.operator.label(), w.t)).unwrap_or_default();
        format!("oracle deviation {deviation:e} exceeds {ORACLE_TOLERANCE:e}{worst}")
    });
    if let Some(f) = &failure {
        notes.push(f.clone());
    }
    Ok(JobOutput { files, notes, failure, ..Default::default() })
}

fn horizon_job(config: &ExperimentConfig) -> RunResult<JobOutput> {
    let r_values = &config.horizon.as_ref().expect("validated: horizon present").r_values;
    let tracked = config.tracked_operators()?;
    let mut summary = header("R", tracked.iter().map(PauliString::label));
    let mut files = Vec::new();
    let mut t_star = Vec::new();
    for &r in r_values {
        let ev = evaluate(config, config.model_final, WickSettings { r, ..config.wick() }, false)?;
        let mut gaps = header("t", tracked.iter().map(PauliString::label));
        for s in &ev.samples {
            gaps.push_str(&num(s.t));
            for g in &s.gaps {
                gaps.push(',');
                gaps.push_str(&num(*g));
            }
            gaps.push('\n');
        }
        files.push((format!("gaps_R{r}.csv"), gaps));
        summary.push_str(&r.to_string());
        for t in &ev.t_star {
            summary.push(',');
            summary.push_str(&num(*t));
        }
        summary.push('\n');
        t_star.extend(ev.entries(Some(&format!("R={r}"))));
    }
    files.insert(0, ("horizon.csv".to_string(), summary));
    Ok(JobOutput { files, t_star, ..Default::default() })
}
