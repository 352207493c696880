//! Pipeline stages shared by the subcommands and the full `run`.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use affect_core::analysis::{hamming_smooth, rolling_correlation, NumericSeries};
use affect_core::emotion::{build_series, periods, top_lexicon_words, EmotionPanel, EmotionSeries, WeightedWord};
use affect_core::export;
use affect_core::forecast::{
    evaluate_holdout, model_suite, run_suite_model, suite_start, surrogate_test_from, ModelReport, Quantile,
    SuiteModel, SurrogateReport, SUMMARY_LEVELS,
};
use affect_core::ingest::{
    build_threads, filter_threads, load_attitude_series, monthly_subject_buckets, parse_messages, MonthlyBucket,
    ThreadSummary,
};
use affect_core::lexicon::{load_lexicon, Lexicon};
use affect_core::{ErrorKind, MonthRange};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{AnalysisArgs, GapPolicy, ModelArgs, PipelineConfig, SurrogateArgs};
use crate::error::{CliError, CliResult, Stage};

pub const FAILED_MARKER: &str = ".failed";

pub fn read_lexicon(path: &Path) -> CliResult<Lexicon<f64>> {
    let f = File::open(path).map_err(|e| CliError::io_input(Stage::Lexicon, path, e))?;
    load_lexicon(BufReader::new(f)).map_err(|e| CliError::core(Stage::Lexicon, e))
}

pub fn read_threads(path: &Path, min_messages: usize) -> CliResult<Vec<ThreadSummary>> {
    let f = File::open(path).map_err(|e| CliError::io_input(Stage::Ingest, path, e))?;
    let messages = parse_messages(BufReader::new(f)).map_err(|e| CliError::core(Stage::Ingest, e))?;
    filter_threads(&build_threads(&messages), min_messages).map_err(|e| CliError::core(Stage::Ingest, e))
}

pub fn read_attitude(path: &Path) -> CliResult<NumericSeries<f64>> {
    let f = File::open(path).map_err(|e| CliError::io_input(Stage::Attitude, path, e))?;
    let s = load_attitude_series::<f64, _>(BufReader::new(f)).map_err(|e| CliError::core(Stage::Attitude, e))?;
    Ok(s.to_numeric())
}

pub fn read_series(path: &Path) -> CliResult<(EmotionPanel<f64>, export::Counts)> {
    let f = File::open(path).map_err(|e| CliError::io_input(Stage::Series, path, e))?;
    export::read_series_csv(BufReader::new(f)).map_err(|e| CliError::core(Stage::Series, e))
}

pub fn read_buckets(path: &Path) -> CliResult<Vec<MonthlyBucket>> {
    let f = File::open(path).map_err(|e| CliError::io_input(Stage::Score, path, e))?;
    serde_json::from_reader(BufReader::new(f))
        .map_err(|e| CliError::new(Stage::Score, ErrorKind::Input.into(), format!("{}: {e}", path.display())))
}

/// Creates an output file (and its parent directories) and hands a buffered
/// writer to `body`.
pub fn write_file(
    stage: Stage,
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> affect_core::Result<()>,
) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io_output(stage, path, e))?;
    }
    let f = File::create(path).map_err(|e| CliError::io_output(stage, path, e))?;
    let mut w = BufWriter::new(f);
    body(&mut w).map_err(|e| CliError::io_output(stage, path, e))?;
    w.flush().map_err(|e| CliError::io_output(stage, path, e))
}

pub fn write_json<S: Serialize>(stage: Stage, path: &Path, value: &S) -> CliResult<()> {
    write_file(stage, path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::other)?;
        w.write_all(b"\n")?;
        Ok(())
    })
}

/// Resolves empty months according to the gap policy.
pub fn resolve_gaps(panel: &EmotionPanel<f64>, policy: GapPolicy) -> CliResult<(EmotionPanel<f64>, Vec<String>)> {
    let missing: Vec<String> = (0..panel.len())
        .filter(|&i| panel.iter().any(|(_, s)| s.values[i].is_none()))
        .map(|i| panel.start().offset(i as i64).to_string())
        .collect();
    match policy {
        _ if missing.is_empty() => Ok((panel.clone(), missing)),
        GapPolicy::Fail => Err(CliError::new(
            Stage::Gaps,
            ErrorKind::Precondition.into(),
            format!(
                "month {} has no lexicon matches ({} such month(s)); rerun with --gap-policy linear-interpolate",
                missing[0],
                missing.len()
            ),
        )),
        GapPolicy::LinearInterpolate => {
            let filled = panel.try_map(|s| s.interpolate_linear()).map_err(|e| CliError::core(Stage::Gaps, e))?;
            Ok((filled, missing))
        }
    }
}

/// Overlap of two month axes.
pub fn common_range(a: MonthRange, b: MonthRange) -> CliResult<MonthRange> {
    let first = a.first.max(b.first);
    let last = a.last.min(b.last);
    MonthRange::new(first, last).map_err(|_| {
        CliError::new(
            Stage::Align,
            ErrorKind::Precondition.into(),
            format!("emotion axis {a} and attitude axis {b} do not overlap"),
        )
    })
}

/// Restricts the emotion panel and attitude series to their common months.
pub fn align(
    panel: &EmotionPanel<f64>,
    counts: &[(usize, usize)],
    attitude: &NumericSeries<f64>,
) -> CliResult<(EmotionPanel<f64>, export::Counts, NumericSeries<f64>)> {
    let range = common_range(panel.range(), attitude.range())?;
    let off = panel.start().months_until(range.first) as usize;
    let p = panel.slice(range).map_err(|e| CliError::core(Stage::Align, e))?;
    let a = attitude.slice(range).map_err(|e| CliError::core(Stage::Align, e))?;
    Ok((p, counts[off..off + range.len()].to_vec(), a))
}

pub fn smooth_panel(panel: &EmotionPanel<f64>, window: usize) -> CliResult<EmotionPanel<f64>> {
    panel.try_map(|s| hamming_smooth(s, window)).map_err(|e| CliError::core(Stage::Smooth, e))
}

pub fn smooth_series(series: &NumericSeries<f64>, window: usize) -> CliResult<NumericSeries<f64>> {
    hamming_smooth(series, window).map_err(|e| CliError::core(Stage::Smooth, e))
}

/// Writes one correlation CSV per pair among the six emotion components and
/// the attitude series into `dir`. Returns the written paths.
pub fn write_correlations(
    dir: &Path,
    panel: &EmotionPanel<f64>,
    attitude: &NumericSeries<f64>,
    window: usize,
    alpha: f64,
) -> CliResult<Vec<PathBuf>> {
    let mut named: Vec<(String, &NumericSeries<f64>)> = panel.iter().collect();
    named.push(("attitude".to_string(), attitude));
    let mut written = Vec::new();
    for i in 0..named.len() {
        for j in i + 1..named.len() {
            let track = rolling_correlation(named[i].1, named[j].1, window, alpha)
                .map_err(|e| CliError::core(Stage::Correlate, e))?;
            let path = dir.join(format!("{}__{}.csv", named[i].0, named[j].0));
            write_file(Stage::Correlate, &path, |w| export::write_correlation_csv(w, &track))?;
            written.push(path);
        }
    }
    Ok(written)
}

pub fn yearly_top_words(
    buckets: &[MonthlyBucket],
    lexicon: &Lexicon<f64>,
    k: usize,
) -> CliResult<Vec<(MonthRange, Vec<WeightedWord<f64>>)>> {
    let (Some(first), Some(last)) = (buckets.first(), buckets.last()) else {
        return Ok(Vec::new());
    };
    periods(MonthRange { first: first.month, last: last.month }, 12)
        .into_iter()
        .map(|p| Ok((p, top_lexicon_words(buckets, lexicon, p, k).map_err(|e| CliError::core(Stage::Score, e))?)))
        .collect()
}

pub fn parse_model(name: &str) -> CliResult<SuiteModel> {
    SuiteModel::parse(name).ok_or_else(|| {
        let known: Vec<String> = SuiteModel::ALL.iter().map(|m| m.name()).collect();
        CliError::new(
            Stage::Forecast,
            ErrorKind::Input.into(),
            format!("unknown model `{name}`; expected one of {}", known.join(", ")),
        )
    })
}

pub fn forecast_model(
    kind: SuiteModel,
    attitude: &NumericSeries<f64>,
    panel: &EmotionPanel<f64>,
    p: usize,
    q: usize,
) -> CliResult<ModelReport<f64>> {
    let entry = run_suite_model(kind, attitude, panel, p, q, suite_start(p, q))
        .map_err(|e| CliError::core(Stage::Forecast, e))?;
    Ok(ModelReport::from(&entry))
}

/// Non-reference evaluation: fit on the first `train_len` months, score the rest.
pub fn forecast_holdout(
    kind: SuiteModel,
    attitude: &NumericSeries<f64>,
    panel: &EmotionPanel<f64>,
    p: usize,
    q: usize,
    train_len: usize,
) -> CliResult<ModelReport<f64>> {
    let spec = kind.spec(p, q).map_err(|e| CliError::core(Stage::Forecast, e))?;
    let (model, report) = evaluate_holdout(&spec, attitude, &kind.exogenous(panel), train_len)
        .map_err(|e| CliError::core(Stage::Forecast, e))?;
    Ok(ModelReport::new(format!("{}-holdout", kind.name()), &model, &report))
}

pub fn suite_reports(
    attitude: &NumericSeries<f64>,
    panel: &EmotionPanel<f64>,
    p: usize,
    q: usize,
) -> CliResult<Vec<ModelReport<f64>>> {
    let entries = model_suite(attitude, panel, p, q).map_err(|e| CliError::core(Stage::Suite, e))?;
    Ok(entries.iter().map(ModelReport::from).collect())
}

/// Lowest-MAE model with emotion inputs; earlier suite order wins ties.
pub fn best_emotion_model(reports: &[ModelReport<f64>]) -> Option<SuiteModel> {
    reports
        .iter()
        .filter(|r| r.name != "ar")
        .fold(None::<&ModelReport<f64>>, |best, r| match best {
            Some(b) if b.mae <= r.mae => Some(b),
            _ => Some(r),
        })
        .and_then(|r| SuiteModel::parse(&r.name))
}

#[derive(Debug, Clone, Serialize)]
pub struct SurrogateSummary {
    pub model: String,
    pub seed: u64,
    pub n: usize,
    pub empirical_mae: f64,
    pub p_hat: f64,
    pub quantiles: Vec<Quantile<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surrogate_maes: Option<Vec<f64>>,
}

impl SurrogateSummary {
    pub fn new(model: SuiteModel, report: SurrogateReport<f64>, full: bool) -> Self {
        SurrogateSummary {
            model: model.name(),
            seed: report.seed,
            n: report.n_surrogates,
            empirical_mae: report.empirical_mae,
            p_hat: report.p_hat,
            quantiles: report.quantiles(&SUMMARY_LEVELS),
            surrogate_maes: full.then_some(report.surrogate_maes),
        }
    }
}

pub fn surrogate_summary(
    kind: SuiteModel,
    attitude: &NumericSeries<f64>,
    panel: &EmotionPanel<f64>,
    model: &ModelArgs,
    surrogate: &SurrogateArgs,
) -> CliResult<SurrogateSummary> {
    let (p, q) = (model.p, model.q);
    let spec = kind.spec(p, q).map_err(|e| CliError::core(Stage::Surrogate, e))?;
    let exo = kind.exogenous(panel);
    let report = surrogate_test_from(&spec, attitude, &exo, surrogate.surrogates, surrogate.seed, suite_start(p, q))
        .map_err(|e| CliError::core(Stage::Surrogate, e))?;
    Ok(SurrogateSummary::new(kind, report, surrogate.full_surrogates))
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io_input(Stage::Manifest, path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub library_version: String,
    pub created_at: String,
    pub config: PipelineConfig,
    pub input_sha256: BTreeMap<String, String>,
    pub threads_kept: usize,
    pub emotion_axis: MonthRange,
    pub analysis_axis: MonthRange,
    pub gap_months: Vec<String>,
    pub surrogate_model: String,
    pub artifacts: Vec<String>,
}

/// Thread roll-up: writes `threads.json` and `buckets.json`.
pub fn stage_ingest(
    messages: &Path,
    min_messages: usize,
    out: &Path,
    artifacts: &mut Vec<PathBuf>,
) -> CliResult<Vec<MonthlyBucket>> {
    let threads = read_threads(messages, min_messages)?;
    let buckets = monthly_subject_buckets(&threads);
    let path = out.join("threads.json");
    write_json(Stage::Ingest, &path, &threads)?;
    artifacts.push(path);
    let path = out.join("buckets.json");
    write_json(Stage::Ingest, &path, &buckets)?;
    artifacts.push(path);
    Ok(buckets)
}

/// Lexicon scoring: writes `discussions.csv`, `top_words.csv` and the raw
/// `emotion_series.csv`.
pub fn stage_score(
    buckets: &[MonthlyBucket],
    lexicon: &Lexicon<f64>,
    top_words: usize,
    out: &Path,
    artifacts: &mut Vec<PathBuf>,
) -> CliResult<EmotionSeries<f64>> {
    let series: EmotionSeries<f64> = build_series(buckets, lexicon).map_err(|e| CliError::core(Stage::Score, e))?;
    let path = out.join("discussions.csv");
    write_file(Stage::Score, &path, |w| export::write_discussion_counts(w, series.start(), &series.thread_counts()))?;
    artifacts.push(path);
    let top = yearly_top_words(buckets, lexicon, top_words)?;
    let path = out.join("top_words.csv");
    write_file(Stage::Score, &path, |w| export::write_top_words(w, &top))?;
    artifacts.push(path);
    let path = out.join("emotion_series.csv");
    write_file(Stage::Score, &path, |w| export::write_emotion_csv(w, &series))?;
    artifacts.push(path);
    Ok(series)
}

/// Gap-resolved series on the common axis, raw and smoothed.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub raw: EmotionPanel<f64>,
    pub raw_attitude: NumericSeries<f64>,
    pub smooth: EmotionPanel<f64>,
    pub smooth_attitude: NumericSeries<f64>,
    pub counts: export::Counts,
    pub gap_months: Vec<String>,
}

/// Gap handling, alignment and smoothing: writes `emotion_series_resolved.csv`,
/// `attitude_aligned.csv`, `emotion_series_smoothed.csv` and
/// `attitude_smoothed.csv`.
pub fn stage_smooth(
    panel: &EmotionPanel<f64>,
    counts: &[(usize, usize)],
    attitude: &NumericSeries<f64>,
    analysis: &AnalysisArgs,
    out: &Path,
    artifacts: &mut Vec<PathBuf>,
) -> CliResult<Prepared> {
    let (resolved, gap_months) = resolve_gaps(panel, analysis.gap_policy)?;
    let (raw, counts, raw_attitude) = align(&resolved, counts, attitude)?;
    let smooth = smooth_panel(&raw, analysis.smooth_window)?;
    let smooth_attitude = smooth_series(&raw_attitude, analysis.smooth_window)?;
    for (name, p) in [("emotion_series_resolved.csv", &raw), ("emotion_series_smoothed.csv", &smooth)] {
        let path = out.join(name);
        write_file(Stage::Smooth, &path, |w| export::write_series_csv(w, p, &counts))?;
        artifacts.push(path);
    }
    for (name, s) in [("attitude_aligned.csv", &raw_attitude), ("attitude_smoothed.csv", &smooth_attitude)] {
        let path = out.join(name);
        write_file(Stage::Smooth, &path, |w| export::write_rate_csv(w, s))?;
        artifacts.push(path);
    }
    Ok(Prepared { raw, raw_attitude, smooth, smooth_attitude, counts, gap_months })
}

/// Ten-model comparison: writes `models.json`.
pub fn stage_suite(
    attitude: &NumericSeries<f64>,
    panel: &EmotionPanel<f64>,
    model: &ModelArgs,
    out: &Path,
    artifacts: &mut Vec<PathBuf>,
) -> CliResult<Vec<ModelReport<f64>>> {
    let reports = suite_reports(attitude, panel, model.p, model.q)?;
    let path = out.join("models.json");
    write_json(Stage::Suite, &path, &reports)?;
    artifacts.push(path);
    Ok(reports)
}

/// Permutation test of one model: writes `surrogate.json`.
pub fn stage_surrogate(
    kind: SuiteModel,
    attitude: &NumericSeries<f64>,
    panel: &EmotionPanel<f64>,
    model: &ModelArgs,
    surrogate: &SurrogateArgs,
    out: &Path,
    artifacts: &mut Vec<PathBuf>,
) -> CliResult<SurrogateSummary> {
    let summary = surrogate_summary(kind, attitude, panel, model, surrogate)?;
    let path = out.join("surrogate.json");
    write_json(Stage::Surrogate, &path, &summary)?;
    artifacts.push(path);
    Ok(summary)
}

/// Runs every stage and writes all artifacts plus `manifest.json`.
pub fn run_pipeline(cfg: &PipelineConfig) -> CliResult<Manifest> {
    let out = &cfg.out;
    let mut artifacts: Vec<PathBuf> = Vec::new();
    let mut digests = BTreeMap::new();
    for (key, path) in [("lexicon", &cfg.lexicon), ("messages", &cfg.messages), ("attitude", &cfg.attitude)] {
        digests.insert(key.to_string(), sha256_file(path)?);
    }

    let lexicon = read_lexicon(&cfg.lexicon)?;
    let attitude = read_attitude(&cfg.attitude)?;
    let buckets = stage_ingest(&cfg.messages, cfg.min_messages, out, &mut artifacts)?;
    let threads_kept = buckets.iter().map(|b| b.thread_count).sum();
    let series = stage_score(&buckets, &lexicon, cfg.top_words, out, &mut artifacts)?;

    let a = &cfg.analysis;
    let prepared = stage_smooth(
        &EmotionPanel::from_series(&series),
        &export::series_counts(&series),
        &attitude,
        a,
        out,
        &mut artifacts,
    )?;
    let Prepared { raw, raw_attitude, smooth, smooth_attitude, gap_months, .. } = prepared;
    artifacts.extend(write_correlations(&out.join("correlations/raw"), &raw, &raw_attitude, a.corr_window, a.alpha)?);
    artifacts.extend(write_correlations(
        &out.join("correlations/smoothed"),
        &smooth,
        &smooth_attitude,
        a.corr_window,
        a.alpha,
    )?);

    let reports = stage_suite(&smooth_attitude, &smooth, &cfg.model, out, &mut artifacts)?;
    let best = best_emotion_model(&reports).expect("suite contains emotion models");
    stage_surrogate(best, &smooth_attitude, &smooth, &cfg.model, &cfg.surrogate, out, &mut artifacts)?;

    let manifest = Manifest {
        library_version: affect_core::VERSION.to_string(),
        created_at: chrono::Utc::now().to_rfc3339(),
        config: cfg.clone(),
        input_sha256: digests,
        threads_kept,
        emotion_axis: series.range(),
        analysis_axis: smooth.range(),
        gap_months,
        surrogate_model: best.name(),
        artifacts: relative(out, &artifacts),
    };
    write_json(Stage::Manifest, &out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

pub fn relative(out: &Path, paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| p.strip_prefix(out).unwrap_or(p).to_string_lossy().replace('\\', "/")).collect()
}

/// Records a failed run in `out/.failed`, or clears a stale marker on success.
pub fn mark_outcome(out: &Path, result: &CliResult<()>) {
    let marker = out.join(FAILED_MARKER);
    match result {
        Ok(()) => {
            let _ = fs::remove_file(marker);
        }
        Err(e) => {
            if fs::create_dir_all(out).is_ok() {
                let _ = fs::write(marker, format!("{e}\n"));
            }
        }
    }
}
