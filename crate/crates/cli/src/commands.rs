use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::config::{AnalysisArgs, GapPolicy, ModelArgs, PipelineConfig, SurrogateArgs};
use crate::error::{CliError, CliResult, ExitKind, Stage};
use crate::pipeline::{self, mark_outcome};

#[derive(Debug, Parser)]
#[command(name = "affect", version, about = "Affective time series from discussion subjects and attitude forecasting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roll messages up into threads and monthly subject buckets.
    Ingest(IngestArgs),
    /// Score monthly buckets against the lexicon.
    Score(ScoreArgs),
    /// Resolve gaps, align with the attitude series and smooth.
    Smooth(SmoothArgs),
    /// Rolling correlations for every pair of series.
    Correlate(CorrelateArgs),
    /// Fit and evaluate a single suite model.
    Forecast(ForecastArgs),
    /// Fit and evaluate all ten suite models.
    Suite(SuiteArgs),
    /// Permutation surrogate test for one model.
    Surrogate(SurrogateCmdArgs),
    /// Summarize `models.json` and `surrogate.json`.
    Report(ReportArgs),
    /// Run the whole pipeline.
    Run(PipelineConfig),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub messages: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub min_messages: usize,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    /// `buckets.json` written by `ingest`.
    #[arg(long)]
    pub buckets: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub top_words: usize,
}

#[derive(Debug, Args)]
pub struct SmoothArgs {
    /// `emotion_series.csv` written by `score`.
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long)]
    pub attitude: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Emotion series CSV on the attitude axis.
    #[arg(long)]
    pub series: PathBuf,
    /// `month,rate` CSV on the same axis.
    #[arg(long)]
    pub attitude: PathBuf,
    /// Directory receiving one CSV per pair.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 13)]
    pub corr_window: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct SeriesInputs {
    /// Smoothed emotion series CSV.
    #[arg(long)]
    pub series: PathBuf,
    /// Smoothed `month,rate` CSV on the same axis.
    #[arg(long)]
    pub attitude: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub inputs: SeriesInputs,
    /// Suite model name, e.g. `ar` or `both-arousal`.
    #[arg(long)]
    pub model: String,
    /// Fit on the first N months and evaluate on the rest (not the
    /// reference in-sample evaluation).
    #[arg(long)]
    pub holdout: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[command(flatten)]
    pub inputs: SeriesInputs,
}

#[derive(Debug, Args)]
pub struct SurrogateCmdArgs {
    #[command(flatten)]
    pub inputs: SeriesInputs,
    /// Model to test; defaults to the lowest-MAE emotion model.
    #[arg(long)]
    pub model: Option<String>,
    #[command(flatten)]
    pub surrogate: SurrogateArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory holding `models.json` and optionally `surrogate.json`.
    #[arg(long)]
    pub out: PathBuf,
}

impl Cli {
    pub fn run(&self) -> CliResult<()> {
        let out = self.command.out_dir();
        let result = self.command.execute();
        mark_outcome(out, &result);
        result
    }
}

impl Command {
    fn out_dir(&self) -> &Path {
        match self {
            Command::Ingest(a) => &a.out,
            Command::Score(a) => &a.out,
            Command::Smooth(a) => &a.out,
            Command::Correlate(a) => &a.out,
            Command::Forecast(a) => &a.inputs.out,
            Command::Suite(a) => &a.inputs.out,
            Command::Surrogate(a) => &a.inputs.out,
            Command::Report(a) => &a.out,
            Command::Run(c) => &c.out,
        }
    }

    fn execute(&self) -> CliResult<()> {
        let mut artifacts = Vec::new();
        match self {
            Command::Ingest(a) => {
                pipeline::stage_ingest(&a.messages, a.min_messages, &a.out, &mut artifacts)?;
            }
            Command::Score(a) => {
                let lexicon = pipeline::read_lexicon(&a.lexicon)?;
                let buckets = pipeline::read_buckets(&a.buckets)?;
                pipeline::stage_score(&buckets, &lexicon, a.top_words, &a.out, &mut artifacts)?;
            }
            Command::Smooth(a) => {
                let (panel, counts) = pipeline::read_series(&a.series)?;
                let attitude = pipeline::read_attitude(&a.attitude)?;
                let prepared = pipeline::stage_smooth(&panel, &counts, &attitude, &a.analysis, &a.out, &mut artifacts)?;
                if a.analysis.gap_policy == GapPolicy::LinearInterpolate && !prepared.gap_months.is_empty() {
                    eprintln!("interpolated months: {}", prepared.gap_months.join(", "));
                }
            }
            Command::Correlate(a) => {
                let (panel, _) = pipeline::read_series(&a.series)?;
                let attitude = pipeline::read_attitude(&a.attitude)?;
                pipeline::write_correlations(&a.out, &panel, &attitude, a.corr_window, a.alpha)?;
            }
            Command::Forecast(a) => {
                let kind = pipeline::parse_model(&a.model)?;
                let (panel, attitude) = read_inputs(&a.inputs)?;
                let p = &a.inputs.model;
                let (report, path) = match a.holdout {
                    None => (
                        pipeline::forecast_model(kind, &attitude, &panel, p.p, p.q)?,
                        a.inputs.out.join(format!("model_{}.json", kind.name())),
                    ),
                    Some(n) => (
                        pipeline::forecast_holdout(kind, &attitude, &panel, p.p, p.q, n)?,
                        a.inputs.out.join(format!("model_{}_holdout.json", kind.name())),
                    ),
                };
                pipeline::write_json(Stage::Forecast, &path, &report)?;
            }
            Command::Suite(a) => {
                let (panel, attitude) = read_inputs(&a.inputs)?;
                pipeline::stage_suite(&attitude, &panel, &a.inputs.model, &a.inputs.out, &mut artifacts)?;
            }
            Command::Surrogate(a) => {
                let (panel, attitude) = read_inputs(&a.inputs)?;
                let kind = match &a.model {
                    Some(name) => pipeline::parse_model(name)?,
                    None => {
                        let reports = pipeline::suite_reports(&attitude, &panel, a.inputs.model.p, a.inputs.model.q)?;
                        pipeline::best_emotion_model(&reports).expect("suite contains emotion models")
                    }
                };
                pipeline::stage_surrogate(
                    kind,
                    &attitude,
                    &panel,
                    &a.inputs.model,
                    &a.surrogate,
                    &a.inputs.out,
                    &mut artifacts,
                )?;
            }
            Command::Report(a) => {
                let text = render_report(&a.out)?;
                print!("{text}");
                let path = a.out.join("report.txt");
                fs::write(&path, text).map_err(|e| CliError::io_output(Stage::Report, &path, e))?;
            }
            Command::Run(cfg) => {
                let manifest = pipeline::run_pipeline(cfg)?;
                eprintln!("wrote {} artifacts to {}", manifest.artifacts.len() + 1, cfg.out.display());
            }
        }
        Ok(())
    }
}

fn read_inputs(a: &SeriesInputs) -> CliResult<(affect_core::EmotionPanel, affect_core::NumericSeries)> {
    let (panel, _) = pipeline::read_series(&a.series)?;
    let attitude = pipeline::read_attitude(&a.attitude)?;
    Ok((panel, attitude))
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io_input(Stage::Report, path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::new(Stage::Report, ExitKind::Input, format!("{}: {e}", path.display())))
}

/// Plain-text table of model errors and the surrogate verdict.
pub fn render_report(dir: &Path) -> CliResult<String> {
    let models = read_json(&dir.join("models.json"))?;
    let models = models
        .as_array()
        .ok_or_else(|| CliError::new(Stage::Report, ExitKind::Input, "models.json is not an array"))?;
    let mut s = String::new();
    let _ = writeln!(s, "{:<18} {:>10} {:>12} {:>5}", "model", "mae", "sse", "rank");
    let ar_mae = models.iter().find(|m| m["name"] == "ar").and_then(|m| m["mae"].as_f64());
    for m in models {
        let name = m["name"].as_str().unwrap_or("?");
        let mae = m["mae"].as_f64().unwrap_or(f64::NAN);
        let sse = m["sse"].as_f64().unwrap_or(f64::NAN);
        let rank = m["rank"].as_u64().unwrap_or(0);
        let _ = write!(s, "{name:<18} {mae:>10.4} {sse:>12.4} {rank:>5}");
        if let Some(base) = ar_mae.filter(|_| name != "ar") {
            let _ = write!(s, "  ({:+.1}% vs ar)", 100.0 * (mae - base) / base);
        }
        s.push('\n');
    }
    let surrogate = dir.join("surrogate.json");
    if surrogate.exists() {
        let v = read_json(&surrogate)?;
        let _ = writeln!(
            s,
            "\nsurrogate test of {}: empirical mae {:.4}, p_hat {} over {} permutations (seed {})",
            v["model"].as_str().unwrap_or("?"),
            v["empirical_mae"].as_f64().unwrap_or(f64::NAN),
            v["p_hat"],
            v["n"],
            v["seed"],
        );
    }
    Ok(s)
}
