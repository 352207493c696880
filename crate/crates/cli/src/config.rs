use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

/// How months without any lexicon match are handled before analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapPolicy {
    /// Stop with a diagnostic naming the first empty month.
    Fail,
    /// Fill gaps by linear interpolation (edges take the nearest value).
    LinearInterpolate,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalysisArgs {
    /// Months in the Hamming smoothing window.
    #[arg(long, default_value_t = 4)]
    pub smooth_window: usize,
    /// Months in the centred correlation window (odd).
    #[arg(long, default_value_t = 13)]
    pub corr_window: usize,
    /// Significance level for correlation flags.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = GapPolicy::Fail)]
    pub gap_policy: GapPolicy,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Autoregressive order.
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    /// Exogenous lag order.
    #[arg(long, default_value_t = 3)]
    pub q: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SurrogateArgs {
    /// Number of permutation surrogates.
    #[arg(long, default_value_t = 1000)]
    pub surrogates: usize,
    /// Seed for all randomness in the run.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include every surrogate MAE in the report, not only quantiles.
    #[arg(long)]
    pub full_surrogates: bool,
}

/// Everything a full run needs. Defaults reproduce the reference settings.
#[derive(Debug, Clone, Args, Serialize)]
pub struct PipelineConfig {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub messages: PathBuf,
    #[arg(long)]
    pub attitude: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Threads with fewer messages are dropped.
    #[arg(long, default_value_t = 3)]
    pub min_messages: usize,
    /// Lexicon words listed per yearly period.
    #[arg(long, default_value_t = 20)]
    pub top_words: usize,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub surrogate: SurrogateArgs,
}

impl PipelineConfig {
    /// Reference settings for the given inputs.
    pub fn reference(lexicon: PathBuf, messages: PathBuf, attitude: PathBuf, out: PathBuf) -> Self {
        PipelineConfig {
            lexicon,
            messages,
            attitude,
            out,
            min_messages: 3,
            top_words: 20,
            analysis: AnalysisArgs { smooth_window: 4, corr_window: 13, alpha: 0.05, gap_policy: GapPolicy::Fail },
            model: ModelArgs { p: 1, q: 3 },
            surrogate: SurrogateArgs { surrogates: 1000, seed: 0, full_surrogates: false },
        }
    }
}
