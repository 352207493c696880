//! Affective time series from discussion subject lines, and forecasting of
//! an external attitude series from them.
//!
//! The pipeline runs
//!
//! 1. [`lexicon`]: load a valence/arousal/dominance word lexicon, tokenize text;
//! 2. [`ingest`]: parse messages, roll them up into threads, drop small
//!    threads and bucket thread subjects by month;
//! 3. [`emotion`]: monthly frequency-weighted mean and deviation per dimension;
//! 4. [`analysis`]: Hamming smoothing and centred rolling correlations with
//!    t-test significance;
//! 5. [`forecast`]: least-squares autoregressive models with lagged emotion
//!    inputs, the ten-model comparison and permutation surrogates.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`.

pub mod analysis;
pub mod emotion;
pub mod error;
pub mod export;
pub mod forecast;
pub mod ingest;
pub mod lexicon;
pub mod linalg;
pub mod month;
pub mod scalar;
pub mod stats;

pub use error::{Error, ErrorKind, Result};
pub use month::{Month, MonthRange};
pub use scalar::Scalar;

pub type Lexicon = lexicon::Lexicon<f64>;
pub type LexiconEntry = lexicon::LexiconEntry<f64>;
pub type AttitudeSeries = ingest::AttitudeSeries<f64>;
pub type MonthEmotion = emotion::MonthEmotion<f64>;
pub type EmotionSeries = emotion::EmotionSeries<f64>;
pub type EmotionPanel = emotion::EmotionPanel<f64>;
pub type WeightedWord = emotion::WeightedWord<f64>;
pub type NumericSeries = analysis::NumericSeries<f64>;
pub type CorrelationTrack = analysis::CorrelationTrack<f64>;
pub type ArmaModel = forecast::ArmaModel<f64>;
pub type EvaluationReport = forecast::EvaluationReport<f64>;
pub type SurrogateReport = forecast::SurrogateReport<f64>;
pub type ModelReport = forecast::ModelReport<f64>;

pub type Lexicon32 = lexicon::Lexicon<f32>;
pub type EmotionSeries32 = emotion::EmotionSeries<f32>;
pub type NumericSeries32 = analysis::NumericSeries<f32>;
pub type ArmaModel32 = forecast::ArmaModel<f32>;

pub use forecast::{ArmaSpec, SuiteModel};
pub use ingest::{MessageRecord, MonthlyBucket, ThreadSummary};
pub use lexicon::Dimension;

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
