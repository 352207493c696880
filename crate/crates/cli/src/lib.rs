//! Command-line front end: each pipeline stage as a subcommand, plus `run`
//! for the whole chain. Outputs are plot-ready CSV and JSON files.

pub mod commands;
pub mod config;
pub mod error;
pub mod pipeline;

pub use config::{AnalysisArgs, GapPolicy, ModelArgs, PipelineConfig, SurrogateArgs};
pub use error::{CliError, CliResult, ExitKind, Stage};
pub use pipeline::run_pipeline;
