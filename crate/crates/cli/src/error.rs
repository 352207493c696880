use std::fmt;
use std::path::Path;

use affect_core::ErrorKind;

pub type CliResult<T> = Result<T, CliError>;

/// Pipeline stage that produced a failure; named in every diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Lexicon,
    Ingest,
    Attitude,
    Series,
    Score,
    Gaps,
    Align,
    Smooth,
    Correlate,
    Forecast,
    Suite,
    Surrogate,
    Report,
    Manifest,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Lexicon => "lexicon",
            Stage::Ingest => "ingest",
            Stage::Attitude => "attitude",
            Stage::Series => "series",
            Stage::Score => "score",
            Stage::Gaps => "gaps",
            Stage::Align => "align",
            Stage::Smooth => "smooth",
            Stage::Correlate => "correlate",
            Stage::Forecast => "forecast",
            Stage::Suite => "suite",
            Stage::Surrogate => "surrogate",
            Stage::Report => "report",
            Stage::Manifest => "manifest",
        }
    }
}

/// Failure class; fixes the process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Input,
    Precondition,
    Internal,
}

impl ExitKind {
    pub fn code(self) -> i32 {
        match self {
            ExitKind::Input => 2,
            ExitKind::Precondition => 3,
            ExitKind::Internal => 4,
        }
    }
}

impl From<ErrorKind> for ExitKind {
    fn from(k: ErrorKind) -> Self {
        match k {
            ErrorKind::Input => ExitKind::Input,
            ErrorKind::Precondition => ExitKind::Precondition,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub stage: Stage,
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn new(stage: Stage, kind: ExitKind, message: impl Into<String>) -> Self {
        CliError { stage, kind, message: message.into() }
    }

    pub fn core(stage: Stage, e: affect_core::Error) -> Self {
        CliError::new(stage, e.kind().into(), e.to_string())
    }

    /// Unreadable input file.
    pub fn io_input(stage: Stage, path: &Path, e: impl fmt::Display) -> Self {
        CliError::new(stage, ExitKind::Input, format!("{}: {e}", path.display()))
    }

    /// Output that could not be written.
    pub fn io_output(stage: Stage, path: &Path, e: impl fmt::Display) -> Self {
        CliError::new(stage, ExitKind::Internal, format!("writing {}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.code()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage failed: {}", self.stage.name(), self.message)
    }
}

impl std::error::Error for CliError {}
