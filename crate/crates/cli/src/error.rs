use std::fmt;

use wikiclean::pipeline::PipelineError;

/// CLI error carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config values: exit 1.
    Usage(String),
    /// Anything wrong with input data or I/O: exit 2.
    Data(String),
    /// Pipeline failures keep their own code mapping (1/2/3).
    Pipeline(PipelineError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Pipeline(e) => e.exit_code(),
        }
    }

    pub fn data(e: impl fmt::Display) -> Self {
        CliError::Data(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Data(msg) => write!(f, "{msg}"),
            CliError::Pipeline(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Pipeline(e) => e.source(),
            _ => None,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError::Pipeline(e)
    }
}

impl From<wikiclean::pipeline::ConfigError> for CliError {
    fn from(e: wikiclean::pipeline::ConfigError) -> Self {
        CliError::Pipeline(PipelineError::Config(e))
    }
}

impl From<wikiclean::corpus::CorpusError> for CliError {
    fn from(e: wikiclean::corpus::CorpusError) -> Self {
        CliError::Pipeline(PipelineError::Corpus(e))
    }
}

impl From<wikiclean::pipeline::ManifestError> for CliError {
    fn from(e: wikiclean::pipeline::ManifestError) -> Self {
        CliError::Pipeline(PipelineError::Manifest(e))
    }
}

impl From<wikiclean::threshold::ThresholdError> for CliError {
    fn from(e: wikiclean::threshold::ThresholdError) -> Self {
        CliError::Pipeline(PipelineError::Threshold(e))
    }
}

impl From<wikiclean::heuristics::MetricsError> for CliError {
    fn from(e: wikiclean::heuristics::MetricsError) -> Self {
        CliError::Pipeline(PipelineError::Metrics(e))
    }
}

impl From<wikiclean::analysis::AnalysisError> for CliError {
    fn from(e: wikiclean::analysis::AnalysisError) -> Self {
        CliError::Pipeline(PipelineError::Analysis(e))
    }
}
