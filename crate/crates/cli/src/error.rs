use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("missing artifact: {}", .0.display())]
    MissingArtifact(PathBuf),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: gapbridge_core::Error,
    },
}

impl CliError {
    /// 2 config error, 3 numeric failure, 4 missing or unreadable artifact.
    pub fn exit_code(&self) -> i32 {
        use gapbridge_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::MissingArtifact(_) => 4,
            CliError::Stage { source, .. } => match source {
                E::Config(_) | E::Shape(_) => 2,
                E::Numeric(_) => 3,
                E::Io { .. } | E::Format { .. } | E::SizeMismatch { .. } => 4,
            },
        }
    }

    pub fn stage(&self) -> Option<&'static str> {
        match self {
            CliError::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }
}
