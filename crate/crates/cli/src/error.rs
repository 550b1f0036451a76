use std::path::PathBuf;

use crate::config::Diagnostic;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}:{column}: {message}", file.display())]
    Syntax { file: PathBuf, line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error("override {assignment:?}: {message}")]
    Override { assignment: String, message: String },
    #[error("{} invalid setting(s)", .0.len())]
    Invalid(Vec<Diagnostic>),
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 1 for I/O failures, 2 for parse errors, 3 for invariant violations.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Read { .. } | Self::Write { .. } => 1,
            Self::Syntax { .. } | Self::Field { .. } | Self::Override { .. } => 2,
            Self::Invalid(_) => 3,
        }
    }
}
