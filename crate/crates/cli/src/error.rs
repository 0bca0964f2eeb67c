use std::fmt;

use bestalign::AlignError;

use crate::format::FormatError;

/// Command failure carrying its process exit status.
///
/// 1 usage, 2 parse/validation/IO, 3 dimension mismatch, 4 non-differentiable
/// point, 5 divergence.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Dimension(String),
    NonDifferentiable(String),
    Divergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Dimension(_) => 3,
            CliError::NonDifferentiable(_) => 4,
            CliError::Divergence(_) => 5,
        }
    }

    pub fn context(self, what: impl fmt::Display) -> Self {
        let wrap = |m: String| format!("{what}: {m}");
        match self {
            CliError::Usage(m) => CliError::Usage(wrap(m)),
            CliError::Input(m) => CliError::Input(wrap(m)),
            CliError::Dimension(m) => CliError::Dimension(wrap(m)),
            CliError::NonDifferentiable(m) => CliError::NonDifferentiable(wrap(m)),
            CliError::Divergence(m) => CliError::Divergence(wrap(m)),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m)
            | CliError::Input(m)
            | CliError::Dimension(m)
            | CliError::NonDifferentiable(m)
            | CliError::Divergence(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<AlignError> for CliError {
    fn from(e: AlignError) -> Self {
        let msg = e.to_string();
        match e {
            AlignError::Dimension { .. } => CliError::Dimension(msg),
            AlignError::NonDifferentiablePoint { .. } => CliError::NonDifferentiable(msg),
            AlignError::DivergenceDetected { .. } => CliError::Divergence(msg),
            AlignError::InvalidArgument(_) => CliError::Usage(msg),
            _ => CliError::Input(msg),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
