use thiserror::Error;

use crate::seq::FrameMetric;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlignError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("alignment has {found} entries but the audio sequence has {expected} frames")]
    Length { expected: usize, found: usize },

    #[error("alignment index {index} at position {position} is out of range for {m_text} text frames")]
    Index {
        position: usize,
        index: usize,
        m_text: usize,
    },

    #[error("brute-force enumeration needs {count} alignments, cap is {cap}")]
    InstanceTooLarge { count: String, cap: u64 },

    #[error("{metric} is not differentiable at aligned pair (audio {audio}, text {text})")]
    NonDifferentiablePoint {
        metric: FrameMetric,
        audio: usize,
        text: usize,
    },

    #[error("degenerate baseline: all {n_pairs} sampled distances are equal")]
    DegenerateBaseline { n_pairs: usize },

    #[error("divergence detected at step {step}: loss {loss} exceeds 10x the initial loss {initial}")]
    DivergenceDetected { step: usize, loss: f64, initial: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, AlignError>;
