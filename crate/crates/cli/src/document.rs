//! JSON documents written by the commands.
//!
//! Every document is a single object with a `schema_version` and a `command`
//! field so downstream tools can dispatch on it without sniffing.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentDocument {
    pub schema_version: u32,
    pub command: String,
    pub solver: String,
    pub metric: String,
    pub n: usize,
    pub m: usize,
    pub dim: usize,
    pub loss: f64,
    pub path: Vec<usize>,
    pub elapsed_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradients: Option<GradientBlock>,
}

/// Gradient grids, one inner list per frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientBlock {
    pub d_audio: Vec<Vec<f64>>,
    pub d_text: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub command: String,
    pub metric: String,
    pub n_pairs: usize,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    /// `"ok"` or `"error"`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<ReportScores>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportScores {
    pub n: usize,
    pub m: usize,
    pub dim: usize,
    pub z_framewise: f64,
    pub z_best: f64,
    pub loss_framewise: f64,
    pub loss_best: f64,
    pub baseline_mean: f64,
    pub baseline_std: f64,
    pub framewise_interpretation: String,
    pub best_interpretation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthDocument {
    pub schema_version: u32,
    pub command: String,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub noise_sigma: f64,
    pub seed: u64,
    /// File names of the generated sequences, relative to this document.
    pub audio_file: String,
    pub text_file: String,
    pub planted: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub schema_version: u32,
    pub command: String,
    pub metric: String,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub steps: usize,
    pub learning_rate: f64,
    pub side: String,
    pub seed: u64,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub trace: Vec<TraceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub loss: f64,
    pub z_best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchDocument {
    pub schema_version: u32,
    pub command: String,
    pub metric: String,
    pub d: usize,
    pub reps: usize,
    pub seed: u64,
    pub cells: Vec<BenchCell>,
    /// Exponent of `m` fitted by least squares on log(time) against log(m),
    /// one entry per `n`.
    pub slopes: Vec<BenchSlope>,
    pub losses_agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    pub n: usize,
    pub m: usize,
    pub naive_median_ms: f64,
    pub optimized_median_ms: f64,
    pub naive_loss: f64,
    pub optimized_loss: f64,
    pub paths_agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSlope {
    pub n: usize,
    pub naive: f64,
    pub optimized: f64,
}

pub fn to_json<T: Serialize>(doc: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(doc)
        .map_err(|e| CliError::Input(format!("cannot serialize document: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Write through a temporary file in the destination directory, then rename
/// over `path`, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let fail = |e: std::io::Error| CliError::Input(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))
            .map_err(fail)?;
    }
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}
