//! Argument parsing and command dispatch.

use std::io::Write;
use std::path::{Path, PathBuf};

use bestalign::{EmbeddingSequence, FrameMetric, Solver, UpdateSide};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::document::{self, write_atomic};
use crate::error::CliError;
use crate::format::{self, InputFormat};

mod align;
pub mod bench;
mod render;
mod report;
mod synth;

pub use render::ImageFormat;

#[derive(Debug, Parser)]
#[command(name = "bestalign", version, about = "Best monotone alignment between embedding sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the best alignment and its loss.
    Align(AlignArgs),
    /// Best alignment plus the pass-through gradient for both sequences.
    Grad(GradArgs),
    /// Standardized framewise and best-alignment scores for labeled pairs.
    Report(ReportArgs),
    /// Render the distance matrix (PGM) or matrix plus path (SVG).
    Heatmap(HeatmapArgs),
    /// Generate a planted instance.
    Synth(SynthArgs),
    /// Gradient descent on the best-alignment loss for a random instance.
    Demo(DemoArgs),
    /// Time the naive and optimized solvers over a size grid.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Audio embedding file (binary or CSV).
    pub audio: PathBuf,
    /// Text embedding file (binary or CSV).
    pub text: PathBuf,
    /// Input file format; `auto` detects binary files by their magic bytes.
    #[arg(long, default_value = "auto")]
    pub format: InputFormat,
    /// Frame distance: sql2, l2 or l1.
    #[arg(long, default_value = "sql2")]
    pub metric: FrameMetric,
}

#[derive(Debug, Args)]
pub struct OutputArg {
    /// Write the JSON document here instead of stdout; a summary goes to stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AlignArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// naive, optimized or brute-force.
    #[arg(long, default_value = "optimized")]
    pub solver: Solver,
    #[command(flatten)]
    pub output: OutputArg,
}

#[derive(Debug, Args)]
pub struct GradArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    pub output: OutputArg,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Labeled pair as LABEL=AUDIO,TEXT; repeat for more rows.
    #[arg(long = "pair", required = true, value_name = "LABEL=AUDIO,TEXT")]
    pub pairs: Vec<String>,
    #[arg(long, default_value = "auto")]
    pub format: InputFormat,
    #[arg(long, default_value = "sql2")]
    pub metric: FrameMetric,
    /// Random frame pairs drawn for each baseline.
    #[arg(long, default_value_t = bestalign::analysis::DEFAULT_BASELINE_PAIRS)]
    pub n_pairs: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArg,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Image file to write.
    #[arg(long, short)]
    pub output: PathBuf,
    /// pgm or svg; inferred from the output extension when omitted.
    #[arg(long)]
    pub image_format: Option<ImageFormat>,
    /// SVG cell edge in pixels.
    #[arg(long, default_value_t = 12)]
    pub cell_size: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub d: usize,
    /// Standard deviation of the Gaussian noise added to audio frames.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Writes PREFIX.audio.bin, PREFIX.text.bin and PREFIX.planted.json.
    #[arg(long)]
    pub prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    /// Which sequence is updated: audio, text or both.
    #[arg(long, default_value = "audio")]
    pub side: UpdateSide,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    #[arg(long, default_value_t = 8)]
    pub d: usize,
    #[command(flatten)]
    pub output: OutputArg,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Audio lengths.
    #[arg(long, value_delimiter = ',', default_value = "256")]
    pub n: Vec<usize>,
    /// Text lengths.
    #[arg(long, value_delimiter = ',', default_value = "64,128,256,512")]
    pub m: Vec<usize>,
    #[arg(long, default_value_t = 64)]
    pub d: usize,
    /// Timed repetitions per solver and size; the median is reported.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArg,
}

/// Streams the commands print to.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

pub fn run(cli: Cli, io: &mut Io<'_>) -> Result<(), CliError> {
    match cli.command {
        Command::Align(a) => align::align(a, io),
        Command::Grad(a) => align::grad(a, io),
        Command::Report(a) => report::run(a, io),
        Command::Heatmap(a) => render::run(a, io),
        Command::Synth(a) => synth::synth(a, io),
        Command::Demo(a) => synth::demo(a, io),
        Command::Bench(a) => bench::run(a, io),
    }
}

fn load(path: &Path, fmt: InputFormat) -> Result<EmbeddingSequence, CliError> {
    format::load(path, fmt).map_err(|e| CliError::from(e).context(path.display()))
}

fn load_pair(p: &PairArgs) -> Result<(EmbeddingSequence, EmbeddingSequence), CliError> {
    let audio = load(&p.audio, p.format)?;
    let text = load(&p.text, p.format)?;
    bestalign::validate_pair(&audio, &text)?;
    Ok((audio, text))
}

/// Send `doc` to `--output` when given, printing `summary` to stdout instead;
/// otherwise the document itself goes to stdout.
fn emit<T: Serialize>(
    doc: &T,
    output: &OutputArg,
    io: &mut Io<'_>,
    summary: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let json = document::to_json(doc)?;
    match &output.output {
        Some(path) => {
            write_atomic(path, json.as_bytes())?;
            summary(io.out)?;
        }
        None => io.out.write_all(json.as_bytes())?,
    }
    Ok(())
}
