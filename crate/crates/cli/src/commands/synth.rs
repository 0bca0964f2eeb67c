use std::ffi::OsString;
use std::path::{Path, PathBuf};

use bestalign::synth::random_gaussian_sequence;
use bestalign::{generate_planted, optimize_embeddings, rng, FrameMetric};

use super::{emit, DemoArgs, Io, SynthArgs};
use crate::document::{
    to_json, write_atomic, SynthDocument, TraceDocument, TraceRow, SCHEMA_VERSION,
};
use crate::error::CliError;
use crate::format::encode_binary;

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s: OsString = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
}

pub(super) fn synth(args: SynthArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let inst = generate_planted(args.n, args.m, args.d, args.noise, args.seed)?;
    let audio_path = with_suffix(&args.prefix, ".audio.bin");
    let text_path = with_suffix(&args.prefix, ".text.bin");
    let doc_path = with_suffix(&args.prefix, ".planted.json");

    write_atomic(&audio_path, &encode_binary(&inst.audio)?)?;
    write_atomic(&text_path, &encode_binary(&inst.text)?)?;
    let doc = SynthDocument {
        schema_version: SCHEMA_VERSION,
        command: "synth".into(),
        n: args.n,
        m: args.m,
        d: args.d,
        noise_sigma: args.noise,
        seed: args.seed,
        audio_file: file_name(&audio_path),
        text_file: file_name(&text_path),
        planted: inst.planted.into_indices(),
    };
    write_atomic(&doc_path, to_json(&doc)?.as_bytes())?;
    for p in [&audio_path, &text_path, &doc_path] {
        writeln!(io.out, "wrote {}", p.display())?;
    }
    Ok(())
}

pub(super) fn demo(args: DemoArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    if args.steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    if args.n == 0 || args.m == 0 || args.d == 0 {
        return Err(CliError::Usage("--n, --m and --d must be positive".into()));
    }
    let mut r = rng::seeded(args.seed);
    let audio = random_gaussian_sequence(&mut r, args.n, args.d);
    let text = random_gaussian_sequence(&mut r, args.m, args.d);
    let metric = FrameMetric::SquaredL2;
    let trace = optimize_embeddings(&audio, &text, metric, args.steps, args.lr, args.side, args.seed)?;

    let doc = TraceDocument {
        schema_version: SCHEMA_VERSION,
        command: "demo".into(),
        metric: metric.name().into(),
        n: args.n,
        m: args.m,
        d: args.d,
        steps: args.steps,
        learning_rate: args.lr,
        side: args.side.name().into(),
        seed: args.seed,
        initial_loss: trace.initial_loss(),
        final_loss: trace.final_loss(),
        trace: trace
            .losses
            .iter()
            .zip(&trace.z_best)
            .enumerate()
            .map(|(step, (&loss, &z_best))| TraceRow { step, loss, z_best })
            .collect(),
    };
    emit(&doc, &args.output, io, |out| {
        writeln!(out, "{:>6}  {:>14}  {:>10}", "step", "loss", "z_best")?;
        let last = doc.trace.len() - 1;
        let stride = (doc.steps / 10).max(1);
        for row in doc.trace.iter().filter(|r| r.step % stride == 0 || r.step == last) {
            writeln!(out, "{:>6}  {:>14.6}  {:>10.4}", row.step, row.loss, row.z_best)?;
        }
        writeln!(
            out,
            "loss {:.6} -> {:.6} ({:.1}% reduction)",
            doc.initial_loss,
            doc.final_loss,
            100.0 * (1.0 - doc.final_loss / doc.initial_loss)
        )
    })
}
