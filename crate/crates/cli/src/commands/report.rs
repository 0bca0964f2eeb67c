use std::path::PathBuf;

use bestalign::{consistency_report, EmbeddingSequence, Execution};

use super::{emit, load, Io, ReportArgs};
use crate::document::{ReportDocument, ReportRow, ReportScores, SCHEMA_VERSION};
use crate::error::CliError;

struct LabeledPair {
    label: String,
    audio: PathBuf,
    text: PathBuf,
}

fn parse_pair(arg: &str) -> Result<LabeledPair, CliError> {
    let bad = || CliError::Usage(format!("--pair expects LABEL=AUDIO,TEXT, got '{arg}'"));
    let (label, files) = arg.split_once('=').ok_or_else(bad)?;
    let (audio, text) = files.split_once(',').ok_or_else(bad)?;
    if label.is_empty() || audio.is_empty() || text.is_empty() {
        return Err(bad());
    }
    Ok(LabeledPair {
        label: label.to_string(),
        audio: audio.into(),
        text: text.into(),
    })
}

pub(super) fn run(args: ReportArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let parsed = args
        .pairs
        .iter()
        .map(|s| parse_pair(s))
        .collect::<Result<Vec<_>, _>>()?;
    let inputs: Vec<(String, EmbeddingSequence, EmbeddingSequence)> = parsed
        .into_iter()
        .map(|p| Ok((p.label, load(&p.audio, args.format)?, load(&p.text, args.format)?)))
        .collect::<Result<_, CliError>>()?;

    // A failing row (degenerate baseline, mismatched dimensions) is recorded
    // in the table and the remaining rows still run.
    let rows = Execution::default().map(&inputs, |(label, audio, text)| {
        match consistency_report(label, audio, text, args.metric, args.n_pairs, args.seed) {
            Ok(r) => ReportRow {
                label: label.clone(),
                status: "ok".into(),
                scores: Some(ReportScores {
                    n: audio.len(),
                    m: text.len(),
                    dim: audio.dim(),
                    z_framewise: r.z_framewise,
                    z_best: r.z_best,
                    loss_framewise: r.loss_framewise,
                    loss_best: r.loss_best,
                    baseline_mean: r.baseline.mean,
                    baseline_std: r.baseline.std,
                    framewise_interpretation: r.framewise_interpretation().to_string(),
                    best_interpretation: r.best_interpretation().to_string(),
                }),
                error: None,
            },
            Err(e) => ReportRow {
                label: label.clone(),
                status: "error".into(),
                scores: None,
                error: Some(e.to_string()),
            },
        }
    });

    let doc = ReportDocument {
        schema_version: SCHEMA_VERSION,
        command: "report".into(),
        metric: args.metric.name().into(),
        n_pairs: args.n_pairs,
        seed: args.seed,
        rows,
    };
    for row in doc.rows.iter().filter(|r| r.status != "ok") {
        writeln!(io.err, "warning: row '{}': {}", row.label, row.error.as_deref().unwrap_or(""))?;
    }
    emit(&doc, &args.output, io, |out| {
        let width = doc.rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(5);
        writeln!(out, "{:<width$}  {:>12}  {:>12}  interpretation", "label", "z_framewise", "z_best")?;
        for row in &doc.rows {
            match &row.scores {
                Some(s) => writeln!(
                    out,
                    "{:<width$}  {:>12.4}  {:>12.4}  {}",
                    row.label, s.z_framewise, s.z_best, s.best_interpretation
                )?,
                None => writeln!(
                    out,
                    "{:<width$}  {:>12}  {:>12}  error: {}",
                    row.label,
                    "-",
                    "-",
                    row.error.as_deref().unwrap_or("")
                )?,
            }
        }
        Ok(())
    })
}
