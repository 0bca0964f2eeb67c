use std::time::Instant;

use bestalign::{consistency_grad, solve, Solver};

use super::{emit, load_pair, AlignArgs, GradArgs, Io};
use crate::document::{AlignmentDocument, GradientBlock, SCHEMA_VERSION};
use crate::error::CliError;

pub(super) fn align(args: AlignArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let (audio, text) = load_pair(&args.pair)?;
    let start = Instant::now();
    let result = solve(&audio, &text, args.pair.metric, args.solver)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    let doc = AlignmentDocument {
        schema_version: SCHEMA_VERSION,
        command: "align".into(),
        solver: args.solver.name().into(),
        metric: args.pair.metric.name().into(),
        n: audio.len(),
        m: text.len(),
        dim: audio.dim(),
        loss: result.loss,
        path: result.path.into_indices(),
        elapsed_ms,
        gradients: None,
    };
    emit(&doc, &args.output, io, |out| {
        writeln!(out, "solver  {}", doc.solver)?;
        writeln!(out, "metric  {}", doc.metric)?;
        writeln!(out, "shape   n={} m={} d={}", doc.n, doc.m, doc.dim)?;
        writeln!(out, "loss    {}", doc.loss)?;
        writeln!(out, "time    {:.3} ms", doc.elapsed_ms)
    })
}

pub(super) fn grad(args: GradArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let (audio, text) = load_pair(&args.pair)?;
    let start = Instant::now();
    let g = consistency_grad(&audio, &text, args.pair.metric)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    let doc = AlignmentDocument {
        schema_version: SCHEMA_VERSION,
        command: "grad".into(),
        solver: Solver::Optimized.name().into(),
        metric: args.pair.metric.name().into(),
        n: audio.len(),
        m: text.len(),
        dim: audio.dim(),
        loss: g.loss,
        path: g.path.into_indices(),
        elapsed_ms,
        gradients: Some(GradientBlock {
            d_audio: g.d_audio.to_rows(),
            d_text: g.d_text.to_rows(),
        }),
    };
    emit(&doc, &args.output, io, |out| {
        let norm = |rows: &[Vec<f64>]| rows.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        let grads = doc.gradients.as_ref().expect("set above");
        writeln!(out, "metric        {}", doc.metric)?;
        writeln!(out, "loss          {}", doc.loss)?;
        writeln!(out, "|d_audio|     {}", norm(&grads.d_audio))?;
        writeln!(out, "|d_text|      {}", norm(&grads.d_text))
    })
}
