//! Solver timing over a size grid.
//!
//! Timings are single-threaded and sequential so the two solvers are
//! measured under identical conditions.

use std::time::Instant;

use bestalign::synth::random_gaussian_sequence;
use bestalign::{rng, solve_naive, solve_optimized, EmbeddingSequence, FrameMetric};

use super::{emit, BenchArgs, Io};
use crate::document::{BenchCell, BenchDocument, BenchSlope, SCHEMA_VERSION};
use crate::error::CliError;

/// Relative tolerance for declaring the two solvers' losses equal.
pub const LOSS_AGREEMENT_TOL: f64 = 1e-12;

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len() / 2;
    if values.len() % 2 == 1 {
        values[k]
    } else {
        0.5 * (values[k - 1] + values[k])
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn time_ms<T>(reps: usize, mut f: impl FnMut() -> T) -> (f64, T) {
    let mut last = f();
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        last = std::hint::black_box(f());
        samples.push(start.elapsed().as_secs_f64() * 1e3);
    }
    (median(&mut samples), last)
}

pub fn measure(
    ns: &[usize],
    ms: &[usize],
    d: usize,
    reps: usize,
    seed: u64,
) -> Result<BenchDocument, CliError> {
    if ns.is_empty() || ms.is_empty() || ns.iter().chain(ms).any(|&v| v == 0) || d == 0 || reps == 0 {
        return Err(CliError::Usage("bench sizes and --reps must be positive".into()));
    }
    let metric = FrameMetric::SquaredL2;
    let mut cells = Vec::new();
    let mut slopes = Vec::new();
    for (a, &n) in ns.iter().enumerate() {
        for (b, &m) in ms.iter().enumerate() {
            let mut r = rng::seeded(rng::derive_seed(seed, (a * ms.len() + b) as u64));
            let audio: EmbeddingSequence = random_gaussian_sequence(&mut r, n, d);
            let text = random_gaussian_sequence(&mut r, m, d);
            // One untimed call each warms caches and the allocator.
            let (naive_ms, naive) = time_ms(reps, || solve_naive(&audio, &text, metric));
            let (optimized_ms, optimized) = time_ms(reps, || solve_optimized(&audio, &text, metric));
            let (naive, optimized) = (naive?, optimized?);
            cells.push(BenchCell {
                n,
                m,
                naive_median_ms: naive_ms,
                optimized_median_ms: optimized_ms,
                naive_loss: naive.loss,
                optimized_loss: optimized.loss,
                paths_agree: naive.path == optimized.path,
            });
        }
        if ms.len() >= 2 {
            let row = &cells[cells.len() - ms.len()..];
            let xs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
            let naive: Vec<f64> = row.iter().map(|c| c.naive_median_ms).collect();
            let opt: Vec<f64> = row.iter().map(|c| c.optimized_median_ms).collect();
            slopes.push(BenchSlope {
                n,
                naive: log_log_slope(&xs, &naive),
                optimized: log_log_slope(&xs, &opt),
            });
        }
    }
    let losses_agree = cells.iter().all(|c| {
        let scale = c.naive_loss.abs().max(c.optimized_loss.abs()).max(f64::MIN_POSITIVE);
        (c.naive_loss - c.optimized_loss).abs() <= LOSS_AGREEMENT_TOL * scale
    });
    Ok(BenchDocument {
        schema_version: SCHEMA_VERSION,
        command: "bench".into(),
        metric: metric.name().into(),
        d,
        reps,
        seed,
        cells,
        slopes,
        losses_agree,
    })
}

pub(super) fn run(args: BenchArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let doc = measure(&args.n, &args.m, args.d, args.reps, args.seed)?;
    emit(&doc, &args.output, io, |out| {
        writeln!(out, "{:>6} {:>6}  {:>12}  {:>12}  paths", "n", "m", "naive ms", "optimized ms")?;
        for c in &doc.cells {
            writeln!(
                out,
                "{:>6} {:>6}  {:>12.3}  {:>12.3}  {}",
                c.n,
                c.m,
                c.naive_median_ms,
                c.optimized_median_ms,
                if c.paths_agree { "equal" } else { "DIFFER" }
            )?;
        }
        for s in &doc.slopes {
            writeln!(out, "n={}: slope in m, naive {:.3}, optimized {:.3}", s.n, s.naive, s.optimized)?;
        }
        writeln!(out, "losses agree: {}", doc.losses_agree)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power_law() {
        let xs = [64.0, 128.0, 256.0, 512.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
        assert!((log_log_slope(&xs, &ys) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn small_grid_agrees() {
        let doc = measure(&[8], &[2, 4], 3, 1, 1).unwrap();
        assert_eq!(doc.cells.len(), 2);
        assert_eq!(doc.slopes.len(), 1);
        assert!(doc.losses_agree);
        assert!(doc.cells.iter().all(|c| c.paths_agree));
        assert!(measure(&[8], &[0], 3, 1, 1).is_err());
    }
}
