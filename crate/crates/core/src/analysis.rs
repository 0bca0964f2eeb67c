//! Standardized consistency scores.
//!
//! A loss is reported as `z = (loss - mu) / sigma`, where `mu` and `sigma`
//! are the mean and sample standard deviation of frame distances between
//! randomly paired audio and text frames. Zero means no better than random
//! pairing; negative means a stronger correspondence than random.

use std::fmt;

use rand::Rng as _;

use crate::align::{distance_matrix_with, solve_optimized};
use crate::error::{AlignError, Result};
use crate::exec::Execution;
use crate::rng;
use crate::seq::{aligned_loss, validate_pair, Alignment, EmbeddingSequence, FrameMetric};
use crate::synth::random_gaussian_sequence;

/// Number of random frame pairs drawn for a baseline by default.
pub const DEFAULT_BASELINE_PAIRS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Uniform with replacement from a seeded generator.
    Random,
    /// Every (audio, text) frame pair exactly once.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineStats {
    pub mean: f64,
    pub std: f64,
    pub n_pairs: usize,
    pub seed: u64,
    pub metric: FrameMetric,
    pub sampling: Sampling,
}

impl BaselineStats {
    pub fn z(&self, loss: f64) -> f64 {
        (loss - self.mean) / self.std
    }
}

/// Mean and sample standard deviation of `n_pairs` frame distances between
/// uniformly drawn audio and text frames.
pub fn baseline_stats(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
    n_pairs: usize,
    seed: u64,
) -> Result<BaselineStats> {
    validate_pair(audio, text)?;
    if n_pairs < 2 {
        return Err(AlignError::InvalidArgument(format!(
            "baseline needs at least 2 pairs, got {n_pairs}"
        )));
    }
    let mut r = rng::seeded(seed);
    let samples: Vec<f64> = (0..n_pairs)
        .map(|_| {
            let i = r.random_range(0..audio.len());
            let j = r.random_range(0..text.len());
            metric.distance(audio.frame(i), text.frame(j))
        })
        .collect();
    let (mean, std) = mean_std(&samples)?;
    Ok(BaselineStats {
        mean,
        std,
        n_pairs,
        seed,
        metric,
        sampling: Sampling::Random,
    })
}

/// Baseline over the full distance grid instead of a random sample.
pub fn baseline_stats_exhaustive(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
) -> Result<BaselineStats> {
    let grid = distance_matrix_with(audio, text, metric, Execution::Sequential)?;
    let n_pairs = grid.values().len();
    if n_pairs < 2 {
        return Err(AlignError::InvalidArgument(
            "exhaustive baseline needs at least 2 frame pairs".into(),
        ));
    }
    let (mean, std) = mean_std(grid.values())?;
    Ok(BaselineStats {
        mean,
        std,
        n_pairs,
        seed: 0,
        metric,
        sampling: Sampling::Exhaustive,
    })
}

fn mean_std(samples: &[f64]) -> Result<(f64, f64)> {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let std = var.sqrt();
    if !(std > 0.0) || samples.iter().all(|&x| x == samples[0]) {
        return Err(AlignError::DegenerateBaseline {
            n_pairs: samples.len(),
        });
    }
    Ok((mean, std))
}

/// Uniform linear stretch of `m_text` text frames over `n_audio` audio frames.
pub fn framewise_alignment(n_audio: usize, m_text: usize) -> Result<Alignment> {
    if n_audio == 0 || m_text == 0 {
        return Err(AlignError::InvalidArgument(format!(
            "framewise alignment needs positive lengths, got {n_audio} x {m_text}"
        )));
    }
    let indices = (0..n_audio)
        .map(|i| ((i as u128 * m_text as u128 / n_audio as u128) as usize).min(m_text - 1))
        .collect();
    Ok(Alignment::from_trusted(indices, m_text))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpretation {
    StrongerThanRandom,
    NoBetterThanRandom,
}

impl Interpretation {
    pub fn of(z: f64) -> Self {
        if z < 0.0 {
            Interpretation::StrongerThanRandom
        } else {
            Interpretation::NoBetterThanRandom
        }
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Interpretation::StrongerThanRandom => "stronger than random",
            Interpretation::NoBetterThanRandom => "no better than random",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub label: String,
    pub z_framewise: f64,
    pub z_best: f64,
    pub baseline: BaselineStats,
    pub loss_framewise: f64,
    pub loss_best: f64,
}

impl ConsistencyReport {
    pub fn from_losses(
        label: impl Into<String>,
        loss_framewise: f64,
        loss_best: f64,
        baseline: BaselineStats,
    ) -> Self {
        Self {
            label: label.into(),
            z_framewise: baseline.z(loss_framewise),
            z_best: baseline.z(loss_best),
            baseline,
            loss_framewise,
            loss_best,
        }
    }

    pub fn best_interpretation(&self) -> Interpretation {
        Interpretation::of(self.z_best)
    }

    pub fn framewise_interpretation(&self) -> Interpretation {
        Interpretation::of(self.z_framewise)
    }
}

pub fn consistency_report(
    label: &str,
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
    n_pairs: usize,
    seed: u64,
) -> Result<ConsistencyReport> {
    let baseline = baseline_stats(audio, text, metric, n_pairs, seed)?;
    let framewise = framewise_alignment(audio.len(), text.len())?;
    let loss_framewise = aligned_loss(audio, text, &framewise, metric)?;
    let loss_best = solve_optimized(audio, text, metric)?.loss;
    Ok(ConsistencyReport::from_losses(
        label,
        loss_framewise,
        loss_best,
        baseline,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSummary {
    pub trials: usize,
    pub mean_z_framewise: f64,
    pub mean_z_best: f64,
    pub z_framewise: Vec<f64>,
    pub z_best: Vec<f64>,
}

/// Scores of unrelated standard-Gaussian sequence pairs: the null control for
/// interpreting best-alignment scores, which sit below zero even without any
/// real correspondence because the minimum selects small distances.
pub fn selection_bias_probe(
    n: usize,
    m: usize,
    d: usize,
    trials: usize,
    seed: u64,
) -> Result<ProbeSummary> {
    selection_bias_probe_with(n, m, d, trials, seed, Execution::default())
}

/// Trial `t` draws its sequences and baseline from `rng::derive_seed(seed, t)`.
pub fn selection_bias_probe_with(
    n: usize,
    m: usize,
    d: usize,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<ProbeSummary> {
    if n == 0 || m == 0 || d == 0 || trials == 0 {
        return Err(AlignError::InvalidArgument(
            "probe sizes and trial count must be positive".into(),
        ));
    }
    let reports = exec.map_range(trials, |t| {
        let trial_seed = rng::derive_seed(seed, t as u64);
        let mut r = rng::seeded(trial_seed);
        let audio = random_gaussian_sequence(&mut r, n, d);
        let text = random_gaussian_sequence(&mut r, m, d);
        consistency_report(
            "probe",
            &audio,
            &text,
            FrameMetric::SquaredL2,
            DEFAULT_BASELINE_PAIRS,
            trial_seed,
        )
    });
    let mut z_framewise = Vec::with_capacity(trials);
    let mut z_best = Vec::with_capacity(trials);
    for r in reports {
        let r = r?;
        z_framewise.push(r.z_framewise);
        z_best.push(r.z_best);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(ProbeSummary {
        trials,
        mean_z_framewise: mean(&z_framewise),
        mean_z_best: mean(&z_best),
        z_framewise,
        z_best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[f64]) -> EmbeddingSequence {
        EmbeddingSequence::from_scalars(v).unwrap()
    }

    #[test]
    fn framewise_examples() {
        assert_eq!(framewise_alignment(4, 2).unwrap().indices(), &[0, 0, 1, 1]);
        assert_eq!(framewise_alignment(5, 5).unwrap(), Alignment::identity(5));
        assert_eq!(framewise_alignment(5, 2).unwrap().indices(), &[0, 0, 0, 1, 1]);
        assert_eq!(framewise_alignment(2, 5).unwrap().indices(), &[0, 2]);
        assert!(framewise_alignment(0, 3).is_err());
    }

    #[test]
    fn constant_sequences_are_degenerate() {
        let c = seq(&[1.5, 1.5, 1.5]);
        assert_eq!(
            baseline_stats(&c, &c, FrameMetric::SquaredL2, 100, 1).unwrap_err(),
            AlignError::DegenerateBaseline { n_pairs: 100 }
        );
        assert!(baseline_stats_exhaustive(&c, &c, FrameMetric::L1).is_err());
    }

    #[test]
    fn baseline_is_deterministic() {
        let a = seq(&[0.0, 1.0, 3.0, 7.0]);
        let t = seq(&[0.5, 2.0]);
        let x = baseline_stats(&a, &t, FrameMetric::L1, 500, 9).unwrap();
        let y = baseline_stats(&a, &t, FrameMetric::L1, 500, 9).unwrap();
        assert_eq!(x.mean.to_bits(), y.mean.to_bits());
        assert_eq!(x.std.to_bits(), y.std.to_bits());
        let z = baseline_stats(&a, &t, FrameMetric::L1, 500, 10).unwrap();
        assert_ne!(x.mean, z.mean);
    }

    #[test]
    fn baseline_rejects_single_pair() {
        let a = seq(&[0.0, 1.0]);
        assert!(baseline_stats(&a, &a, FrameMetric::L1, 1, 0).is_err());
    }

    #[test]
    fn exhaustive_baseline_matches_grid_mean() {
        let a = seq(&[0.0, 1.0]);
        let t = seq(&[0.0, 2.0]);
        // Grid [[0, 4], [1, 1]]: mean 1.5, sample variance (2.25 + 6.25 + 0.25 + 0.25) / 3 = 3.
        let b = baseline_stats_exhaustive(&a, &t, FrameMetric::SquaredL2).unwrap();
        assert_eq!(b.mean, 1.5);
        assert!((b.std - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(b.n_pairs, 4);
    }

    #[test]
    fn standardization_identities() {
        let b = BaselineStats {
            mean: 2.0,
            std: 0.5,
            n_pairs: 10,
            seed: 0,
            metric: FrameMetric::SquaredL2,
            sampling: Sampling::Random,
        };
        assert_eq!(b.z(2.0), 0.0);
        assert_eq!(b.z(1.5), -1.0);
        let r = ConsistencyReport::from_losses("l", 2.0, 1.5, b);
        assert_eq!((r.z_framewise, r.z_best), (0.0, -1.0));
    }

    #[test]
    fn interpretation_rendering() {
        assert_eq!(Interpretation::of(-3.06).to_string(), "stronger than random");
        assert_eq!(Interpretation::of(0.0).to_string(), "no better than random");
        assert_eq!(Interpretation::of(0.4).to_string(), "no better than random");
    }

    #[test]
    fn best_never_worse_than_framewise() {
        let a = seq(&[0.3, -0.2, 1.4, 2.2, 0.9]);
        let t = seq(&[0.0, 1.0, 2.0]);
        let r = consistency_report("x", &a, &t, FrameMetric::SquaredL2, 200, 3).unwrap();
        assert!(r.loss_best <= r.loss_framewise);
        assert!(r.z_best <= r.z_framewise);
    }

    #[test]
    fn probe_single_trial_is_reproducible() {
        let x = selection_bias_probe(12, 5, 3, 1, 77).unwrap();
        let y = selection_bias_probe_with(12, 5, 3, 1, 77, Execution::Sequential).unwrap();
        assert_eq!(x, y);
        assert!(selection_bias_probe(0, 5, 3, 1, 77).is_err());
    }
}
