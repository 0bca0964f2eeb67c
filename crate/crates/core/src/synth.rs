//! Planted-alignment instances and a gradient-descent demonstration.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand_distr::{Distribution, StandardNormal};

use crate::analysis::{baseline_stats, DEFAULT_BASELINE_PAIRS};
use crate::error::{AlignError, Result};
use crate::grad::consistency_grad;
use crate::rng::{self, Rng};
use crate::seq::{validate_pair, Alignment, EmbeddingSequence, FrameMetric};

/// `n x d` sequence of i.i.d. standard normal components.
pub fn random_gaussian_sequence(r: &mut Rng, n: usize, d: usize) -> EmbeddingSequence {
    let data = (0..n * d).map(|_| StandardNormal.sample(r)).collect();
    EmbeddingSequence::from_flat(data, n, d).expect("positive sizes, finite samples")
}

/// Uniform draw over all `binomial(n + m - 1, n)` monotone alignments.
///
/// A sorted `n`-subset `c` of `0..n+m-1` maps to the alignment `c[i] - i`
/// (stars and bars), a bijection, so a uniform subset gives a uniform alignment.
pub fn random_monotone_alignment(r: &mut Rng, n: usize, m: usize) -> Alignment {
    let mut picks = index::sample(r, n + m - 1, n).into_vec();
    picks.sort_unstable();
    let indices = picks.into_iter().enumerate().map(|(i, c)| c - i).collect();
    Alignment::from_trusted(indices, m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedInstance {
    pub audio: EmbeddingSequence,
    pub text: EmbeddingSequence,
    pub planted: Alignment,
    pub noise_sigma: f64,
    pub seed: u64,
}

/// Text frames are standard normal; `audio[i] = text[planted[i]] + noise`.
///
/// Draw order from the seeded stream: text, then the alignment, then noise.
pub fn generate_planted(
    n: usize,
    m: usize,
    d: usize,
    noise_sigma: f64,
    seed: u64,
) -> Result<PlantedInstance> {
    if n == 0 || m == 0 || d == 0 {
        return Err(AlignError::InvalidArgument(format!(
            "instance sizes must be positive, got n={n} m={m} d={d}"
        )));
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(AlignError::InvalidArgument(format!(
            "noise sigma must be finite and non-negative, got {noise_sigma}"
        )));
    }
    let mut r = rng::seeded(seed);
    let text = random_gaussian_sequence(&mut r, m, d);
    let planted = random_monotone_alignment(&mut r, n, m);
    let mut data = Vec::with_capacity(n * d);
    for &j in planted.indices() {
        for &t in text.frame(j) {
            let v = if noise_sigma > 0.0 {
                let z: f64 = StandardNormal.sample(&mut r);
                t + noise_sigma * z
            } else {
                t
            };
            data.push(v);
        }
    }
    let audio = EmbeddingSequence::from_flat(data, n, d)?;
    Ok(PlantedInstance {
        audio,
        text,
        planted,
        noise_sigma,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateSide {
    #[default]
    AudioOnly,
    TextOnly,
    Both,
}

impl UpdateSide {
    pub fn name(self) -> &'static str {
        match self {
            UpdateSide::AudioOnly => "audio",
            UpdateSide::TextOnly => "text",
            UpdateSide::Both => "both",
        }
    }

    fn updates_audio(self) -> bool {
        matches!(self, UpdateSide::AudioOnly | UpdateSide::Both)
    }

    fn updates_text(self) -> bool {
        matches!(self, UpdateSide::TextOnly | UpdateSide::Both)
    }
}

impl fmt::Display for UpdateSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UpdateSide {
    type Err = AlignError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "audio" | "audio-only" => Ok(UpdateSide::AudioOnly),
            "text" | "text-only" => Ok(UpdateSide::TextOnly),
            "both" => Ok(UpdateSide::Both),
            other => Err(AlignError::InvalidArgument(format!(
                "unknown update side '{other}' (expected audio, text or both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace {
    /// Best-alignment loss before the first step and after every step.
    pub losses: Vec<f64>,
    /// Standardized best-alignment loss at the same points.
    pub z_best: Vec<f64>,
    pub steps: usize,
    pub learning_rate: f64,
    pub side: UpdateSide,
    pub seed: u64,
}

impl OptimizationTrace {
    pub fn initial_loss(&self) -> f64 {
        self.losses[0]
    }

    pub fn final_loss(&self) -> f64 {
        *self.losses.last().expect("trace holds the initial point")
    }
}

/// Plain gradient descent on the best-alignment loss using pass-through
/// gradients. The baseline for `z_best` is resampled each step with the same
/// `seed`, so the trace follows the loss rather than sampling noise.
pub fn optimize_embeddings(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
    steps: usize,
    learning_rate: f64,
    side: UpdateSide,
    seed: u64,
) -> Result<OptimizationTrace> {
    validate_pair(audio, text)?;
    if steps == 0 {
        return Err(AlignError::InvalidArgument("steps must be at least 1".into()));
    }
    if !(learning_rate > 0.0 && learning_rate.is_finite()) {
        return Err(AlignError::InvalidArgument(format!(
            "learning rate must be positive, got {learning_rate}"
        )));
    }
    if metric != FrameMetric::SquaredL2 {
        return Err(AlignError::InvalidArgument(format!(
            "the optimization demo supports sql2 only, got {metric}"
        )));
    }

    let mut audio = audio.clone();
    let mut text = text.clone();
    let mut losses = Vec::with_capacity(steps + 1);
    let mut z_best = Vec::with_capacity(steps + 1);

    let mut grad = consistency_grad(&audio, &text, metric)?;
    let initial = grad.loss;
    for step in 0..=steps {
        if step > 0 {
            if side.updates_audio() {
                descend(&mut audio, grad.d_audio.values(), learning_rate);
            }
            if side.updates_text() {
                descend(&mut text, grad.d_text.values(), learning_rate);
            }
            let finite = audio.as_flat().iter().chain(text.as_flat()).all(|v| v.is_finite());
            if !finite {
                return Err(AlignError::DivergenceDetected {
                    step,
                    loss: f64::INFINITY,
                    initial,
                });
            }
            grad = consistency_grad(&audio, &text, metric)?;
            if !(grad.loss <= 10.0 * initial) {
                return Err(AlignError::DivergenceDetected {
                    step,
                    loss: grad.loss,
                    initial,
                });
            }
        }
        let baseline = baseline_stats(&audio, &text, metric, DEFAULT_BASELINE_PAIRS, seed)?;
        losses.push(grad.loss);
        z_best.push(baseline.z(grad.loss));
    }

    Ok(OptimizationTrace {
        losses,
        z_best,
        steps,
        learning_rate,
        side,
        seed,
    })
}

fn descend(seq: &mut EmbeddingSequence, grad: &[f64], lr: f64) {
    for (v, g) in seq.as_flat_mut().iter_mut().zip(grad) {
        *v -= lr * g;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::solve_optimized;

    #[test]
    fn noiseless_instance_has_zero_loss() {
        let p = generate_planted(9, 4, 3, 0.0, 5).unwrap();
        let r = solve_optimized(&p.audio, &p.text, FrameMetric::SquaredL2).unwrap();
        assert!(r.loss <= 1e-12);
        assert_eq!(r.path, p.planted);
    }

    #[test]
    fn planted_is_deterministic() {
        let a = generate_planted(7, 3, 2, 0.1, 11).unwrap();
        let b = generate_planted(7, 3, 2, 0.1, 11).unwrap();
        assert_eq!(a, b);
        let c = generate_planted(7, 3, 2, 0.1, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn planted_rejects_bad_arguments() {
        assert!(generate_planted(0, 3, 2, 0.1, 1).is_err());
        assert!(generate_planted(3, 3, 2, -0.1, 1).is_err());
        assert!(generate_planted(3, 3, 2, f64::NAN, 1).is_err());
    }

    #[test]
    fn monotone_sampler_covers_edge_shapes() {
        let mut r = rng::seeded(3);
        assert_eq!(random_monotone_alignment(&mut r, 4, 1).indices(), &[0, 0, 0, 0]);
        let a = random_monotone_alignment(&mut r, 1, 6);
        assert!(a[0] < 6);
        for _ in 0..100 {
            let a = random_monotone_alignment(&mut r, 5, 3);
            assert!(Alignment::new(a.indices().to_vec(), 3).is_ok());
        }
    }

    #[test]
    fn noiseless_demo_stays_at_zero() {
        let p = generate_planted(10, 4, 3, 0.0, 2).unwrap();
        let t = optimize_embeddings(&p.audio, &p.text, FrameMetric::SquaredL2, 5, 0.05, UpdateSide::Both, 1).unwrap();
        assert_eq!(t.losses.len(), 6);
        assert_eq!(t.z_best.len(), 6);
        assert!(t.losses.iter().all(|&l| l <= 1e-12));
    }

    #[test]
    fn demo_argument_checks() {
        let p = generate_planted(4, 2, 2, 0.1, 2).unwrap();
        let run = |steps, lr, metric| optimize_embeddings(&p.audio, &p.text, metric, steps, lr, UpdateSide::AudioOnly, 1);
        assert!(run(0, 0.1, FrameMetric::SquaredL2).is_err());
        assert!(run(3, 0.0, FrameMetric::SquaredL2).is_err());
        assert!(run(3, 0.1, FrameMetric::L2).is_err());
    }

    #[test]
    fn side_parsing() {
        assert_eq!("audio".parse::<UpdateSide>().unwrap(), UpdateSide::AudioOnly);
        assert_eq!("BOTH".parse::<UpdateSide>().unwrap(), UpdateSide::Both);
        assert!("left".parse::<UpdateSide>().is_err());
    }
}
