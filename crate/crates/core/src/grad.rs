//! Pass-through gradient of the best-alignment loss.
//!
//! The optimal path is found first and then held fixed; the gradient is that
//! of the fixed-path loss with respect to every component of both sequences.
//! Off argmin ties the path is locally constant, so this is the exact
//! gradient of the min-over-alignments loss there.

use rand::seq::index;

use crate::align::solve_optimized;
use crate::error::{AlignError, Result};
use crate::exec::Execution;
use crate::rng;
use crate::seq::{Alignment, EmbeddingSequence, FrameMetric, Grid};

#[derive(Debug, Clone, PartialEq)]
pub struct GradientPair {
    /// `n x d`, gradient with respect to the audio sequence.
    pub d_audio: Grid,
    /// `m x d`; rows of text frames off the path are zero.
    pub d_text: Grid,
    pub loss: f64,
    pub path: Alignment,
}

pub fn consistency_grad(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
) -> Result<GradientPair> {
    let best = solve_optimized(audio, text, metric)?;
    let (n, m, d) = (audio.len(), text.len(), audio.dim());
    let mut d_audio = Grid::zeros(n, d);
    let mut d_text = Grid::zeros(m, d);
    let inv_n = 1.0 / n as f64;

    for (i, &j) in best.path.indices().iter().enumerate() {
        let (a, t) = (audio.frame(i), text.frame(j));
        let ga = d_audio.row_mut(i);
        match metric {
            FrameMetric::SquaredL2 => {
                for k in 0..d {
                    ga[k] = 2.0 * inv_n * (a[k] - t[k]);
                }
            }
            FrameMetric::L2 => {
                let dist = metric.distance(a, t);
                if dist == 0.0 {
                    return Err(non_diff(metric, i, j));
                }
                for k in 0..d {
                    ga[k] = inv_n * (a[k] - t[k]) / dist;
                }
            }
            FrameMetric::L1 => {
                for k in 0..d {
                    let diff = a[k] - t[k];
                    if diff == 0.0 {
                        return Err(non_diff(metric, i, j));
                    }
                    ga[k] = inv_n * diff.signum();
                }
            }
        }
        // Each pair term is a function of (a - t): the text side gets the negation.
        let gt = d_text.row_mut(j);
        for k in 0..d {
            gt[k] -= ga[k];
        }
    }

    Ok(GradientPair {
        d_audio,
        d_text,
        loss: best.loss,
        path: best.path,
    })
}

fn non_diff(metric: FrameMetric, audio: usize, text: usize) -> AlignError {
    AlignError::NonDifferentiablePoint {
        metric,
        audio,
        text,
    }
}

/// Settings for [`finite_difference_check_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub step: f64,
    /// Above this many components, a seeded random subset of this size is checked.
    pub max_components: usize,
    pub seed: u64,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            step: 1e-5,
            max_components: 4096,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdReport {
    /// `|analytic - numeric| / max(|analytic|, |numeric|)`, maximized; the
    /// absolute error stands in when both sides are below 1e-12.
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    /// Component with the largest relative error.
    pub worst: Option<Component>,
    pub components_checked: usize,
    /// Perturbations whose optimal path differed from the unperturbed one.
    pub path_changes: usize,
    /// True when any perturbation changed the optimal path.
    pub tie_proximal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Audio,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub side: Side,
    pub frame: usize,
    pub coord: usize,
}

/// Central differences of the full best-alignment loss against
/// [`consistency_grad`], with default subsampling settings.
pub fn finite_difference_check(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
    step: f64,
) -> Result<FdReport> {
    let config = FdConfig {
        step,
        ..FdConfig::default()
    };
    finite_difference_check_with(audio, text, metric, &config, Execution::default())
}

pub fn finite_difference_check_with(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
    config: &FdConfig,
    exec: Execution,
) -> Result<FdReport> {
    if !(config.step > 0.0 && config.step.is_finite()) {
        return Err(AlignError::InvalidArgument(format!(
            "finite-difference step must be positive, got {}",
            config.step
        )));
    }
    let analytic = consistency_grad(audio, text, metric)?;
    let d = audio.dim();
    let n_audio = audio.len() * d;
    let total = n_audio + text.len() * d;

    let mut selected: Vec<usize> = if total > config.max_components {
        let mut r = rng::seeded(config.seed);
        index::sample(&mut r, total, config.max_components).into_vec()
    } else {
        (0..total).collect()
    };
    selected.sort_unstable();

    let components: Vec<Component> = selected
        .into_iter()
        .map(|flat| {
            let (side, local) = if flat < n_audio {
                (Side::Audio, flat)
            } else {
                (Side::Text, flat - n_audio)
            };
            Component {
                side,
                frame: local / d,
                coord: local % d,
            }
        })
        .collect();

    let outcomes = exec.map(&components, |c| {
        probe(audio, text, metric, config.step, &analytic, *c)
    });

    let mut report = FdReport {
        max_rel_error: 0.0,
        max_abs_error: 0.0,
        worst: None,
        components_checked: components.len(),
        path_changes: 0,
        tie_proximal: false,
    };
    for (c, outcome) in components.iter().zip(outcomes) {
        let o = outcome?;
        report.path_changes += o.path_changes;
        if o.rel > report.max_rel_error || report.worst.is_none() {
            report.max_rel_error = o.rel;
            report.worst = Some(*c);
        }
        report.max_abs_error = report.max_abs_error.max(o.abs);
    }
    report.tie_proximal = report.path_changes > 0;
    Ok(report)
}

struct ProbeOutcome {
    rel: f64,
    abs: f64,
    path_changes: usize,
}

fn probe(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
    step: f64,
    analytic: &GradientPair,
    c: Component,
) -> Result<ProbeOutcome> {
    let (seq, grad) = match c.side {
        Side::Audio => (audio, &analytic.d_audio),
        Side::Text => (text, &analytic.d_text),
    };
    let x = seq.frame(c.frame)[c.coord];
    let (xp, xm) = (x + step, x - step);
    let mut changes = 0;
    let mut eval = |v: f64| -> Result<f64> {
        let moved = seq.with_component(c.frame, c.coord, v);
        let r = match c.side {
            Side::Audio => solve_optimized(&moved, text, metric)?,
            Side::Text => solve_optimized(audio, &moved, metric)?,
        };
        if r.path != analytic.path {
            changes += 1;
        }
        Ok(r.loss)
    };
    let (lp, lm) = (eval(xp)?, eval(xm)?);
    // Divide by the step actually taken after rounding x +/- step.
    let numeric = (lp - lm) / (xp - xm);
    let exact = grad.get(c.frame, c.coord);
    let abs = (exact - numeric).abs();
    let scale = exact.abs().max(numeric.abs());
    let rel = if scale < 1e-12 { abs } else { abs / scale };
    Ok(ProbeOutcome {
        rel,
        abs,
        path_changes: changes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[f64]) -> EmbeddingSequence {
        EmbeddingSequence::from_scalars(v).unwrap()
    }

    #[test]
    fn fixture_gradient() {
        let audio = seq(&[0.0, 1.0, 1.0, 2.0]);
        let text = seq(&[0.0, 2.0]);
        let g = consistency_grad(&audio, &text, FrameMetric::SquaredL2).unwrap();
        assert_eq!(g.path.indices(), &[0, 0, 0, 1]);
        assert_eq!(g.loss, 0.5);
        assert_eq!(g.d_audio.values(), &[0.0, 0.5, 0.5, 0.0]);
        assert_eq!(g.d_text.values(), &[-1.0, 0.0]);
    }

    #[test]
    fn identity_has_zero_gradient() {
        let a = EmbeddingSequence::from_flat(vec![0.1, 0.2, -0.4, 1.0, 3.0, 2.0], 3, 2).unwrap();
        let g = consistency_grad(&a, &a, FrameMetric::SquaredL2).unwrap();
        assert_eq!(g.loss, 0.0);
        assert!(g.d_audio.values().iter().chain(g.d_text.values()).all(|&v| v == 0.0));
        let r = finite_difference_check(&a, &a, FrameMetric::SquaredL2, 1e-5).unwrap();
        assert!(r.max_rel_error < 1e-15, "{}", r.max_rel_error);
        assert!(!r.tie_proximal);
    }

    #[test]
    fn coincident_frames_are_not_differentiable_under_l2_and_l1() {
        let a = seq(&[1.0, 2.0]);
        for metric in [FrameMetric::L2, FrameMetric::L1] {
            let err = consistency_grad(&a, &a, metric).unwrap_err();
            assert!(matches!(err, AlignError::NonDifferentiablePoint { audio: 0, text: 0, .. }));
        }
    }

    #[test]
    fn l2_and_l1_gradients() {
        let audio = EmbeddingSequence::from_flat(vec![3.0, 4.0], 1, 2).unwrap();
        let text = EmbeddingSequence::from_flat(vec![0.0, 0.0], 1, 2).unwrap();
        let g = consistency_grad(&audio, &text, FrameMetric::L2).unwrap();
        assert_eq!(g.d_audio.values(), &[0.6, 0.8]);
        assert_eq!(g.d_text.values(), &[-0.6, -0.8]);
        let g = consistency_grad(&audio, &text, FrameMetric::L1).unwrap();
        assert_eq!(g.d_audio.values(), &[1.0, 1.0]);
    }

    #[test]
    fn rejects_bad_step() {
        let a = seq(&[1.0]);
        assert!(finite_difference_check(&a, &seq(&[0.0]), FrameMetric::SquaredL2, 0.0).is_err());
        assert!(finite_difference_check(&a, &seq(&[0.0]), FrameMetric::SquaredL2, -1.0).is_err());
    }

    #[test]
    fn duplicate_text_frames_flag_ties() {
        let audio = EmbeddingSequence::from_flat(vec![0.1, 0.2, 0.15, 0.1, 2.0, 2.1], 3, 2).unwrap();
        let text = EmbeddingSequence::from_flat(vec![0.0, 0.0, 0.0, 0.0, 2.0, 2.0], 3, 2).unwrap();
        let r = finite_difference_check(&audio, &text, FrameMetric::SquaredL2, 1e-5).unwrap();
        assert!(r.tie_proximal);
        assert!(r.path_changes > 0);
    }

    #[test]
    fn subsampling_respects_limit() {
        let audio = EmbeddingSequence::from_flat((0..40).map(|v| (v as f64).sin()).collect(), 10, 4).unwrap();
        let text = EmbeddingSequence::from_flat((0..20).map(|v| (v as f64).cos()).collect(), 5, 4).unwrap();
        let cfg = FdConfig {
            max_components: 7,
            ..FdConfig::default()
        };
        let r = finite_difference_check_with(&audio, &text, FrameMetric::SquaredL2, &cfg, Execution::Sequential).unwrap();
        assert_eq!(r.components_checked, 7);
        let p = finite_difference_check_with(&audio, &text, FrameMetric::SquaredL2, &cfg, Execution::Parallel).unwrap();
        assert_eq!(r, p);
    }
}
