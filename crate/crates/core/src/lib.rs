//! Best monotone alignment between two embedding sequences of unequal length.
//!
//! An audio sequence of `n` frames is aligned to a text sequence of `m` frames
//! by a monotone non-decreasing index map: every audio frame is used exactly
//! once, text frames may be repeated or skipped. The consistency loss of an
//! alignment is the mean frame distance along it, and the best-alignment loss
//! is the minimum over all alignments, found by dynamic programming.
//!
//! Modules:
//! - [`seq`]: embedding sequences, alignments, frame metrics, the aligned loss.
//! - [`align`]: brute-force oracle, the O(nm²) and O(nm) solvers, distance grids.
//! - [`grad`]: pass-through gradients and a finite-difference harness.
//! - [`analysis`]: random-pair baselines and standardized consistency scores.
//! - [`synth`]: planted-alignment instances and a gradient-descent demo.
//! - [`exec`]: sequential / rayon execution of batch work.

pub mod align;
pub mod analysis;
pub mod error;
pub mod exec;
pub mod grad;
pub mod rng;
pub mod seq;
pub mod synth;

pub use align::{
    brute_force_best, brute_force_best_capped, count_alignments, distance_matrix,
    distance_matrix_with, solve, solve_batch, solve_naive_with_table,
    solve_naive, solve_optimized, solve_optimized_loss_only, BestAlignmentResult, CostMatrix,
    Solver, DEFAULT_ENUMERATION_CAP,
};
pub use analysis::{
    baseline_stats, baseline_stats_exhaustive, consistency_report, framewise_alignment,
    selection_bias_probe, selection_bias_probe_with, BaselineStats, ConsistencyReport, Interpretation, ProbeSummary,
};
pub use error::{AlignError, Result};
pub use exec::Execution;
pub use grad::{
    consistency_grad, finite_difference_check, finite_difference_check_with, FdConfig, FdReport,
    GradientPair,
};
pub use seq::{aligned_loss, frame_distance, validate_pair, Alignment, EmbeddingSequence, FrameMetric, Grid};
pub use synth::{
    generate_planted, optimize_embeddings, random_gaussian_sequence, OptimizationTrace,
    PlantedInstance, UpdateSide,
};
