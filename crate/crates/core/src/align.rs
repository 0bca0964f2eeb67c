//! Best monotone alignment search.
//!
//! The cost table `C(i, j)` holds the minimal unnormalized cost of aligning
//! audio frames `0..=i` using text indices `<= j`:
//!
//! ```text
//! C(0, j) = min_{k <= j} d(0, k)
//! C(i, j) = min_{k <= j} [ C(i-1, k) + d(i, k) ]
//! ```
//!
//! The best loss is `C(n-1, m-1) / n`. Every argmin keeps the smallest `k`.
//! Optimal alignments are closed under componentwise min (swapping the tails
//! of two optimal paths where they cross keeps both optimal), so the
//! backtracked path is the componentwise-smallest optimum, which is also the
//! lexicographically smallest one that the brute-force oracle returns.

use std::fmt;
use std::str::FromStr;

use crate::error::{AlignError, Result};
use crate::exec::Execution;
use crate::seq::{validate_pair, Alignment, EmbeddingSequence, FrameMetric, Grid};

pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Solver {
    Naive,
    #[default]
    Optimized,
    BruteForce,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Naive => "naive",
            Solver::Optimized => "optimized",
            Solver::BruteForce => "brute-force",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solver {
    type Err = AlignError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "naive" => Ok(Solver::Naive),
            "optimized" | "fast" => Ok(Solver::Optimized),
            "brute-force" | "bruteforce" | "brute" => Ok(Solver::BruteForce),
            other => Err(AlignError::InvalidArgument(format!(
                "unknown solver '{other}' (expected naive, optimized or brute-force)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestAlignmentResult {
    /// Mean frame distance along `path`.
    pub loss: f64,
    pub path: Alignment,
    pub solver: Solver,
    pub n_audio: usize,
    pub m_text: usize,
    pub dim: usize,
    pub metric: FrameMetric,
}

/// The dynamic-programming table, `n_audio` rows by `m_text` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    grid: Grid,
}

impl CostMatrix {
    pub fn n_audio(&self) -> usize {
        self.grid.rows()
    }

    pub fn m_text(&self) -> usize {
        self.grid.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.grid.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.grid.row(i)
    }

    /// `C(n-1, m-1)`, the unnormalized best cost.
    pub fn total(&self) -> f64 {
        self.grid.get(self.n_audio() - 1, self.m_text() - 1)
    }

    pub fn as_grid(&self) -> &Grid {
        &self.grid
    }
}

/// Frame distances between every audio frame (rows) and text frame (columns).
pub fn distance_matrix(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
) -> Result<Grid> {
    distance_matrix_with(audio, text, metric, Execution::default())
}

pub fn distance_matrix_with(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
    exec: Execution,
) -> Result<Grid> {
    validate_pair(audio, text)?;
    let (n, m) = (audio.len(), text.len());
    let mut grid = Grid::zeros(n, m);
    exec.fill_chunks(grid.values_mut(), m, |i, row| {
        fill_distance_row(audio.frame(i), text, metric, row);
    });
    Ok(grid)
}

#[inline]
fn fill_distance_row(a: &[f64], text: &EmbeddingSequence, metric: FrameMetric, row: &mut [f64]) {
    for (d, t) in row.iter_mut().zip(text.frames()) {
        *d = metric.distance(a, t);
    }
}

/// Number of monotone non-decreasing sequences of length `n` over `m` values,
/// `binomial(n + m - 1, n)`, or `None` if it does not fit in 128 bits.
pub fn count_alignments(n: usize, m: usize) -> Option<u128> {
    if m == 0 {
        return Some(0);
    }
    let mut c: u128 = 1;
    for i in 1..=n as u128 {
        c = c.checked_mul(m as u128 - 1 + i)? / i;
    }
    Some(c)
}

/// Exhaustive search over all monotone alignments, capped at
/// [`DEFAULT_ENUMERATION_CAP`] candidates.
pub fn brute_force_best(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
) -> Result<BestAlignmentResult> {
    brute_force_best_capped(audio, text, metric, DEFAULT_ENUMERATION_CAP)
}

pub fn brute_force_best_capped(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
    cap: u64,
) -> Result<BestAlignmentResult> {
    validate_pair(audio, text)?;
    let (n, m) = (audio.len(), text.len());
    match count_alignments(n, m) {
        Some(c) if c <= cap as u128 => {}
        Some(c) => {
            return Err(AlignError::InstanceTooLarge {
                count: c.to_string(),
                cap,
            })
        }
        None => {
            return Err(AlignError::InstanceTooLarge {
                count: "more than 2^128".into(),
                cap,
            })
        }
    }

    let dist = distance_matrix_with(audio, text, metric, Execution::Sequential)?;
    let mut search = Exhaustive {
        dist: &dist,
        current: vec![0; n],
        prefix: vec![0.0; n],
        best_sum: f64::INFINITY,
        best: Vec::new(),
    };
    search.descend(0, 0);

    Ok(BestAlignmentResult {
        loss: search.best_sum / n as f64,
        path: Alignment::from_trusted(search.best, m),
        solver: Solver::BruteForce,
        n_audio: n,
        m_text: m,
        dim: audio.dim(),
        metric,
    })
}

struct Exhaustive<'a> {
    dist: &'a Grid,
    current: Vec<usize>,
    // prefix[i] = sum of distances for positions 0..=i, accumulated in order
    prefix: Vec<f64>,
    best_sum: f64,
    best: Vec<usize>,
}

impl Exhaustive<'_> {
    fn descend(&mut self, i: usize, lo: usize) {
        let n = self.current.len();
        for j in lo..self.dist.cols() {
            let before = if i == 0 { 0.0 } else { self.prefix[i - 1] };
            self.prefix[i] = before + self.dist.get(i, j);
            self.current[i] = j;
            if i + 1 < n {
                self.descend(i + 1, j);
            } else {
                let sum = self.prefix[i];
                // Lexicographic enumeration: the first minimum seen wins ties.
                if self.best.is_empty() || sum < self.best_sum {
                    self.best_sum = sum;
                    self.best.clone_from(&self.current);
                }
            }
        }
    }
}

/// Literal evaluation of the recurrence with an O(m) scan per cell.
pub fn solve_naive(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
) -> Result<BestAlignmentResult> {
    solve_naive_with_table(audio, text, metric).map(|(r, _)| r)
}

/// [`solve_naive`] that also returns the filled cost table.
pub fn solve_naive_with_table(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
) -> Result<(BestAlignmentResult, CostMatrix)> {
    let dist = distance_matrix_with(audio, text, metric, Execution::Sequential)?;
    let (n, m) = (dist.rows(), dist.cols());
    check_width(m)?;
    let mut cost = Grid::zeros(n, m);
    let mut back = vec![0u32; n * m];

    for i in 0..n {
        let d = dist.row(i);
        for j in 0..m {
            let prev = |k: usize| if i == 0 { 0.0 } else { cost.get(i - 1, k) };
            let mut best = prev(0) + d[0];
            let mut arg = 0;
            for k in 1..=j {
                let v = prev(k) + d[k];
                if v < best {
                    best = v;
                    arg = k;
                }
            }
            cost.row_mut(i)[j] = best;
            back[i * m + j] = arg as u32;
        }
    }

    let table = CostMatrix { grid: cost };
    let path = backtrack(&back, n, m);
    let result = BestAlignmentResult {
        loss: table.total() / n as f64,
        path,
        solver: Solver::Naive,
        n_audio: n,
        m_text: m,
        dim: audio.dim(),
        metric,
    };
    Ok((result, table))
}

/// Running prefix minimum over each row: O(1) per cell, O(nm) total. Stores
/// an `n x m` argmin table for path recovery.
pub fn solve_optimized(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
) -> Result<BestAlignmentResult> {
    validate_pair(audio, text)?;
    let (n, m) = (audio.len(), text.len());
    check_width(m)?;
    let mut back = vec![0u32; n * m];
    let total = sweep(audio, text, metric, Some(&mut back));
    Ok(BestAlignmentResult {
        loss: total / n as f64,
        path: backtrack(&back, n, m),
        solver: Solver::Optimized,
        n_audio: n,
        m_text: m,
        dim: audio.dim(),
        metric,
    })
}

/// Best loss only, keeping a single O(m) cost row.
pub fn solve_optimized_loss_only(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
) -> Result<f64> {
    validate_pair(audio, text)?;
    Ok(sweep(audio, text, metric, None) / audio.len() as f64)
}

// Row i's cost overwrites row i-1 in place: cell j reads the old value at j
// before writing it.
fn sweep(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
    mut back: Option<&mut [u32]>,
) -> f64 {
    let m = text.len();
    let mut cost = vec![0.0f64; m];
    let mut dist = vec![0.0f64; m];
    for i in 0..audio.len() {
        fill_distance_row(audio.frame(i), text, metric, &mut dist);
        let mut best = cost[0] + dist[0];
        let mut arg = 0usize;
        for j in 0..m {
            let v = cost[j] + dist[j];
            if v < best {
                best = v;
                arg = j;
            }
            cost[j] = best;
            if let Some(b) = back.as_deref_mut() {
                b[i * m + j] = arg as u32;
            }
        }
    }
    cost[m - 1]
}

fn backtrack(back: &[u32], n: usize, m: usize) -> Alignment {
    let mut path = vec![0usize; n];
    let mut j = m - 1;
    for i in (0..n).rev() {
        j = back[i * m + j] as usize;
        path[i] = j;
    }
    Alignment::from_trusted(path, m)
}

fn check_width(m: usize) -> Result<()> {
    if m > u32::MAX as usize {
        return Err(AlignError::InvalidArgument(format!(
            "text length {m} exceeds the supported maximum {}",
            u32::MAX
        )));
    }
    Ok(())
}

pub fn solve(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    metric: FrameMetric,
    solver: Solver,
) -> Result<BestAlignmentResult> {
    match solver {
        Solver::Naive => solve_naive(audio, text, metric),
        Solver::Optimized => solve_optimized(audio, text, metric),
        Solver::BruteForce => brute_force_best(audio, text, metric),
    }
}

/// Solve independent pairs, one solver call per pair, results in input order.
pub fn solve_batch(
    pairs: &[(EmbeddingSequence, EmbeddingSequence)],
    metric: FrameMetric,
    solver: Solver,
    exec: Execution,
) -> Vec<Result<BestAlignmentResult>> {
    exec.map(pairs, |(a, t)| solve(a, t, metric, solver))
}
