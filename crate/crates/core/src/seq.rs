//! Embedding sequences, alignments, and frame distances.

use std::fmt;
use std::str::FromStr;

use crate::error::{AlignError, Result};

/// A non-empty sequence of `len` frames, each a `dim`-dimensional vector of
/// finite reals, stored frame-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSequence {
    data: Vec<f64>,
    len: usize,
    dim: usize,
}

impl EmbeddingSequence {
    pub fn from_frames(frames: Vec<Vec<f64>>) -> Result<Self> {
        let len = frames.len();
        if len == 0 {
            return Err(AlignError::Validation("sequence has no frames".into()));
        }
        let dim = frames[0].len();
        let mut data = Vec::with_capacity(len * dim);
        for (i, f) in frames.into_iter().enumerate() {
            if f.len() != dim {
                return Err(AlignError::Validation(format!(
                    "frame {i} has {} components, expected {dim}",
                    f.len()
                )));
            }
            data.extend(f);
        }
        Self::from_flat(data, len, dim)
    }

    /// Build from a frame-major buffer of `len * dim` values.
    pub fn from_flat(data: Vec<f64>, len: usize, dim: usize) -> Result<Self> {
        if len == 0 {
            return Err(AlignError::Validation("sequence has no frames".into()));
        }
        if dim == 0 {
            return Err(AlignError::Validation("frame dimension is zero".into()));
        }
        if data.len() != len * dim {
            return Err(AlignError::Validation(format!(
                "buffer holds {} values, expected {len} x {dim}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(AlignError::Validation(format!(
                "non-finite value {} at frame {}, component {}",
                data[pos],
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self { data, len, dim })
    }

    /// One-dimensional sequence from scalars.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::from_flat(values.to_vec(), values.len(), 1)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; sequences hold at least one frame.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frame(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn frames(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }

    /// Mutable access for in-place updates. Callers must keep values finite.
    pub(crate) fn as_flat_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Copy with every component multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::from_flat(self.data.iter().map(|v| v * c).collect(), self.len, self.dim)
    }

    /// Copy with coordinates reordered: output component `k` is input component `perm[k]`.
    pub fn permute_coordinates(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.dim {
            return Err(AlignError::Dimension {
                expected: self.dim,
                found: perm.len(),
            });
        }
        let data = self
            .frames()
            .flat_map(|f| perm.iter().map(move |&k| f[k]))
            .collect();
        Self::from_flat(data, self.len, self.dim)
    }

    /// Copy with one component replaced.
    pub fn with_component(&self, frame: usize, k: usize, value: f64) -> Self {
        let mut out = self.clone();
        out.data[frame * self.dim + k] = value;
        out
    }
}

/// Monotone non-decreasing map from audio frames to text indices in `0..m_text`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alignment {
    indices: Vec<usize>,
    m_text: usize,
}

impl Alignment {
    pub fn new(indices: Vec<usize>, m_text: usize) -> Result<Self> {
        if m_text == 0 {
            return Err(AlignError::Validation("text length is zero".into()));
        }
        if indices.is_empty() {
            return Err(AlignError::Validation("alignment is empty".into()));
        }
        for (position, &index) in indices.iter().enumerate() {
            if index >= m_text {
                return Err(AlignError::Index {
                    position,
                    index,
                    m_text,
                });
            }
        }
        if let Some(i) = indices.windows(2).position(|w| w[0] > w[1]) {
            return Err(AlignError::Validation(format!(
                "alignment decreases at position {}: {} > {}",
                i + 1,
                indices[i],
                indices[i + 1]
            )));
        }
        Ok(Self { indices, m_text })
    }

    pub(crate) fn from_trusted(indices: Vec<usize>, m_text: usize) -> Self {
        debug_assert!(Self::new(indices.clone(), m_text).is_ok());
        Self { indices, m_text }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_trusted((0..n).collect(), n)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn m_text(&self) -> usize {
        self.m_text
    }

    pub fn into_indices(self) -> Vec<usize> {
        self.indices
    }
}

impl std::ops::Index<usize> for Alignment {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.indices[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FrameMetric {
    #[default]
    SquaredL2,
    L2,
    L1,
}

impl FrameMetric {
    pub const ALL: [FrameMetric; 3] = [FrameMetric::SquaredL2, FrameMetric::L2, FrameMetric::L1];

    /// Distance without shape or finiteness checks. `u` and `v` must have equal length.
    #[inline]
    pub fn distance(self, u: &[f64], v: &[f64]) -> f64 {
        match self {
            FrameMetric::SquaredL2 => squared_l2(u, v),
            FrameMetric::L2 => squared_l2(u, v).sqrt(),
            FrameMetric::L1 => l1(u, v),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FrameMetric::SquaredL2 => "sql2",
            FrameMetric::L2 => "l2",
            FrameMetric::L1 => "l1",
        }
    }
}

impl fmt::Display for FrameMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FrameMetric {
    type Err = AlignError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sql2" | "squared-l2" | "squaredl2" => Ok(FrameMetric::SquaredL2),
            "l2" => Ok(FrameMetric::L2),
            "l1" => Ok(FrameMetric::L1),
            other => Err(AlignError::InvalidArgument(format!(
                "unknown metric '{other}' (expected sql2, l2 or l1)"
            ))),
        }
    }
}

// Four independent accumulators let the compiler vectorize the reduction.
#[inline]
fn squared_l2(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    let mut acc = [0.0f64; 4];
    let (uc, ur) = (u.chunks_exact(4), u.chunks_exact(4).remainder());
    let vr = v.chunks_exact(4).remainder();
    for (a, b) in uc.zip(v.chunks_exact(4)) {
        for k in 0..4 {
            let t = a[k] - b[k];
            acc[k] += t * t;
        }
    }
    let mut tail = 0.0;
    for (a, b) in ur.iter().zip(vr) {
        let t = a - b;
        tail += t * t;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
fn l1(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    let mut acc = [0.0f64; 4];
    let (uc, ur) = (u.chunks_exact(4), u.chunks_exact(4).remainder());
    let vr = v.chunks_exact(4).remainder();
    for (a, b) in uc.zip(v.chunks_exact(4)) {
        for k in 0..4 {
            acc[k] += (a[k] - b[k]).abs();
        }
    }
    let mut tail = 0.0;
    for (a, b) in ur.iter().zip(vr) {
        tail += (a - b).abs();
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Checked frame distance.
pub fn frame_distance(metric: FrameMetric, u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(AlignError::Dimension {
            expected: u.len(),
            found: v.len(),
        });
    }
    if u.iter().chain(v).any(|x| !x.is_finite()) {
        return Err(AlignError::Validation("non-finite vector component".into()));
    }
    Ok(metric.distance(u, v))
}

/// Both sequences are valid by construction, so this only checks that their
/// frame dimensions agree.
pub fn validate_pair<'a>(
    audio: &'a EmbeddingSequence,
    text: &'a EmbeddingSequence,
) -> Result<(&'a EmbeddingSequence, &'a EmbeddingSequence)> {
    if audio.dim() != text.dim() {
        return Err(AlignError::Dimension {
            expected: audio.dim(),
            found: text.dim(),
        });
    }
    Ok((audio, text))
}

/// Mean frame distance between `audio` and `text` up-sampled along `alignment`.
///
/// The sum runs over audio frames in order and is divided by the number of
/// audio frames.
pub fn aligned_loss(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    alignment: &Alignment,
    metric: FrameMetric,
) -> Result<f64> {
    validate_pair(audio, text)?;
    if alignment.len() != audio.len() {
        return Err(AlignError::Length {
            expected: audio.len(),
            found: alignment.len(),
        });
    }
    if let Some((position, &index)) = alignment
        .indices()
        .iter()
        .enumerate()
        .find(|(_, &j)| j >= text.len())
    {
        return Err(AlignError::Index {
            position,
            index,
            m_text: text.len(),
        });
    }
    Ok(aligned_sum(audio, text, alignment.indices(), metric) / audio.len() as f64)
}

pub(crate) fn aligned_sum(
    audio: &EmbeddingSequence,
    text: &EmbeddingSequence,
    path: &[usize],
    metric: FrameMetric,
) -> f64 {
    let mut sum = 0.0;
    for (i, &j) in path.iter().enumerate() {
        sum += metric.distance(audio.frame(i), text.frame(j));
    }
    sum
}

/// Dense row-major grid of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl Grid {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), rows * cols, "grid buffer size");
        Self { rows, cols, values }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.cols.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}
