#![allow(dead_code)]

use bestalign::rng::{self, Rng};
use bestalign::{random_gaussian_sequence, Alignment, EmbeddingSequence, FrameMetric};
use rand::Rng as _;

pub fn seq(v: &[f64]) -> EmbeddingSequence {
    EmbeddingSequence::from_scalars(v).unwrap()
}

pub fn random_pair(r: &mut Rng, max_n: usize, max_m: usize, max_d: usize) -> (EmbeddingSequence, EmbeddingSequence) {
    let n = r.random_range(1..=max_n);
    let m = r.random_range(1..=max_m);
    let d = r.random_range(1..=max_d);
    (random_gaussian_sequence(r, n, d), random_gaussian_sequence(r, m, d))
}

pub fn pair_from_seed(seed: u64, max_n: usize, max_m: usize, max_d: usize) -> (EmbeddingSequence, EmbeddingSequence) {
    random_pair(&mut rng::seeded(seed), max_n, max_m, max_d)
}

/// Every monotone alignment of `n` frames onto `m`, in lexicographic order.
/// Written independently of the library enumerator: counts up like an odometer.
pub fn all_alignments(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    loop {
        out.push(cur.clone());
        // Rightmost position that can still be incremented.
        let Some(p) = (0..n).rev().find(|&p| cur[p] + 1 < m) else {
            return out;
        };
        let v = cur[p] + 1;
        for x in &mut cur[p..] {
            *x = v;
        }
    }
}

/// Brute-force minimum of the mean distance, evaluated from scratch per path.
pub fn reference_best(audio: &EmbeddingSequence, text: &EmbeddingSequence, metric: FrameMetric) -> (f64, Vec<usize>) {
    let mut best = (f64::INFINITY, Vec::new());
    for path in all_alignments(audio.len(), text.len()) {
        let mut sum = 0.0;
        for (i, &j) in path.iter().enumerate() {
            let d: f64 = audio
                .frame(i)
                .iter()
                .zip(text.frame(j))
                .map(|(a, b)| match metric {
                    FrameMetric::SquaredL2 => (a - b) * (a - b),
                    FrameMetric::L2 => (a - b) * (a - b),
                    FrameMetric::L1 => (a - b).abs(),
                })
                .sum();
            sum += if metric == FrameMetric::L2 { d.sqrt() } else { d };
        }
        let loss = sum / audio.len() as f64;
        if loss < best.0 {
            best = (loss, path);
        }
    }
    best
}

pub fn random_alignment(r: &mut Rng, n: usize, m: usize) -> Alignment {
    let mut v: Vec<usize> = (0..n).map(|_| r.random_range(0..m)).collect();
    v.sort_unstable();
    Alignment::new(v, m).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
