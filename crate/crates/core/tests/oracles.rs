mod common;

use bestalign::align::solve_naive_with_table;
use bestalign::rng;
use bestalign::{
    aligned_loss, brute_force_best, count_alignments, distance_matrix, generate_planted,
    solve_naive, solve_optimized, solve_optimized_loss_only, Alignment, EmbeddingSequence,
    FrameMetric,
};
use common::*;

#[test]
fn odometer_enumeration_matches_binomial_counts() {
    for n in 1..=6 {
        for m in 1..=6 {
            let all = all_alignments(n, m);
            assert_eq!(all.len() as u128, count_alignments(n, m).unwrap());
            assert!(all.windows(2).all(|w| w[0] < w[1]));
        }
    }
    assert_eq!(
        all_alignments(4, 2),
        vec![vec![0, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 1, 1], vec![0, 1, 1, 1], vec![1, 1, 1, 1]]
    );
}

#[test]
fn brute_force_matches_reference_enumeration() {
    for seed in 0..60 {
        let (a, t) = pair_from_seed(seed, 6, 6, 4);
        for metric in FrameMetric::ALL {
            let (loss, path) = reference_best(&a, &t, metric);
            let bf = brute_force_best(&a, &t, metric).unwrap();
            assert!(rel_close(bf.loss, loss, 1e-12), "seed {seed} {metric}: {} vs {loss}", bf.loss);
            assert_eq!(bf.path.indices(), &path[..], "seed {seed} {metric}");
        }
    }
}

#[test]
fn naive_matches_brute_force_on_seeded_6x4() {
    let (a, t) = {
        let mut r = rng::seeded(2024);
        (bestalign::random_gaussian_sequence(&mut r, 6, 3), bestalign::random_gaussian_sequence(&mut r, 4, 3))
    };
    let bf = brute_force_best(&a, &t, FrameMetric::SquaredL2).unwrap();
    let nv = solve_naive(&a, &t, FrameMetric::SquaredL2).unwrap();
    assert!(rel_close(nv.loss, bf.loss, 1e-9));
    assert_eq!(nv.path, bf.path);
}

#[test]
fn distance_grid_path_minimum_equals_dp_total() {
    let mut r = rng::seeded(77);
    let a = bestalign::random_gaussian_sequence(&mut r, 6, 2);
    let t = bestalign::random_gaussian_sequence(&mut r, 4, 2);
    let grid = distance_matrix(&a, &t, FrameMetric::SquaredL2).unwrap();
    let min_path_sum = all_alignments(6, 4)
        .iter()
        .map(|p| p.iter().enumerate().map(|(i, &j)| grid.get(i, j)).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let nv = solve_naive(&a, &t, FrameMetric::SquaredL2).unwrap();
    assert!(rel_close(min_path_sum, 6.0 * nv.loss, 1e-12));
}

#[test]
fn single_audio_frame_picks_nearest_text_frame() {
    let a = seq(&[0.9]);
    let t = seq(&[3.0, 1.0, -2.0, 0.95]);
    let (r, table) = solve_naive_with_table(&a, &t, FrameMetric::L2).unwrap();
    assert_eq!(r.path.indices(), &[3]);
    assert!((table.total() - 0.05).abs() < 1e-12);
    // Distances 2.1, 0.1, 2.9, 0.05; the row holds their running minimum.
    let expected = [2.1, 0.1, 0.1, 0.05];
    for (got, want) in table.row(0).iter().zip(expected) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn cost_rows_are_non_increasing() {
    for seed in 0..40 {
        let (a, t) = pair_from_seed(seed, 12, 9, 3);
        let (_, table) = solve_naive_with_table(&a, &t, FrameMetric::L1).unwrap();
        for i in 0..table.n_audio() {
            assert!(table.row(i).windows(2).all(|w| w[1] <= w[0]), "seed {seed} row {i}");
        }
    }
}

#[test]
fn results_agree_with_aligned_loss_of_their_paths() {
    for seed in 0..40 {
        let (a, t) = pair_from_seed(seed, 20, 10, 5);
        for metric in FrameMetric::ALL {
            for r in [solve_naive(&a, &t, metric).unwrap(), solve_optimized(&a, &t, metric).unwrap()] {
                let direct = aligned_loss(&a, &t, &r.path, metric).unwrap();
                assert!(rel_close(r.loss, direct, 1e-12));
            }
        }
    }
}

#[test]
fn loss_only_mode_matches_path_mode() {
    for seed in 0..20 {
        let (a, t) = pair_from_seed(seed, 80, 40, 8);
        let full = solve_optimized(&a, &t, FrameMetric::SquaredL2).unwrap();
        let lo = solve_optimized_loss_only(&a, &t, FrameMetric::SquaredL2).unwrap();
        assert_eq!(full.loss.to_bits(), lo.to_bits());
    }
    let mut r = rng::seeded(5);
    let a = bestalign::random_gaussian_sequence(&mut r, 300, 64);
    let t = bestalign::random_gaussian_sequence(&mut r, 50, 64);
    assert_eq!(
        solve_optimized(&a, &t, FrameMetric::L2).unwrap().loss,
        solve_optimized_loss_only(&a, &t, FrameMetric::L2).unwrap()
    );
}

#[test]
fn planted_paths_are_recovered_exactly_without_noise() {
    for seed in 0..50 {
        let p = generate_planted(1 + seed as usize % 20, 1 + seed as usize % 7, 3, 0.0, seed).unwrap();
        let r = solve_optimized(&p.audio, &p.text, FrameMetric::SquaredL2).unwrap();
        assert!(r.loss <= 1e-12);
        assert_eq!(r.path, p.planted, "seed {seed}");
    }
}

#[test]
fn planted_construction_copies_text_frames() {
    let p = generate_planted(10, 4, 3, 0.0, 9).unwrap();
    for (i, &j) in p.planted.indices().iter().enumerate() {
        assert_eq!(p.audio.frame(i), p.text.frame(j));
    }
    let noisy = generate_planted(10, 4, 3, 0.5, 9).unwrap();
    assert_eq!(noisy.text, p.text);
    assert_eq!(noisy.planted, p.planted);
}

#[test]
fn constant_text_gives_identical_loss_for_every_alignment() {
    let a = seq(&[0.3, 1.7, -2.0, 0.0]);
    let t = EmbeddingSequence::from_flat(vec![0.5; 3], 3, 1).unwrap();
    let losses: Vec<f64> = all_alignments(4, 3)
        .into_iter()
        .map(|p| aligned_loss(&a, &t, &Alignment::new(p, 3).unwrap(), FrameMetric::SquaredL2).unwrap())
        .collect();
    assert!(losses.iter().all(|&l| l == losses[0]));
}
