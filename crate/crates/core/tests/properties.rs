mod common;

use bestalign::{
    aligned_loss, brute_force_best, consistency_grad, frame_distance, solve_naive,
    solve_optimized, Alignment, EmbeddingSequence, FrameMetric,
};
use common::rel_close;
use proptest::prelude::*;

fn metric() -> impl Strategy<Value = FrameMetric> {
    prop_oneof![Just(FrameMetric::SquaredL2), Just(FrameMetric::L2), Just(FrameMetric::L1)]
}

fn pair(max_n: usize, max_m: usize, max_d: usize) -> impl Strategy<Value = (EmbeddingSequence, EmbeddingSequence)> {
    (1..=max_n, 1..=max_m, 1..=max_d).prop_flat_map(|(n, m, d)| {
        (
            prop::collection::vec(-3.0f64..3.0, n * d),
            prop::collection::vec(-3.0f64..3.0, m * d),
        )
            .prop_map(move |(a, t)| {
                (
                    EmbeddingSequence::from_flat(a, n, d).unwrap(),
                    EmbeddingSequence::from_flat(t, m, d).unwrap(),
                )
            })
    })
}

fn alignment_for(n: usize, m: usize) -> impl Strategy<Value = Alignment> {
    prop::collection::vec(0..m, n).prop_map(move |mut v| {
        v.sort_unstable();
        Alignment::new(v, m).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn metric_axioms(u in prop::collection::vec(-5.0f64..5.0, 1..9), shift in -1.0f64..1.0, metric in metric()) {
        let v: Vec<f64> = u.iter().map(|x| x + shift).collect();
        prop_assert_eq!(frame_distance(metric, &u, &u).unwrap(), 0.0);
        let uv = frame_distance(metric, &u, &v).unwrap();
        prop_assert!(uv >= 0.0);
        prop_assert_eq!(uv, frame_distance(metric, &v, &u).unwrap());
    }

    #[test]
    fn naive_equals_brute_force((a, t) in pair(6, 6, 4), metric in metric()) {
        let bf = brute_force_best(&a, &t, metric).unwrap();
        let nv = solve_naive(&a, &t, metric).unwrap();
        prop_assert!(rel_close(nv.loss, bf.loss, 1e-9));
        prop_assert_eq!(nv.path, bf.path);
    }

    #[test]
    fn optimized_equals_naive((a, t) in pair(40, 25, 6), metric in metric()) {
        let nv = solve_naive(&a, &t, metric).unwrap();
        let op = solve_optimized(&a, &t, metric).unwrap();
        prop_assert!(rel_close(op.loss, nv.loss, 1e-12));
        prop_assert_eq!(op.path, nv.path);
    }

    #[test]
    fn no_alignment_beats_the_best(
        ((a, t), picks) in pair(12, 8, 3).prop_flat_map(|(a, t)| {
            let (n, m) = (a.len(), t.len());
            (Just((a, t)), prop::collection::vec(alignment_for(n, m), 16))
        }),
        metric in metric(),
    ) {
        let best = solve_optimized(&a, &t, metric).unwrap();
        for al in &picks {
            prop_assert!(aligned_loss(&a, &t, al, metric).unwrap() >= best.loss - 1e-12);
        }
        prop_assert!(best.loss >= 0.0);
    }

    #[test]
    fn coordinate_permutation_leaves_losses_unchanged(
        ((a, t), perm) in pair(8, 5, 5).prop_flat_map(|(a, t)| {
            let d = a.dim();
            (Just((a, t)), Just((0..d).collect::<Vec<_>>()).prop_shuffle())
        }),
        metric in metric(),
    ) {
        let pa = a.permute_coordinates(&perm).unwrap();
        let pt = t.permute_coordinates(&perm).unwrap();
        let base = solve_optimized(&a, &t, metric).unwrap();
        let moved = solve_optimized(&pa, &pt, metric).unwrap();
        prop_assert!(rel_close(base.loss, moved.loss, 1e-12));
        let al = base.path.clone();
        prop_assert!(rel_close(
            aligned_loss(&a, &t, &al, metric).unwrap(),
            aligned_loss(&pa, &pt, &al, metric).unwrap(),
            1e-12
        ));
    }

    #[test]
    fn scaling_scales_squared_loss_and_keeps_path((a, t) in pair(10, 6, 4), c in prop_oneof![Just(0.5f64), Just(2.0), Just(4.0), Just(0.25)]) {
        // Powers of two keep every product exact, so paths must match bit for bit.
        let base = solve_optimized(&a, &t, FrameMetric::SquaredL2).unwrap();
        let scaled = solve_optimized(&a.scaled(c).unwrap(), &t.scaled(c).unwrap(), FrameMetric::SquaredL2).unwrap();
        prop_assert_eq!(scaled.loss, base.loss * c * c);
        prop_assert_eq!(scaled.path, base.path);
    }

    #[test]
    fn planted_copies_have_zero_loss(
        (t, al) in (1usize..6, 1usize..10, 1usize..4).prop_flat_map(|(m, n, d)| {
            (prop::collection::vec(-3.0f64..3.0, m * d).prop_map(move |v| EmbeddingSequence::from_flat(v, m, d).unwrap()),
             alignment_for(n, m))
        })
    ) {
        let data: Vec<f64> = al.indices().iter().flat_map(|&j| t.frame(j).to_vec()).collect();
        let a = EmbeddingSequence::from_flat(data, al.len(), t.dim()).unwrap();
        let r = solve_optimized(&a, &t, FrameMetric::SquaredL2).unwrap();
        prop_assert!(r.loss <= 1e-12);
        prop_assert!(aligned_loss(&a, &t, &r.path, FrameMetric::SquaredL2).unwrap() <= 1e-12);
    }

    #[test]
    fn squared_gradients_pair_up((a, t) in pair(12, 7, 4)) {
        let g = consistency_grad(&a, &t, FrameMetric::SquaredL2).unwrap();
        let sa: f64 = g.d_audio.values().iter().sum();
        let st: f64 = g.d_text.values().iter().sum();
        prop_assert!((sa + st).abs() <= 1e-12 * (1.0 + sa.abs()));
        let used: std::collections::HashSet<usize> = g.path.indices().iter().copied().collect();
        for j in 0..t.len() {
            if !used.contains(&j) {
                prop_assert!(g.d_text.row(j).iter().all(|&v| v == 0.0));
            }
        }
        prop_assert!(g.d_audio.values().iter().chain(g.d_text.values()).all(|v| v.is_finite()));
        prop_assert_eq!(g.loss, solve_optimized(&a, &t, FrameMetric::SquaredL2).unwrap().loss);
    }
}
