mod common;

use common::{gaussian, normal_equations_error, orthonormal, tail_energy};
use cur_spca::cursampler::{cur_decompose, leverage_scores, sample_columns, LeverageScores, SamplingMode};
use cur_spca::matcore::{column_projection_error, factor_projection_error, theorem3_gap, truncated_svd};
use cur_spca::{ColumnIndexSet, DenseMatrix};
use itertools::Itertools;
use proptest::prelude::*;

fn best_subset_error(x: &DenseMatrix, c: usize) -> f64 {
    (0..x.ncols())
        .combinations(c)
        .map(|idx| column_projection_error(x, &ColumnIndexSet::new(idx, x.ncols()).unwrap()).unwrap())
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn eckart_young_bounds_every_subset() {
    for seed in 0..10u64 {
        let (n, p) = (5 + (seed as usize % 3), 6 + (seed as usize % 3));
        let x = gaussian(n, p, 500 + seed);
        for k in 1..=n.min(p) {
            let v = truncated_svd(&x, k).unwrap().v;
            let svd_err = factor_projection_error(&x, &v).unwrap();
            assert!((svd_err * svd_err - tail_energy(&x, k)).abs() < 1e-9 * x.norm_squared());
            for idx in (0..p).combinations(k) {
                let e = column_projection_error(&x, &ColumnIndexSet::new(idx, p).unwrap()).unwrap();
                assert!(svd_err <= e + 1e-10, "seed {seed} k {k}: {svd_err} > {e}");
            }
        }
    }
}

#[test]
fn projection_error_matches_normal_equations_on_all_subsets() {
    let x = gaussian(6, 8, 17);
    for c in 1..=4 {
        for idx in (0..8).combinations(c) {
            let got = column_projection_error(&x, &ColumnIndexSet::new(idx.clone(), 8).unwrap()).unwrap();
            assert!((got - normal_equations_error(&x, &idx)).abs() < 1e-9);
        }
    }
}

#[test]
fn cur_never_beats_best_subset() {
    for seed in 0..20u64 {
        let x = gaussian(6, 8, 900 + seed);
        for c in 1..=3 {
            let best = best_subset_error(&x, c);
            for mode in [SamplingMode::WithReplacement, SamplingMode::Distinct] {
                let r = cur_decompose(&x, 2, c, mode, seed).unwrap();
                assert!(r.selected.len() <= c);
                assert!(r.error >= best - 1e-12, "seed {seed} c {c}");
            }
        }
    }
}

#[test]
fn theorem3_equality_for_block_orthogonal_data() {
    for seed in 0..20u64 {
        // first three columns live in rows 0..4, the rest in rows 4..8
        let mut x = DenseMatrix::zeros(8, 6);
        x.view_mut((0, 0), (4, 3)).copy_from(&gaussian(4, 3, seed));
        x.view_mut((4, 3), (4, 3)).copy_from(&gaussian(4, 3, seed + 100));
        let set = ColumnIndexSet::new(vec![0, 1, 2], 6).unwrap();
        let mut w = DenseMatrix::zeros(6, 3);
        w.view_mut((0, 0), (3, 3)).copy_from(&gaussian(3, 3, seed + 200));
        let gap = theorem3_gap(&x, &set, &w).unwrap();
        assert!(gap.abs() <= 1e-9, "seed {seed}: gap {gap}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn theorem3_gap_is_nonnegative(
        seed in any::<u64>(),
        n in 2usize..9,
        p in 2usize..9,
        mask in prop::collection::vec(any::<bool>(), 8),
        k in 1usize..4,
    ) {
        let x = gaussian(n, p, seed);
        let idx: Vec<usize> = (0..p).filter(|i| mask[*i]).collect();
        let set = ColumnIndexSet::new(idx, p).unwrap();
        let mut w = gaussian(p, k, seed ^ 0x5555);
        for i in set.complement().indices() {
            w.row_mut(*i).fill(0.0);
        }
        let gap = theorem3_gap(&x, &set, &w).unwrap();
        prop_assert!(gap >= -1e-9, "gap {}", gap);
    }

    #[test]
    fn theorem3_gap_positive_for_generic_data(seed in any::<u64>(), split in 1usize..5) {
        let x = gaussian(8, 6, seed);
        let set = ColumnIndexSet::new((0..split).collect(), 6).unwrap();
        let cross = x.columns(0, split).transpose() * x.columns(split, 6 - split);
        prop_assume!(cross.amax() > 1e-6);
        let mut w = DenseMatrix::zeros(6, split);
        w.view_mut((0, 0), (split, split)).copy_from(&gaussian(split, split, seed ^ 1));
        prop_assert!(theorem3_gap(&x, &set, &w).unwrap() > 0.0);
    }

    #[test]
    fn leverage_scores_follow_row_permutations(seed in any::<u64>(), p in 2usize..30, k in 1usize..6, shift in 0usize..30) {
        prop_assume!(k <= p);
        let v = orthonormal(p, k, seed);
        let perm: Vec<usize> = (0..p).map(|i| (i * 7 + shift) % p).collect();
        prop_assume!(perm.iter().all_unique());
        let moved = DenseMatrix::from_fn(p, k, |i, j| v[(perm[i], j)]);
        let a = leverage_scores(&v).unwrap();
        let b = leverage_scores(&moved).unwrap();
        for i in 0..p {
            prop_assert!((b.scores()[i] - a.scores()[perm[i]]).abs() < 1e-15);
        }
        prop_assert!((b.scores().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_score_columns_are_never_selected(seed in any::<u64>(), zeros in prop::collection::vec(any::<bool>(), 12), c in 1usize..6) {
        let live: Vec<usize> = (0..12).filter(|i| !zeros[*i]).collect();
        prop_assume!(live.len() >= c);
        let mut scores = vec![0.0; 12];
        for i in &live {
            scores[*i] = 1.0 / live.len() as f64;
        }
        let total: f64 = scores.iter().sum();
        scores.iter_mut().for_each(|s| *s /= total);
        let s = LeverageScores::from_probabilities(scores, 1).unwrap();
        for mode in [SamplingMode::WithReplacement, SamplingMode::Distinct] {
            let set = sample_columns(&s, c, mode, seed).unwrap();
            prop_assert!(set.indices().iter().all(|i| !zeros[*i]));
        }
    }
}
