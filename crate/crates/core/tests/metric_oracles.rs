mod common;

use common::sweep::{all_partition_scores, binary_scores, canonical_labelings, chance_adjusted, map_scores, partition_scores, ranking_scores};

const TOL: f64 = 1e-10;

#[test]
fn example_and_macro_scores_match_set_definitions() {
    let t = binary_scores(500, 1);
    assert!(t.worst <= TOL, "worst {:e} over {} cases", t.worst, t.cases);
}

#[test]
fn ap_and_auc_match_rank_definitions() {
    let t = ranking_scores(500, 2);
    assert!(t.worst <= TOL, "worst {:e} over {} cases", t.worst, t.cases);
}

#[test]
fn map_at_3_matches_reference_apk() {
    let t = map_scores(500, 3);
    assert!(t.worst <= TOL, "worst {:e} over {} cases", t.worst, t.cases);
}

#[test]
fn clustering_scores_match_entropy_and_pair_counts() {
    let t = partition_scores(40, 4);
    assert!(t.worst <= TOL, "worst {:e} over {} cases", t.worst, t.cases);
}

#[test]
fn chance_adjusted_scores_hover_at_zero() {
    let (ari, ami) = chance_adjusted(200, 4, 20, 5);
    assert!(ari < 0.1 && ami < 0.1, "ari {ari} ami {ami}");
}

#[test]
fn canonical_labelings_count_partitions() {
    // Stirling numbers of the second kind summed over at most 4 blocks
    let counts: Vec<usize> = (1..=8).map(|n| canonical_labelings(n, 4).len()).collect();
    assert_eq!(counts, [1, 2, 5, 15, 51, 187, 715, 2795]);
}

#[test]
fn clustering_scores_match_on_every_small_partition_pair() {
    let t = all_partition_scores(6);
    assert!(t.worst <= TOL, "worst {:e} over {} cases", t.worst, t.cases);
}
