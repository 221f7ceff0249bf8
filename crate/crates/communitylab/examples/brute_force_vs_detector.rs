//! The tuple detector against ground truth: on graphs small enough to
//! enumerate every subset, the detector's verified output is always a
//! subset of the true community list, and converges to it as the tuple
//! size grows.

use communitylab::budget::Budget;
use communitylab::detector::enumerate_all_via_detector;
use communitylab::gen::gen_planted_community;
use communitylab::graph::enumerate_communities;
use communitylab::frac;
use std::collections::BTreeSet;

fn main() {
    let budget = Budget::from_env();
    let alpha = frac(1, 1);
    let beta = frac(1, 2);
    for seed in [2u64, 3, 5] {
        let graph = gen_planted_community(10, frac(1, 2), 4, seed).unwrap().graph;
        let truth: BTreeSet<Vec<usize>> =
            enumerate_communities(&graph, alpha, beta, 1, budget)
                .unwrap()
                .into_iter()
                .map(|s| s.counts)
                .collect();
        println!(
            "seed {}: {} (1, 1/2)-communities by exhaustive enumeration",
            seed,
            truth.len()
        );
        for k in [1usize, 2, 4, 8] {
            let found: BTreeSet<Vec<usize>> =
                enumerate_all_via_detector(&graph, alpha, beta, k, 1, budget)
                    .unwrap()
                    .into_iter()
                    .map(|s| s.counts)
                    .collect();
            assert!(
                found.is_subset(&truth),
                "detector output must never contain a non-community"
            );
            println!(
                "  tuple size {}: {} of {} recovered{}",
                k,
                found.len(),
                truth.len(),
                if found == truth { " (exact match)" } else { "" }
            );
        }
    }
}
