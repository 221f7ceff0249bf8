//! Brute-force oracles for the integration suites.
//!
//! Everything here recomputes its answer from first principles: community
//! profiles walk raw group adjacency instead of calling the library's
//! profile code, and satisfiability goes through plain truth tables. A
//! disagreement with the main implementation is always a finding.

use communitylab::graph::CommunityGraph;
use communitylab::labelcover::{Cnf3, Labeling};
use communitylab::Frac;
use std::collections::BTreeSet;

/// (alpha*, beta*) of a nonempty labeled subset, from the definition.
///
/// Members see their own copy plus selected copies of adjacent groups
/// (twins are never adjacent). Outsiders exist wherever a group has
/// unselected copies; with no outsiders beta* is 0.
pub fn naive_alpha_beta(graph: &CommunityGraph, counts: &[usize]) -> (Frac, Frac) {
    let size: usize = counts.iter().sum();
    assert!(size > 0, "oracle profile needs a nonempty subset");
    let n = graph.num_groups();
    let into_subset = |g: usize| -> usize {
        (0..n)
            .filter(|&h| h != g && graph.group_adjacent(g, h))
            .map(|h| counts[h])
            .sum()
    };
    let mut alpha_star: Option<Frac> = None;
    let mut beta_star = Frac::new(0, 1);
    for (g, &count) in counts.iter().enumerate() {
        let reach = into_subset(g);
        if count > 0 {
            let cover = Frac::new(1 + reach as u64, size as u64);
            alpha_star = Some(match alpha_star {
                Some(a) if a <= cover => a,
                _ => cover,
            });
        }
        if count < graph.groups()[g].multiplicity {
            let cover = Frac::new(reach as u64, size as u64);
            if cover > beta_star {
                beta_star = cover;
            }
        }
    }
    (alpha_star.expect("some group is selected"), beta_star)
}

/// The community predicate: strong ties at least alpha, weak ties
/// strictly below beta unless there are no weak ties at all.
pub fn naive_is_community(
    graph: &CommunityGraph,
    counts: &[usize],
    alpha: Frac,
    beta: Frac,
) -> bool {
    let (a, b) = naive_alpha_beta(graph, counts);
    a >= alpha && (b == Frac::new(0, 1) || b < beta)
}

/// Every community count-vector, by exhausting all selections.
pub fn naive_communities(
    graph: &CommunityGraph,
    alpha: Frac,
    beta: Frac,
    min_size: usize,
) -> BTreeSet<Vec<usize>> {
    let mults: Vec<usize> = graph.groups().iter().map(|g| g.multiplicity).collect();
    let mut out = BTreeSet::new();
    let mut counts = vec![0usize; mults.len()];
    loop {
        let size: usize = counts.iter().sum();
        if size >= min_size && size > 0 && naive_is_community(graph, &counts, alpha, beta) {
            out.insert(counts.clone());
        }
        // Odometer over 0..=mult per group.
        let mut g = 0;
        loop {
            if g == mults.len() {
                return out;
            }
            if counts[g] < mults[g] {
                counts[g] += 1;
                break;
            }
            counts[g] = 0;
            g += 1;
        }
    }
}

fn clause_satisfied(clause: &[i32; 3], mask: u64) -> bool {
    clause.iter().any(|&lit| {
        let bit = (mask >> (lit.unsigned_abs() - 1)) & 1 == 1;
        if lit > 0 {
            bit
        } else {
            !bit
        }
    })
}

/// Truth-table model count.
pub fn sat_count(f: &Cnf3) -> u64 {
    (0..1u64 << f.num_vars())
        .filter(|&mask| f.clauses().iter().all(|c| clause_satisfied(c, mask)))
        .count() as u64
}

/// Every satisfying assignment as a total Label Cover labeling: variable
/// bits on the A side, and per clause the symbol encoding its literal
/// pattern (pattern p as symbol p - 1, nonzero exactly when satisfied).
pub fn satisfying_labelings(f: &Cnf3) -> Vec<Labeling> {
    let mut out = Vec::new();
    for mask in 0..1u64 << f.num_vars() {
        if !f.clauses().iter().all(|c| clause_satisfied(c, mask)) {
            continue;
        }
        let phi_a: Vec<u16> = (0..f.num_vars()).map(|v| ((mask >> v) & 1) as u16).collect();
        let phi_b: Vec<u16> = f
            .clauses()
            .iter()
            .map(|clause| {
                let mut pattern = 0u16;
                for (slot, &lit) in clause.iter().enumerate() {
                    let value = if lit > 0 {
                        (mask >> (lit - 1)) & 1 == 1
                    } else {
                        (mask >> (-lit - 1)) & 1 == 0
                    };
                    if value {
                        pattern |= 1 << slot;
                    }
                }
                assert!(pattern > 0, "satisfied clause has a nonzero pattern");
                pattern - 1
            })
            .collect();
        out.push(Labeling::total(phi_a, phi_b));
    }
    out
}

/// Decoded labeling as plain label vectors, for set comparisons.
pub fn labeling_values(lab: &Labeling) -> (Vec<u16>, Vec<u16>) {
    use communitylab::labelcover::VarAssignment;
    let pick = |v: &VarAssignment| match v {
        VarAssignment::Valid(x) => *x,
        other => panic!("expected a valid label, got {:?}", other),
    };
    (
        lab.phi_a.iter().map(pick).collect(),
        lab.phi_b.iter().map(pick).collect(),
    )
}
