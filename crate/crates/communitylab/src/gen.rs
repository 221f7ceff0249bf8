//! Seeded instance generators: random 3CNF formulas, community graphs
//! with a planted clique, and random bi-regular Label Cover instances.
//!
//! Every generator is deterministic per seed. Each one draws from its
//! own derived stream, so composing generators under a single top-level
//! seed keeps every stage independently reproducible.

use crate::error::{Error, Result};
use crate::graph::{CommunityGraph, GraphBuilder, Group, SubsetSelection};
use crate::labelcover::{Cnf3, EdgeConstraint, LabelCoverInstance, LcEdge};
use crate::partition::seeded_rng;
use crate::Frac;
use rand::seq::SliceRandom;
use rand::Rng;

const STREAM_SAT: u64 = 0x736174;
const STREAM_PLANT: u64 = 0x706c616e74;
const STREAM_LC: u64 = 0x62697265;

/// Random 3CNF: every clause picks three distinct variables and
/// independent polarities.
pub fn gen_random_3sat(num_vars: usize, num_clauses: usize, seed: u64) -> Result<Cnf3> {
    if num_vars < 3 {
        return Err(Error::InvalidParameter(format!(
            "three distinct variables per clause need num_vars >= 3, got {}",
            num_vars
        )));
    }
    if num_vars > i32::MAX as usize / 2 {
        return Err(Error::InvalidParameter(format!(
            "num_vars {} exceeds the literal encoding range",
            num_vars
        )));
    }
    let mut rng = seeded_rng(seed, STREAM_SAT);
    let mut clauses = Vec::with_capacity(num_clauses);
    for _ in 0..num_clauses {
        let mut vars = [0usize; 3];
        vars[0] = rng.gen_range(0..num_vars);
        loop {
            vars[1] = rng.gen_range(0..num_vars);
            if vars[1] != vars[0] {
                break;
            }
        }
        loop {
            vars[2] = rng.gen_range(0..num_vars);
            if vars[2] != vars[0] && vars[2] != vars[1] {
                break;
            }
        }
        let mut clause = [0i32; 3];
        for (lit, &v) in clause.iter_mut().zip(&vars) {
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            *lit = sign * (v as i32 + 1);
        }
        clauses.push(clause);
    }
    Cnf3::new(num_vars, clauses)
}

/// A generated graph together with the planted vertex set.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub graph: CommunityGraph,
    /// Sorted group ids of the planted clique.
    pub plant: Vec<usize>,
}

impl PlantedInstance {
    /// The plant as a selection over the graph's groups.
    pub fn plant_selection(&self) -> SubsetSelection {
        let mut sel = SubsetSelection::empty(self.graph.num_groups());
        for &v in &self.plant {
            sel.counts[v] = 1;
        }
        sel
    }
}

/// A clique of `plant_size` vertices hidden in an Erdos-Renyi background
/// where each remaining pair appears with the exact rational probability
/// `background`. The background coin is tossed for every pair, so the
/// non-plant edge pattern depends only on the seed, not on the plant.
pub fn gen_planted_community(
    n: usize,
    background: Frac,
    plant_size: usize,
    seed: u64,
) -> Result<PlantedInstance> {
    if n == 0 {
        return Err(Error::InvalidParameter("graph needs n >= 1".into()));
    }
    if plant_size > n {
        return Err(Error::InvalidParameter(format!(
            "plant of {} vertices does not fit in {}",
            plant_size, n
        )));
    }
    if background > Frac::new(1, 1) {
        return Err(Error::InvalidParameter(format!(
            "background density {} exceeds 1",
            background
        )));
    }
    let mut rng = seeded_rng(seed, STREAM_PLANT);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut rng);
    let mut plant: Vec<usize> = ids[..plant_size].to_vec();
    plant.sort_unstable();

    let groups = (0..n)
        .map(|i| Group::plain(&format!("v{}", i)))
        .collect::<Vec<_>>();
    let mut builder = GraphBuilder::new(groups);
    let num = *background.numer();
    let den = *background.denom();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_range(0..den) < num {
                builder.add_edge(i, j);
            }
        }
    }
    for (pi, &i) in plant.iter().enumerate() {
        for &j in &plant[(pi + 1)..] {
            builder.add_edge(i, j);
        }
    }
    let graph = builder.build(format!(
        "planted community: {} vertices, background {}, plant size {}, seed {}",
        n, background, plant_size, seed
    ));
    Ok(PlantedInstance { graph, plant })
}

/// Random bi-regular Label Cover: every A-vertex has degree `d_a`, every
/// B-vertex degree `d_b`, constraints are uniform projections. The edge
/// multiset starts as a shuffled stub pairing and repeated pairs are
/// repaired by random stub swaps.
pub fn gen_random_biregular_lc(
    n_a: usize,
    n_b: usize,
    d_a: usize,
    d_b: usize,
    sigma_a: u16,
    sigma_b: u16,
    seed: u64,
) -> Result<LabelCoverInstance> {
    if n_a == 0 || n_b == 0 {
        return Err(Error::InvalidParameter("both sides need vertices".into()));
    }
    if n_a * d_a != n_b * d_b {
        return Err(Error::InvalidParameter(format!(
            "degree handshake fails: {} x {} != {} x {}",
            n_a, d_a, n_b, d_b
        )));
    }
    if d_a > n_b || d_b > n_a {
        return Err(Error::InvalidParameter(format!(
            "simple bi-regularity infeasible: degrees ({}, {}) exceed the opposite side sizes ({}, {})",
            d_a, d_b, n_b, n_a
        )));
    }
    let mut rng = seeded_rng(seed, STREAM_LC);
    let e = n_a * d_a;
    let a_stubs: Vec<usize> = (0..n_a).flat_map(|a| std::iter::repeat_n(a, d_a)).collect();
    let mut b_stubs: Vec<usize> = (0..n_b).flat_map(|b| std::iter::repeat_n(b, d_b)).collect();
    b_stubs.shuffle(&mut rng);

    // Repair duplicate pairs by swapping the B-side of one duplicate
    // with a random stub; each swap preserves both degree sequences.
    let max_swaps = 100 * e.max(1);
    let mut swaps = 0;
    loop {
        let mut seen = std::collections::HashSet::with_capacity(e);
        let dup = (0..e).find(|&k| !seen.insert((a_stubs[k], b_stubs[k])));
        let Some(k) = dup else { break };
        if swaps >= max_swaps {
            return Err(Error::InvalidParameter(format!(
                "could not repair the stub pairing into a simple graph after {} swaps; \
                 the degree parameters leave too little room",
                max_swaps
            )));
        }
        let j = rng.gen_range(0..e);
        b_stubs.swap(k, j);
        swaps += 1;
    }

    let mut pairs: Vec<(usize, usize)> = a_stubs.into_iter().zip(b_stubs).collect();
    pairs.sort_unstable();
    let edges = pairs
        .into_iter()
        .map(|(a, b)| {
            let map = (0..sigma_a).map(|_| rng.gen_range(0..sigma_b)).collect();
            LcEdge {
                a,
                b,
                constraint: EdgeConstraint::Projection(map),
            }
        })
        .collect();
    let inst = LabelCoverInstance::new(n_a, n_b, sigma_a, sigma_b, edges)?;
    debug_assert_eq!(inst.regularity, Some((d_a, d_b)));
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac;
    use crate::graph::profile;

    #[test]
    fn random_3sat_shape_and_determinism() {
        let f = gen_random_3sat(10, 40, 7).unwrap();
        assert_eq!(f.num_vars(), 10);
        assert_eq!(f.clauses().len(), 40);
        for clause in f.clauses() {
            let mut vars: Vec<i32> = clause.iter().map(|l| l.abs()).collect();
            assert!(vars.iter().all(|&v| (1..=10).contains(&v)));
            vars.sort_unstable();
            vars.dedup();
            assert_eq!(vars.len(), 3, "three distinct variables per clause");
        }
        assert_eq!(f, gen_random_3sat(10, 40, 7).unwrap());
        assert_ne!(f, gen_random_3sat(10, 40, 8).unwrap());
        assert!(gen_random_3sat(2, 1, 0).is_err());
    }

    #[test]
    fn planted_clique_is_planted() {
        let inst = gen_planted_community(40, frac(1, 20), 8, 3).unwrap();
        assert_eq!(inst.plant.len(), 8);
        assert!(inst.plant.windows(2).all(|w| w[0] < w[1]));
        for (pi, &i) in inst.plant.iter().enumerate() {
            for &j in &inst.plant[(pi + 1)..] {
                assert!(inst.graph.group_adjacent(i, j));
            }
        }
        let p = profile(&inst.graph, &inst.plant_selection()).unwrap();
        assert_eq!(p.alpha_star, frac(1, 1), "a clique has full inner degree");
    }

    #[test]
    fn planted_background_extremes() {
        // Zero background: the plant's edges are the only edges.
        let inst = gen_planted_community(12, frac(0, 1), 5, 1).unwrap();
        let mut edges = 0;
        for i in 0..12 {
            for j in (i + 1)..12 {
                if inst.graph.group_adjacent(i, j) {
                    edges += 1;
                    assert!(inst.plant.contains(&i) && inst.plant.contains(&j));
                }
            }
        }
        assert_eq!(edges, 5 * 4 / 2);
        // Full background: complete graph regardless of the plant.
        let inst = gen_planted_community(9, frac(1, 1), 0, 2).unwrap();
        for i in 0..9 {
            for j in (i + 1)..9 {
                assert!(inst.graph.group_adjacent(i, j));
            }
        }
        assert!(gen_planted_community(5, frac(3, 2), 2, 0).is_err());
        assert!(gen_planted_community(5, frac(1, 2), 6, 0).is_err());
    }

    #[test]
    fn planted_is_deterministic_per_seed() {
        let a = gen_planted_community(25, frac(1, 10), 6, 42).unwrap();
        let b = gen_planted_community(25, frac(1, 10), 6, 42).unwrap();
        assert_eq!(a.plant, b.plant);
        assert_eq!(
            a.graph.to_text().unwrap(),
            b.graph.to_text().unwrap(),
            "same seed, same bytes"
        );
        let c = gen_planted_community(25, frac(1, 10), 6, 43).unwrap();
        assert_ne!(a.graph.to_text().unwrap(), c.graph.to_text().unwrap());
    }

    #[test]
    fn biregular_degrees_and_constraints() {
        let inst = gen_random_biregular_lc(30, 20, 4, 6, 3, 5, 11).unwrap();
        assert_eq!(inst.regularity, Some((4, 6)));
        assert_eq!(inst.edges.len(), 120);
        let mut seen = std::collections::HashSet::new();
        for edge in &inst.edges {
            assert!(seen.insert((edge.a, edge.b)), "simple graph");
            match &edge.constraint {
                EdgeConstraint::Projection(map) => {
                    assert_eq!(map.len(), 3);
                    assert!(map.iter().all(|&v| v < 5));
                }
                other => panic!("unexpected constraint {:?}", other),
            }
        }
        assert_eq!(inst, gen_random_biregular_lc(30, 20, 4, 6, 3, 5, 11).unwrap());
    }

    #[test]
    fn biregular_rejects_impossible_shapes() {
        // Handshake failure.
        assert!(gen_random_biregular_lc(10, 10, 3, 4, 2, 2, 0).is_err());
        // Degree exceeds the opposite side.
        assert!(gen_random_biregular_lc(4, 2, 3, 6, 2, 2, 0).is_err());
        // The tightest feasible case: complete bipartite.
        let inst = gen_random_biregular_lc(4, 2, 2, 4, 2, 2, 9).unwrap();
        assert_eq!(inst.edges.len(), 8);
        assert_eq!(inst.regularity, Some((2, 4)));
    }
}
