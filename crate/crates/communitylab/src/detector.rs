//! Tuple-based community detection: enumerate or sample small vertex
//! tuples, read off a threshold-neighborhood candidate set per tuple, and
//! keep the candidates that verify as communities.
//!
//! A tuple is a multiset of vertices; copies in a twin group are
//! interchangeable, so a tuple canonicalizes to per-group counts. The
//! candidate set for threshold theta selects every vertex whose closed
//! neighborhood covers at least theta * k tuple slots. Every emitted
//! community re-verifies under the exact predicate, so the detector is
//! sound by construction; completeness in k is empirical and measured by
//! the test suite rather than asserted.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::graph::{profile, profile_passes, CommunityGraph, CommunityProfile, SubsetSelection};
use crate::Frac;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// How tuples are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectorMode {
    /// All k-multisets over twin groups.
    Exhaustive,
    /// Seeded random tuples: a uniform starting vertex, then k - 1 draws
    /// from its closed neighborhood. Neighborhood-local seeding is what
    /// makes sparse planted structure reachable; tuples drawn uniformly
    /// over the whole graph almost never land enough mass inside one
    /// community.
    Sampled { trials: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub tuple_size: usize,
    /// Candidate threshold; `None` means (alpha + beta) / 2.
    pub theta: Option<Frac>,
    pub mode: DetectorMode,
    /// Applied to candidates before verification and meant to mirror the
    /// min_size given to any enumeration being compared against.
    pub min_size: usize,
    /// Exhaustive tuples range over counts 0..=k per group; switching this
    /// off caps each group's count at its multiplicity (distinct
    /// vertices).
    pub with_repetition: bool,
    /// Count a vertex's own tuple occupancy toward its score (closed
    /// neighborhood). The open variant is for experimentation.
    pub closed_neighborhood: bool,
    /// Require score > theta * k instead of >=.
    pub strict_threshold: bool,
}

impl DetectorConfig {
    pub fn new(tuple_size: usize, mode: DetectorMode) -> Self {
        DetectorConfig {
            tuple_size,
            theta: None,
            mode,
            min_size: 1,
            with_repetition: true,
            closed_neighborhood: true,
            strict_threshold: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.tuple_size == 0 {
            return Err(Error::InvalidParameter("tuple size must be >= 1".into()));
        }
        if let Some(t) = self.theta {
            if t > Frac::new(1, 1) {
                return Err(Error::InvalidParameter(format!(
                    "theta must be in [0, 1], got {}",
                    t
                )));
            }
        }
        Ok(())
    }
}

/// k = ceil(c * ln n / (alpha - beta)^2), the tuple size at which the
/// threshold test concentrates. The constant c is a knob; 1 is enough at
/// the scales this crate runs.
pub fn suggested_tuple_size(n: usize, alpha: Frac, beta: Frac, c: f64) -> Result<usize> {
    if alpha <= beta {
        return Err(Error::InvalidParameter(format!(
            "tuple size needs alpha > beta, got {} <= {}",
            alpha, beta
        )));
    }
    let sep = frac_to_f64(alpha) - frac_to_f64(beta);
    let k = (c * (n.max(2) as f64).ln() / (sep * sep)).ceil() as usize;
    Ok(k.max(1))
}

fn frac_to_f64(f: Frac) -> f64 {
    *f.numer() as f64 / *f.denom() as f64
}

/// The candidate set of a tuple, given as per-group tuple counts.
///
/// A copy passes when its score (selected-neighbor slots, plus its own
/// slots under the closed convention) reaches theta * k; tuple slots on a
/// group are spread round-robin over its copies.
pub fn candidate_from_tuple(
    graph: &CommunityGraph,
    tuple: &[usize],
    theta: Frac,
    cfg: &DetectorConfig,
) -> Result<SubsetSelection> {
    let n = graph.num_groups();
    if tuple.len() != n {
        return Err(Error::InvalidParameter(format!(
            "tuple over {} groups, graph has {}",
            tuple.len(),
            n
        )));
    }
    let k: usize = tuple.iter().sum();
    if k == 0 {
        return Err(Error::InvalidParameter("tuple must be nonempty".into()));
    }
    let mut base = vec![0u64; n];
    for (h, &r) in tuple.iter().enumerate() {
        if r > 0 {
            for g in graph.group_neighbors(h) {
                base[g as usize] += r as u64;
            }
        }
    }
    let tn = *theta.numer() as u128;
    let td = *theta.denom() as u128;
    let pass = |score: u64| {
        let lhs = score as u128 * td;
        let rhs = tn * k as u128;
        if cfg.strict_threshold {
            lhs > rhs
        } else {
            lhs >= rhs
        }
    };
    let mut counts = vec![0usize; n];
    for (g, slot) in counts.iter_mut().enumerate() {
        let m = graph.groups()[g].multiplicity;
        let q = tuple[g] / m;
        let rem = tuple[g] % m;
        for j in 1..=m {
            let occ = if cfg.closed_neighborhood {
                (q + usize::from(j <= rem)) as u64
            } else {
                0
            };
            if pass(base[g] + occ) {
                *slot += 1;
            }
        }
    }
    Ok(SubsetSelection { counts })
}

/// A verified detection result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectedCommunity {
    pub selection: SubsetSelection,
    pub profile: CommunityProfile,
}

/// Run the detector; every returned subset passes the exact community
/// predicate. Results are deduplicated by count-vector and returned in
/// lexicographic order.
pub fn detect(
    graph: &CommunityGraph,
    alpha: Frac,
    beta: Frac,
    cfg: &DetectorConfig,
    budget: Budget,
) -> Result<Vec<DetectedCommunity>> {
    cfg.validate()?;
    if alpha > Frac::new(1, 1) || beta > Frac::new(1, 1) {
        return Err(Error::InvalidParameter(
            "alpha and beta must be at most 1".into(),
        ));
    }
    let theta = match cfg.theta {
        Some(t) => t,
        None => {
            if alpha <= beta {
                return Err(Error::InvalidParameter(format!(
                    "default threshold needs alpha > beta, got {} <= {}",
                    alpha, beta
                )));
            }
            (alpha + beta) / Frac::new(2, 1)
        }
    };
    let mut verified: BTreeMap<SubsetSelection, CommunityProfile> = BTreeMap::new();
    let mut seen: std::collections::BTreeSet<SubsetSelection> = Default::default();
    let mut consider = |graph: &CommunityGraph, s: SubsetSelection| {
        if s.size() < cfg.min_size.max(1) || !seen.insert(s.clone()) {
            return;
        }
        let p = profile(graph, &s).expect("candidate is a valid nonempty selection");
        if profile_passes(&p, alpha, beta) {
            verified.insert(s, p);
        }
    };
    match cfg.mode {
        DetectorMode::Exhaustive => {
            let n = graph.num_groups();
            if multiset_space_exceeds(n, cfg.tuple_size, budget.limit()) {
                return Err(Error::InvalidParameter(format!(
                    "exhaustive mode: {} groups admit more than {} tuples of size {}; \
                     use sampled mode or raise the budget",
                    n,
                    budget.limit(),
                    cfg.tuple_size
                )));
            }
            let mut tuple = vec![0usize; n];
            exhaustive_tuples(graph, cfg, 0, cfg.tuple_size, &mut tuple, &mut |t| {
                let s = candidate_from_tuple(graph, t, theta, cfg)
                    .expect("exhaustive tuples are nonempty");
                consider(graph, s);
            });
        }
        DetectorMode::Sampled { trials, seed } => {
            let mut rng = crate::partition::seeded_rng(seed, 0x6465746563);
            let weights: Vec<usize> = graph.groups().iter().map(|g| g.multiplicity).collect();
            let total: usize = weights.iter().sum();
            if total == 0 {
                return Ok(Vec::new());
            }
            for _ in 0..trials {
                let tuple = sample_tuple(graph, cfg, &weights, total, &mut rng);
                let s = candidate_from_tuple(graph, &tuple, theta, cfg)
                    .expect("sampled tuples are nonempty");
                consider(graph, s);
            }
        }
    }
    Ok(verified
        .into_iter()
        .map(|(selection, profile)| DetectedCommunity { selection, profile })
        .collect())
}

/// Exhaustive detection with the default threshold, as a deduplicated set
/// of count-vectors.
pub fn enumerate_all_via_detector(
    graph: &CommunityGraph,
    alpha: Frac,
    beta: Frac,
    tuple_size: usize,
    min_size: usize,
    budget: Budget,
) -> Result<Vec<SubsetSelection>> {
    let mut cfg = DetectorConfig::new(tuple_size, DetectorMode::Exhaustive);
    cfg.min_size = min_size;
    Ok(detect(graph, alpha, beta, &cfg, budget)?
        .into_iter()
        .map(|d| d.selection)
        .collect())
}

/// Does the number of k-multisets over n groups exceed `limit`? Counted
/// in f64 with an early exit; exactness does not matter for a budget
/// refusal.
fn multiset_space_exceeds(n: usize, k: usize, limit: u128) -> bool {
    if n == 0 {
        return false;
    }
    let mut acc = 1f64;
    for i in 0..k {
        acc = acc * (n + i) as f64 / (i + 1) as f64;
        if acc > limit as f64 * 2.0 {
            return true;
        }
    }
    acc > limit as f64
}

fn exhaustive_tuples(
    graph: &CommunityGraph,
    cfg: &DetectorConfig,
    g: usize,
    remaining: usize,
    tuple: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    let n = graph.num_groups();
    if g == n {
        if remaining == 0 {
            f(tuple);
        }
        return;
    }
    let cap = if cfg.with_repetition {
        remaining
    } else {
        remaining.min(graph.groups()[g].multiplicity)
    };
    for c in 0..=cap {
        tuple[g] = c;
        exhaustive_tuples(graph, cfg, g + 1, remaining - c, tuple, f);
    }
    tuple[g] = 0;
}

/// Draw one tuple: a multiplicity-weighted uniform start vertex, then
/// k - 1 uniform draws from its closed neighborhood.
fn sample_tuple(
    graph: &CommunityGraph,
    cfg: &DetectorConfig,
    weights: &[usize],
    total: usize,
    rng: &mut impl Rng,
) -> Vec<usize> {
    let n = graph.num_groups();
    let mut tuple = vec![0usize; n];
    let mut pick = rng.gen_range(0..total);
    let mut start = 0;
    for (g, &w) in weights.iter().enumerate() {
        if pick < w {
            start = g;
            break;
        }
        pick -= w;
    }
    tuple[start] = 1;
    // Closed neighborhood of the start vertex, at vertex granularity.
    let mut pool: Vec<(usize, usize)> = vec![(start, weights[start])];
    for h in graph.group_neighbors(start) {
        pool.push((h as usize, weights[h as usize]));
    }
    let pool_total: usize = pool.iter().map(|&(_, w)| w).sum();
    for _ in 1..cfg.tuple_size {
        let mut pick = rng.gen_range(0..pool_total);
        for &(g, w) in &pool {
            if pick < w {
                tuple[g] += 1;
                break;
            }
            pick -= w;
        }
    }
    if !cfg.with_repetition {
        for (g, slot) in tuple.iter_mut().enumerate() {
            *slot = (*slot).min(graph.groups()[g].multiplicity);
        }
    }
    tuple
}
