//! Randomized balanced partitions of bi-regular Label Cover instances,
//! with explicit certificate checking.
//!
//! Given a partition of B into size-rho blocks T_j, we split A into
//! k = ceil(n_A / rho) blocks S_i by placing each A-vertex uniformly at
//! random, then verify two conditions with exact arithmetic:
//!
//! 1. every block size is within rho/2 of rho (strictly), and
//! 2. every pair count |(S_i x T_j) cap E| is within d_A rho^2 / (2 n_B)
//!    of its mean d_A rho^2 / n_B (strictly).
//!
//! The verification is the product; the randomness is just a way to find a
//! witness, retried with derived seeds until one verifies.

use crate::error::{Error, Result};
use crate::labelcover::LabelCoverInstance;
use crate::Frac;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A partition of the A side into blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    pub blocks: Vec<Vec<usize>>,
    pub rho: usize,
    pub seed: u64,
}

/// One (S_i, T_j) pair's constraint-count check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCheck {
    pub i: usize,
    pub j: usize,
    pub count: u64,
    pub target: Frac,
    pub ok: bool,
}

/// The full certificate for one candidate partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub rho: usize,
    pub block_sizes: Vec<usize>,
    pub sizes_ok: Vec<bool>,
    pub pairs: Vec<PairCheck>,
    pub pass: bool,
    pub note: Option<String>,
}

impl PartitionReport {
    pub fn summary(&self) -> String {
        let size_fails = self.sizes_ok.iter().filter(|&&ok| !ok).count();
        let pair_fails = self.pairs.iter().filter(|p| !p.ok).count();
        format!(
            "{} of {} size checks and {} of {} pair checks failed{}",
            size_fails,
            self.sizes_ok.len(),
            pair_fails,
            self.pairs.len(),
            self.note
                .as_deref()
                .map(|n| format!(" ({})", n))
                .unwrap_or_default()
        )
    }

    fn failure_count(&self) -> usize {
        self.sizes_ok.iter().filter(|&&ok| !ok).count()
            + self.pairs.iter().filter(|p| !p.ok).count()
    }
}

/// Split `0..n_b` into consecutive blocks of size `rho`.
pub fn contiguous_blocks(n_b: usize, rho: usize) -> Result<Vec<Vec<usize>>> {
    if rho == 0 || !n_b.is_multiple_of(rho) {
        return Err(Error::InvalidParameter(format!(
            "block size {} does not divide |B| = {}",
            rho, n_b
        )));
    }
    Ok((0..n_b / rho)
        .map(|j| (j * rho..(j + 1) * rho).collect())
        .collect())
}

fn validate_b_blocks(inst: &LabelCoverInstance, t_blocks: &[Vec<usize>], rho: usize) -> Result<()> {
    let mut seen = vec![false; inst.n_b];
    for (j, t) in t_blocks.iter().enumerate() {
        if t.len() != rho {
            return Err(Error::InvalidParameter(format!(
                "B-block {} has size {}, expected {}",
                j,
                t.len(),
                rho
            )));
        }
        for &b in t {
            if b >= inst.n_b || seen[b] {
                return Err(Error::InvalidParameter(format!(
                    "B-block {} repeats or exceeds range at vertex {}",
                    j, b
                )));
            }
            seen[b] = true;
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::InvalidParameter(
            "B-blocks do not cover all of B".into(),
        ));
    }
    Ok(())
}

/// Check conditions (1) and (2) for a given partition, exactly.
pub fn verify_partition(
    inst: &LabelCoverInstance,
    partition: &BlockPartition,
    t_blocks: &[Vec<usize>],
) -> Result<PartitionReport> {
    let rho = partition.rho;
    let (d_a, _) = inst.regularity.ok_or_else(|| {
        Error::InvalidParameter("partition lemma needs a bi-regular instance".into())
    })?;
    validate_b_blocks(inst, t_blocks, rho)?;
    let mut owner = vec![usize::MAX; inst.n_a];
    for (i, s) in partition.blocks.iter().enumerate() {
        for &a in s {
            if a >= inst.n_a || owner[a] != usize::MAX {
                return Err(Error::InvalidParameter(format!(
                    "A-block {} repeats or exceeds range at vertex {}",
                    i, a
                )));
            }
            owner[a] = i;
        }
    }
    if owner.contains(&usize::MAX) {
        return Err(Error::InvalidParameter(
            "A-blocks do not cover all of A".into(),
        ));
    }

    let block_sizes: Vec<usize> = partition.blocks.iter().map(|s| s.len()).collect();
    // Condition (1): | |S_i| - rho | < rho / 2, i.e. |2|S_i| - 2 rho| < rho.
    let sizes_ok: Vec<bool> = block_sizes
        .iter()
        .map(|&s| (2 * s as i64 - 2 * rho as i64).unsigned_abs() < rho as u64)
        .collect();

    let mut b_owner = vec![usize::MAX; inst.n_b];
    for (j, t) in t_blocks.iter().enumerate() {
        for &b in t {
            b_owner[b] = j;
        }
    }
    let mut counts = vec![vec![0u64; t_blocks.len()]; partition.blocks.len()];
    for e in &inst.edges {
        counts[owner[e.a]][b_owner[e.b]] += 1;
    }

    // Condition (2): |count - d_A rho^2 / n_B| < d_A rho^2 / (2 n_B),
    // i.e. 2 |count * n_B - d_A rho^2| < d_A rho^2 over the integers.
    let dr2 = d_a as i128 * rho as i128 * rho as i128;
    let n_b = inst.n_b as i128;
    let target = Frac::new(dr2 as u64, inst.n_b as u64);
    let mut pairs = Vec::with_capacity(counts.len() * t_blocks.len());
    for (i, row) in counts.iter().enumerate() {
        for (j, &count) in row.iter().enumerate() {
            let ok = 2 * (count as i128 * n_b - dr2).abs() < dr2;
            pairs.push(PairCheck {
                i,
                j,
                count,
                target,
                ok,
            });
        }
    }

    let pass = sizes_ok.iter().all(|&ok| ok) && pairs.iter().all(|p| p.ok);
    let note = if dr2 == 0 {
        Some("target is zero, so the strict bound cannot hold".into())
    } else {
        None
    };
    Ok(PartitionReport {
        rho,
        block_sizes,
        sizes_ok,
        pairs,
        pass,
        note,
    })
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Deterministic RNG for `(seed, stream)`; distinct streams decorrelate.
pub(crate) fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(stream)))
}

/// Place each A-vertex uniformly at random into ceil(n_A/rho) blocks and
/// verify; retry with derived seeds up to `max_retries` attempts. Returns
/// the first passing partition, or the error carries the best report seen.
pub fn random_partition(
    inst: &LabelCoverInstance,
    t_blocks: &[Vec<usize>],
    rho: usize,
    seed: u64,
    max_retries: u32,
) -> Result<(BlockPartition, PartitionReport)> {
    if rho == 0 || inst.n_a < rho {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= rho <= n_A, got rho {} with n_A {}",
            rho, inst.n_a
        )));
    }
    if max_retries == 0 {
        return Err(Error::InvalidParameter("max_retries must be >= 1".into()));
    }
    let k = inst.n_a.div_ceil(rho);
    let mut best: Option<PartitionReport> = None;
    for attempt in 0..max_retries {
        let mut rng = seeded_rng(seed, attempt as u64);
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); k];
        for a in 0..inst.n_a {
            blocks[rng.gen_range(0..k)].push(a);
        }
        let partition = BlockPartition {
            blocks,
            rho,
            seed: splitmix64(seed ^ splitmix64(attempt as u64)),
        };
        let report = verify_partition(inst, &partition, t_blocks)?;
        if report.pass {
            return Ok((partition, report));
        }
        if best
            .as_ref()
            .is_none_or(|b| report.failure_count() < b.failure_count())
        {
            best = Some(report);
        }
    }
    Err(Error::PartitionFailed {
        attempts: max_retries,
        last_failure: best.map(|b| b.summary()).unwrap_or_default(),
    })
}
