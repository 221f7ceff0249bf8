//! Community graphs over twin groups, the exact (alpha, beta) community
//! verifier, enumeration/counting, and the max-gap oracle.
//!
//! Vertices come in groups: all copies in a group share their adjacency
//! and are mutually non-adjacent, so a vertex subset is described by a
//! per-group selected count. Adjacency is all-or-nothing between groups,
//! stored either as an explicit symmetric bit matrix or as an oracle
//! callback for graphs too large to materialize.
//!
//! Membership semantics: a member's tie strength counts its closed
//! neighborhood (itself plus in-subset neighbors); a non-member's uses the
//! open neighborhood. A subset S is an (alpha, beta)-community when
//! alpha_star(S) >= alpha and every non-member either touches S not at all
//! or strictly below beta * |S|. Keeping the weak-tie bound strict for
//! positively attached outsiders (while zero attachment always passes) is
//! what makes gadget counts land exactly: the gadgets manufacture
//! outsiders whose attachment is exactly beta * |S|, and those must not
//! count as members of legitimate communities.

use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};
use crate::{Frac, SFrac};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

/// A twin group: `multiplicity` interchangeable copies of one vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub descriptor: serde_json::Value,
    pub multiplicity: usize,
}

impl Group {
    pub fn new(descriptor: serde_json::Value, multiplicity: usize) -> Self {
        Group {
            descriptor,
            multiplicity,
        }
    }

    pub fn plain(name: &str) -> Self {
        Group::new(serde_json::Value::String(name.to_string()), 1)
    }
}

/// Symmetric group-level bit matrix with a zero diagonal.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitMatrix {
            n,
            words,
            bits: vec![0u64; n * words],
        }
    }

    pub fn set(&mut self, i: usize, j: usize) {
        assert!(i != j && i < self.n && j < self.n, "bad edge ({}, {})", i, j);
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
        self.bits[j * self.words + i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix({} groups)", self.n)
    }
}

/// Explicit adjacency: matrix for pair tests, lists for iteration.
#[derive(Debug, Clone)]
pub struct ExplicitData {
    pub matrix: BitMatrix,
    pub lists: Vec<Vec<u32>>,
}

type OracleFn = Arc<dyn Fn(usize, usize) -> bool + Send + Sync>;

/// Group-level adjacency backing store.
#[derive(Clone)]
pub enum Adjacency {
    Explicit(ExplicitData),
    /// Pure predicate on group index pairs; called with i < j.
    Oracle(OracleFn),
}

impl fmt::Debug for Adjacency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Adjacency::Explicit(d) => write!(f, "Explicit({} groups)", d.lists.len()),
            Adjacency::Oracle(_) => write!(f, "Oracle"),
        }
    }
}

/// A community graph: twin groups plus group-level adjacency.
#[derive(Debug, Clone)]
pub struct CommunityGraph {
    groups: Vec<Group>,
    adjacency: Adjacency,
    pub metadata: String,
}

/// Incremental builder for explicit graphs.
pub struct GraphBuilder {
    groups: Vec<Group>,
    matrix: BitMatrix,
}

impl GraphBuilder {
    pub fn new(groups: Vec<Group>) -> Self {
        let n = groups.len();
        GraphBuilder {
            groups,
            matrix: BitMatrix::new(n),
        }
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.matrix.set(i, j);
    }

    pub fn build(self, metadata: impl Into<String>) -> CommunityGraph {
        let n = self.groups.len();
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (i, list) in lists.iter_mut().enumerate() {
            for j in 0..n {
                if self.matrix.get(i, j) {
                    list.push(j as u32);
                }
            }
        }
        CommunityGraph {
            groups: self.groups,
            adjacency: Adjacency::Explicit(ExplicitData {
                matrix: self.matrix,
                lists,
            }),
            metadata: metadata.into(),
        }
    }
}

impl CommunityGraph {
    pub fn new_oracle(groups: Vec<Group>, oracle: OracleFn, metadata: impl Into<String>) -> Self {
        CommunityGraph {
            groups,
            adjacency: Adjacency::Oracle(oracle),
            metadata: metadata.into(),
        }
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.groups.iter().map(|g| g.multiplicity).sum()
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.adjacency, Adjacency::Explicit(_))
    }

    pub fn group_adjacent(&self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        match &self.adjacency {
            Adjacency::Explicit(d) => d.matrix.get(i, j),
            Adjacency::Oracle(f) => f(i.min(j), i.max(j)),
        }
    }

    /// Group indices adjacent to `g`. On oracle graphs this scans all
    /// groups.
    pub fn group_neighbors(&self, g: usize) -> Vec<u32> {
        match &self.adjacency {
            Adjacency::Explicit(d) => d.lists[g].clone(),
            Adjacency::Oracle(_) => (0..self.num_groups())
                .filter(|&h| self.group_adjacent(g, h))
                .map(|h| h as u32)
                .collect(),
        }
    }

    fn explicit(&self) -> Option<&ExplicitData> {
        match &self.adjacency {
            Adjacency::Explicit(d) => Some(d),
            Adjacency::Oracle(_) => None,
        }
    }

    /// Query every group pair once and return an explicit copy.
    pub fn materialize(&self, budget: Budget) -> Result<CommunityGraph> {
        let n = self.num_groups();
        budget.check((n as u128) * (n as u128))?;
        let mut builder = GraphBuilder::new(self.groups.clone());
        for i in 0..n {
            for j in (i + 1)..n {
                if self.group_adjacent(i, j) {
                    builder.add_edge(i, j);
                }
            }
        }
        let mut g = builder.build(self.metadata.clone());
        g.metadata.push_str(" (materialized)");
        Ok(g)
    }

    /// Serialize to the text format: `cgraph k` header, `id multiplicity
    /// descriptor-json` per group, then adjacent pairs `i j`. Oracle-backed
    /// graphs refuse.
    pub fn to_text(&self) -> Result<String> {
        let data = self.explicit().ok_or_else(|| {
            Error::Unserializable("oracle-backed graph; materialize it first".into())
        })?;
        let mut out = String::new();
        writeln!(out, "cgraph {}", self.num_groups()).unwrap();
        for (i, g) in self.groups.iter().enumerate() {
            writeln!(
                out,
                "{} {} {}",
                i,
                g.multiplicity,
                serde_json::to_string(&g.descriptor)?
            )
            .unwrap();
        }
        for i in 0..self.num_groups() {
            for &j in &data.lists[i] {
                if (j as usize) > i {
                    writeln!(out, "{} {}", i, j).unwrap();
                }
            }
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<CommunityGraph> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty file".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 2 || fields[0] != "cgraph" {
            return Err(Error::Parse {
                line: 1,
                message: "expected header `cgraph k`".into(),
            });
        }
        let k: usize = fields[1].parse().map_err(|_| Error::Parse {
            line: 1,
            message: format!("bad group count `{}`", fields[1]),
        })?;
        let mut groups = Vec::with_capacity(k);
        for want in 0..k {
            let (idx, line) = lines.next().ok_or_else(|| Error::Parse {
                line: text.lines().count(),
                message: format!("expected {} group lines", k),
            })?;
            let line_no = idx + 1;
            let mut parts = line.trim().splitn(3, char::is_whitespace);
            let id: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or(Error::Parse {
                    line: line_no,
                    message: "bad group id".into(),
                })?;
            if id != want {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("group id {} out of order, expected {}", id, want),
                });
            }
            let multiplicity: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or(Error::Parse {
                    line: line_no,
                    message: "bad multiplicity".into(),
                })?;
            if multiplicity == 0 {
                return Err(Error::Parse {
                    line: line_no,
                    message: "multiplicity must be >= 1".into(),
                });
            }
            let descriptor: serde_json::Value = parts
                .next()
                .map(|s| serde_json::from_str(s.trim()))
                .transpose()?
                .unwrap_or(serde_json::Value::Null);
            groups.push(Group {
                descriptor,
                multiplicity,
            });
        }
        let mut builder = GraphBuilder::new(groups);
        for (idx, line) in lines {
            let line_no = idx + 1;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected edge `i j`, got `{}`", line),
                });
            }
            let i: usize = toks[0].parse().map_err(|_| Error::Parse {
                line: line_no,
                message: "bad edge endpoint".into(),
            })?;
            let j: usize = toks[1].parse().map_err(|_| Error::Parse {
                line: line_no,
                message: "bad edge endpoint".into(),
            })?;
            if i == j || i >= k || j >= k {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("edge ({}, {}) out of range or a loop", i, j),
                });
            }
            builder.add_edge(i, j);
        }
        Ok(builder.build("loaded from cgraph text"))
    }
}

/// A vertex subset, as selected-copy counts per group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SubsetSelection {
    pub counts: Vec<usize>,
}

impl SubsetSelection {
    pub fn empty(num_groups: usize) -> Self {
        SubsetSelection {
            counts: vec![0; num_groups],
        }
    }

    pub fn from_groups(num_groups: usize, selected: &[usize]) -> Self {
        let mut counts = vec![0; num_groups];
        for &g in selected {
            counts[g] += 1;
        }
        SubsetSelection { counts }
    }

    pub fn size(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Number of labeled vertex subsets this count-vector stands for.
    pub fn labeled_count(&self, graph: &CommunityGraph) -> u128 {
        self.counts
            .iter()
            .zip(graph.groups())
            .map(|(&c, g)| binomial(g.multiplicity, c))
            .product()
    }

    fn validate(&self, graph: &CommunityGraph) -> Result<()> {
        if self.counts.len() != graph.num_groups() {
            return Err(Error::InvalidParameter(format!(
                "selection over {} groups, graph has {}",
                self.counts.len(),
                graph.num_groups()
            )));
        }
        for (g, (&c, group)) in self.counts.iter().zip(graph.groups()).enumerate() {
            if c > group.multiplicity {
                return Err(Error::InvalidParameter(format!(
                    "group {} selects {} of {} copies",
                    g, c, group.multiplicity
                )));
            }
        }
        Ok(())
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Exact tie-strength profile of a subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityProfile {
    /// min over members of |closed neighborhood in S| / |S|.
    pub alpha_star: Frac,
    /// max over non-members of |open neighborhood in S| / |S|; 0 when
    /// every vertex is selected.
    pub beta_star: Frac,
    pub size: usize,
}

/// Per-group count of selected neighbors (own group excluded: twins are
/// never adjacent).
fn neighbor_counts(graph: &CommunityGraph, s: &SubsetSelection) -> Vec<u64> {
    let n = graph.num_groups();
    let mut cnt = vec![0u64; n];
    match &graph.adjacency {
        Adjacency::Explicit(d) => {
            for (h, &c) in s.counts.iter().enumerate() {
                if c > 0 {
                    for &g in &d.lists[h] {
                        cnt[g as usize] += c as u64;
                    }
                }
            }
        }
        Adjacency::Oracle(_) => {
            let selected: Vec<(usize, u64)> = s
                .counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(h, &c)| (h, c as u64))
                .collect();
            for (g, slot) in cnt.iter_mut().enumerate() {
                for &(h, c) in &selected {
                    if graph.group_adjacent(g, h) {
                        *slot += c;
                    }
                }
            }
        }
    }
    cnt
}

/// Compute the exact profile of a nonempty subset.
pub fn profile(graph: &CommunityGraph, s: &SubsetSelection) -> Result<CommunityProfile> {
    s.validate(graph)?;
    let size = s.size();
    if size == 0 {
        return Err(Error::InvalidParameter(
            "profile of the empty subset is undefined".into(),
        ));
    }
    let cnt = neighbor_counts(graph, s);
    Ok(profile_from_counts(graph, s, &cnt, size))
}

fn profile_from_counts(
    graph: &CommunityGraph,
    s: &SubsetSelection,
    cnt: &[u64],
    size: usize,
) -> CommunityProfile {
    let mut alpha_star: Option<Frac> = None;
    let mut beta_star = Frac::new(0, 1);
    for (g, &c) in s.counts.iter().enumerate() {
        if c > 0 {
            let members = Frac::new(cnt[g] + 1, size as u64);
            if alpha_star.is_none_or(|a| members < a) {
                alpha_star = Some(members);
            }
        }
        if c < graph.groups()[g].multiplicity {
            let outside = Frac::new(cnt[g], size as u64);
            if outside > beta_star {
                beta_star = outside;
            }
        }
    }
    CommunityProfile {
        alpha_star: alpha_star.expect("nonempty subset has a member"),
        beta_star,
        size,
    }
}

fn validate_threshold(name: &str, v: Frac) -> Result<()> {
    if v > Frac::new(1, 1) {
        return Err(Error::InvalidParameter(format!(
            "{} must be at most 1, got {}",
            name, v
        )));
    }
    Ok(())
}

/// Does the profile pass thresholds (alpha, beta)?
///
/// Strong ties are non-strict (`alpha_star >= alpha`). Weak ties pass when
/// the worst outsider has no attachment at all, or strictly less than
/// `beta * |S|`; see the module docs for why the boundary is strict.
pub fn profile_passes(p: &CommunityProfile, alpha: Frac, beta: Frac) -> bool {
    p.alpha_star >= alpha && (p.beta_star == Frac::new(0, 1) || p.beta_star < beta)
}

pub fn is_community(
    graph: &CommunityGraph,
    s: &SubsetSelection,
    alpha: Frac,
    beta: Frac,
) -> Result<bool> {
    validate_threshold("alpha", alpha)?;
    validate_threshold("beta", beta)?;
    Ok(profile_passes(&profile(graph, s)?, alpha, beta))
}

/// Enumerate all (alpha, beta)-communities with at least `min_size`
/// vertices, as count-vectors.
pub fn enumerate_communities(
    graph: &CommunityGraph,
    alpha: Frac,
    beta: Frac,
    min_size: usize,
    budget: Budget,
) -> Result<Vec<SubsetSelection>> {
    validate_threshold("alpha", alpha)?;
    validate_threshold("beta", beta)?;
    let mut found = Vec::new();
    if alpha == Frac::new(1, 1) {
        enumerate_via_cliques(graph, beta, min_size, budget, &mut |s, _| {
            found.push(s.clone())
        })?;
    } else {
        enumerate_via_vectors(graph, alpha, beta, min_size, budget, &mut |s, _| {
            found.push(s.clone())
        })?;
    }
    Ok(found)
}

/// Number of labeled vertex subsets that are (alpha, beta)-communities.
pub fn count_communities(
    graph: &CommunityGraph,
    alpha: Frac,
    beta: Frac,
    min_size: usize,
    budget: Budget,
) -> Result<u128> {
    validate_threshold("alpha", alpha)?;
    validate_threshold("beta", beta)?;
    let mut total: u128 = 0;
    if alpha == Frac::new(1, 1) {
        enumerate_via_cliques(graph, beta, min_size, budget, &mut |_, w| total += w)?;
    } else {
        enumerate_via_vectors(graph, alpha, beta, min_size, budget, &mut |_, w| {
            total += w
        })?;
    }
    Ok(total)
}

/// Largest alpha_star - beta_star over all nonempty subsets, with a
/// witness (the lexicographically first count-vector achieving it).
pub fn max_gap(graph: &CommunityGraph, budget: Budget) -> Result<(SFrac, SubsetSelection)> {
    let mut best: Option<(SFrac, SubsetSelection)> = None;
    for_each_count_vector(graph, budget, &mut |s, cnt, size| {
        let p = profile_from_counts(graph, s, cnt, size);
        let gap = SFrac::new(*p.alpha_star.numer() as i64, *p.alpha_star.denom() as i64)
            - SFrac::new(*p.beta_star.numer() as i64, *p.beta_star.denom() as i64);
        if best.as_ref().is_none_or(|(b, _)| gap > *b) {
            best = Some((gap, s.clone()));
        }
    })?;
    best.ok_or_else(|| Error::InvalidParameter("graph has no vertices".into()))
}

/// Clique-path enumeration, valid exactly when alpha = 1.
///
/// alpha_star = 1 forces at most one copy per group and pairwise-adjacent
/// selected groups, and (because beta <= 1 and a fully-attached outsider
/// always fails the strict weak-tie bound) the selection must be a maximal
/// clique. So we enumerate maximal cliques over groups and apply the
/// weak-tie check at each leaf. The budget caps search nodes rather than
/// the count-vector space, which is what lets gadget-scale graphs run.
pub(crate) fn enumerate_via_cliques(
    graph: &CommunityGraph,
    beta: Frac,
    min_size: usize,
    budget: Budget,
    emit: &mut dyn FnMut(&SubsetSelection, u128),
) -> Result<()> {
    let owned;
    let graph = if graph.is_explicit() {
        graph
    } else {
        owned = graph.materialize(budget)?;
        &owned
    };
    let data = graph.explicit().expect("explicit by construction");
    let n = graph.num_groups();
    if n == 0 {
        return Ok(());
    }
    let words = n.div_ceil(64);
    let mut search = CliqueSearch {
        graph,
        data,
        beta,
        min_size,
        meter: Meter::new(budget),
        cnt: vec![0u64; n],
        dirty: Vec::new(),
        dirty_pos: vec![u32::MAX; n],
        selected: vec![false; n],
        r: Vec::new(),
        degrees: (0..n).map(|g| data.lists[g].len() as u32).collect(),
        emit,
    };
    let mut p = vec![u64::MAX; words];
    // Clear bits beyond n.
    if n % 64 != 0 {
        p[words - 1] = (1u64 << (n % 64)) - 1;
    }
    let x = vec![0u64; words];
    search.recurse(&p, &x)
}

struct CliqueSearch<'a> {
    graph: &'a CommunityGraph,
    data: &'a ExplicitData,
    beta: Frac,
    min_size: usize,
    meter: Meter,
    cnt: Vec<u64>,
    dirty: Vec<u32>,
    dirty_pos: Vec<u32>,
    selected: Vec<bool>,
    r: Vec<u32>,
    degrees: Vec<u32>,
    emit: &'a mut dyn FnMut(&SubsetSelection, u128),
}

fn iter_bits(bits: &[u64], mut f: impl FnMut(usize)) {
    for (w, &word) in bits.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            let b = word.trailing_zeros() as usize;
            f(w * 64 + b);
            word &= word - 1;
        }
    }
}

impl CliqueSearch<'_> {
    fn recurse(&mut self, p: &[u64], x: &[u64]) -> Result<()> {
        self.meter.charge(1)?;
        // Pivot: the highest-degree group in P or X. Branching only on
        // P \ N(pivot) walks straight through clique interiors.
        let mut pivot: Option<usize> = None;
        for bits in [p, x] {
            iter_bits(bits, |g| {
                if pivot.is_none_or(|b| self.degrees[g] > self.degrees[b]) {
                    pivot = Some(g);
                }
            });
        }
        let Some(pivot) = pivot else {
            self.leaf();
            return Ok(());
        };
        let prow = self.data.matrix.row(pivot);
        let mut branch = Vec::new();
        for (w, &word) in p.iter().enumerate() {
            let mut rem = word & !prow[w];
            while rem != 0 {
                let b = rem.trailing_zeros() as usize;
                branch.push(w * 64 + b);
                rem &= rem - 1;
            }
        }
        if branch.is_empty() {
            // Every remaining candidate extends past the pivot; nothing
            // here is maximal.
            return Ok(());
        }
        let mut p = p.to_vec();
        let mut x = x.to_vec();
        for v in branch {
            let vrow = self.data.matrix.row(v);
            let p2: Vec<u64> = p.iter().zip(vrow).map(|(a, b)| a & b).collect();
            let x2: Vec<u64> = x.iter().zip(vrow).map(|(a, b)| a & b).collect();
            self.select(v);
            self.recurse(&p2, &x2)?;
            self.unselect(v);
            p[v / 64] &= !(1 << (v % 64));
            x[v / 64] |= 1 << (v % 64);
        }
        Ok(())
    }

    fn select(&mut self, v: usize) {
        self.r.push(v as u32);
        self.selected[v] = true;
        for &h in &self.data.lists[v] {
            let h = h as usize;
            if self.cnt[h] == 0 {
                self.dirty_pos[h] = self.dirty.len() as u32;
                self.dirty.push(h as u32);
            }
            self.cnt[h] += 1;
        }
    }

    fn unselect(&mut self, v: usize) {
        self.r.pop();
        self.selected[v] = false;
        for &h in &self.data.lists[v] {
            let h = h as usize;
            self.cnt[h] -= 1;
            if self.cnt[h] == 0 {
                let pos = self.dirty_pos[h] as usize;
                let last = self.dirty.pop().unwrap();
                if last as usize != h {
                    self.dirty[pos] = last;
                    self.dirty_pos[last as usize] = pos as u32;
                }
                self.dirty_pos[h] = u32::MAX;
            }
        }
    }

    fn leaf(&mut self) {
        let size = self.r.len();
        if size < self.min_size.max(1) {
            return;
        }
        // Weak-tie check: every group with an unselected copy and positive
        // attachment must sit strictly below beta * |S|.
        let bn = *self.beta.numer() as u128;
        let bd = *self.beta.denom() as u128;
        for &h in &self.dirty {
            let h = h as usize;
            let att = self.cnt[h] as u128;
            debug_assert!(att > 0, "dirty list holds a zero-attachment group");
            let has_outsider =
                !self.selected[h] || self.graph.groups()[h].multiplicity > 1;
            if has_outsider && att * bd >= bn * size as u128 {
                return;
            }
        }
        let mut s = SubsetSelection::empty(self.graph.num_groups());
        let mut weight: u128 = 1;
        for &g in &self.r {
            s.counts[g as usize] = 1;
            weight = weight.saturating_mul(self.graph.groups()[g as usize].multiplicity as u128);
        }
        (self.emit)(&s, weight);
    }
}

/// Walk every count-vector, keeping per-group selected-neighbor counts
/// incrementally; `f` sees only nonempty leaves. The up-front budget check
/// is against the full space prod(m_g + 1).
fn for_each_count_vector(
    graph: &CommunityGraph,
    budget: Budget,
    f: &mut dyn FnMut(&SubsetSelection, &[u64], usize),
) -> Result<()> {
    let owned;
    let graph = if graph.is_explicit() {
        graph
    } else {
        owned = graph.materialize(budget)?;
        &owned
    };
    let n = graph.num_groups();
    let space = graph
        .groups()
        .iter()
        .fold(1u128, |acc, g| acc.saturating_mul(g.multiplicity as u128 + 1));
    budget.check(space)?;
    if n == 0 {
        return Ok(());
    }
    let data = graph.explicit().expect("explicit by construction");
    let mut s = SubsetSelection::empty(n);
    let mut cnt = vec![0u64; n];
    dfs_vectors(graph, data, 0, &mut s, &mut cnt, &mut 0, f);
    Ok(())
}

fn dfs_vectors(
    graph: &CommunityGraph,
    data: &ExplicitData,
    g: usize,
    s: &mut SubsetSelection,
    cnt: &mut Vec<u64>,
    size: &mut usize,
    f: &mut dyn FnMut(&SubsetSelection, &[u64], usize),
) {
    if g == graph.num_groups() {
        if *size > 0 {
            f(s, cnt, *size);
        }
        return;
    }
    let m = graph.groups()[g].multiplicity;
    for c in 0..=m {
        s.counts[g] = c;
        dfs_vectors(graph, data, g + 1, s, cnt, size, f);
        // Step the incremental state to count c + 1.
        if c < m {
            for &h in &data.lists[g] {
                cnt[h as usize] += 1;
            }
            *size += 1;
        }
    }
    for &h in &data.lists[g] {
        cnt[h as usize] -= m as u64;
    }
    *size -= m;
    s.counts[g] = 0;
}

/// Count-vector enumeration for general alpha.
pub(crate) fn enumerate_via_vectors(
    graph: &CommunityGraph,
    alpha: Frac,
    beta: Frac,
    min_size: usize,
    budget: Budget,
    emit: &mut dyn FnMut(&SubsetSelection, u128),
) -> Result<()> {
    for_each_count_vector(graph, budget, &mut |s, cnt, size| {
        if size < min_size.max(1) {
            return;
        }
        let p = profile_from_counts(graph, s, cnt, size);
        if profile_passes(&p, alpha, beta) {
            emit(s, s.labeled_count(graph));
        }
    })
}
