//! Label Cover instances, labeling valuation, the counting-preserving
//! reduction from 3SAT, and brute-force counting oracles.
//!
//! A Label Cover instance is a bipartite constraint system: vertex sets A
//! and B with alphabets `0..sigma_a` and `0..sigma_b`, and one constraint
//! per edge. The classic form is a projection `pi: Sigma_A -> Sigma_B`; the
//! 3SAT reduction needs the select-and-compare form instead (the clause
//! symbol's slot bit must match the variable symbol), so constraints are an
//! enum over both.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::Frac;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// A 3CNF formula: clauses of exactly three signed literals.
///
/// Literal `k > 0` means variable `k`; `-k` means its negation. Variables
/// are numbered from 1, DIMACS style.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf3 {
    num_vars: usize,
    clauses: Vec<[i32; 3]>,
}

impl Cnf3 {
    pub fn new(num_vars: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        for (ci, clause) in clauses.iter().enumerate() {
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > num_vars {
                    return Err(Error::InvalidParameter(format!(
                        "clause {} has literal {} outside 1..={}",
                        ci, lit, num_vars
                    )));
                }
            }
        }
        Ok(Cnf3 { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[i32; 3]] {
        &self.clauses
    }

    /// Evaluate under an assignment given as bits of `assignment`
    /// (variable v reads bit v-1).
    pub fn eval(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let v = lit.unsigned_abs() as usize - 1;
                let val = (assignment >> v) & 1 == 1;
                if lit > 0 {
                    val
                } else {
                    !val
                }
            })
        })
    }

    /// DIMACS CNF text; `parse_dimacs` reads it back.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            out.push_str(&format!(
                "{} {} {} 0\n",
                clause[0], clause[1], clause[2]
            ));
        }
        out
    }

    /// Parse DIMACS CNF text. Clauses shorter than 3 literals are padded by
    /// repeating a literal (semantics unchanged); longer clauses are
    /// rejected.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut num_vars: Option<usize> = None;
        let mut declared_clauses = 0usize;
        let mut clauses: Vec<[i32; 3]> = Vec::new();
        let mut current: Vec<i32> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                if num_vars.is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "duplicate problem line".into(),
                    });
                }
                let fields: Vec<&str> = rest.split_whitespace().collect();
                if fields.len() != 3 || fields[0] != "cnf" {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected `p cnf <vars> <clauses>`, got `{}`", line),
                    });
                }
                let nv = fields[1].parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad variable count `{}`", fields[1]),
                })?;
                declared_clauses = fields[2].parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad clause count `{}`", fields[2]),
                })?;
                num_vars = Some(nv);
                continue;
            }
            let nv = num_vars.ok_or_else(|| Error::Parse {
                line: line_no,
                message: "clause before problem line".into(),
            })?;
            for tok in line.split_whitespace() {
                let lit = tok.parse::<i32>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad literal `{}`", tok),
                })?;
                if lit == 0 {
                    let padded = match current.len() {
                        0 => {
                            return Err(Error::Parse {
                                line: line_no,
                                message: "empty clause".into(),
                            })
                        }
                        1 => [current[0], current[0], current[0]],
                        2 => [current[0], current[1], current[1]],
                        3 => [current[0], current[1], current[2]],
                        n => {
                            return Err(Error::Parse {
                                line: line_no,
                                message: format!("clause has {} literals, max 3", n),
                            })
                        }
                    };
                    clauses.push(padded);
                    current.clear();
                } else {
                    if lit.unsigned_abs() as usize > nv {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!("literal {} exceeds declared {} variables", lit, nv),
                        });
                    }
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            return Err(Error::Parse {
                line: text.lines().count(),
                message: "unterminated clause (missing 0)".into(),
            });
        }
        let nv = num_vars.ok_or(Error::Parse {
            line: 1,
            message: "missing problem line".into(),
        })?;
        if clauses.len() != declared_clauses {
            return Err(Error::Parse {
                line: text.lines().count(),
                message: format!(
                    "declared {} clauses, found {}",
                    declared_clauses,
                    clauses.len()
                ),
            });
        }
        Cnf3::new(nv, clauses)
    }
}

/// Per-edge constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeConstraint {
    /// Satisfied iff `map[phi_a] == phi_b`; `map` is total on `0..sigma_a`.
    Projection(Vec<u16>),
    /// Satisfied iff bit `slot` of the B-symbol's pattern, xored with
    /// `negated`, equals the A-symbol. B-symbol `s` encodes the literal
    /// pattern `s + 1` (the seven nonzero triples over {0,1}).
    SlotMatch { slot: u8, negated: bool },
}

impl EdgeConstraint {
    pub fn satisfied(&self, va: u16, vb: u16) -> bool {
        match self {
            EdgeConstraint::Projection(map) => map[va as usize] == vb,
            EdgeConstraint::SlotMatch { slot, negated } => {
                let bit = ((vb + 1) >> slot) & 1;
                (bit ^ (*negated as u16)) == va
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcEdge {
    pub a: usize,
    pub b: usize,
    pub constraint: EdgeConstraint,
}

/// Bipartite constraint system with dense integer alphabets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCoverInstance {
    pub n_a: usize,
    pub n_b: usize,
    pub sigma_a: u16,
    pub sigma_b: u16,
    pub edges: Vec<LcEdge>,
    /// `(d_a, d_b)` when every A-degree is d_a and every B-degree is d_b.
    pub regularity: Option<(usize, usize)>,
}

impl LabelCoverInstance {
    pub fn new(
        n_a: usize,
        n_b: usize,
        sigma_a: u16,
        sigma_b: u16,
        edges: Vec<LcEdge>,
    ) -> Result<Self> {
        let mut inst = LabelCoverInstance {
            n_a,
            n_b,
            sigma_a,
            sigma_b,
            edges,
            regularity: None,
        };
        inst.validate()?;
        inst.regularity = inst.compute_regularity();
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma_a == 0 || self.sigma_b == 0 {
            return Err(Error::InvalidParameter("empty alphabet".into()));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.a >= self.n_a || e.b >= self.n_b {
                return Err(Error::InvalidParameter(format!(
                    "edge {} endpoints ({},{}) out of range {}x{}",
                    i, e.a, e.b, self.n_a, self.n_b
                )));
            }
            match &e.constraint {
                EdgeConstraint::Projection(map) => {
                    if map.len() != self.sigma_a as usize {
                        return Err(Error::InvalidParameter(format!(
                            "edge {} projection has {} entries, alphabet is {}",
                            i,
                            map.len(),
                            self.sigma_a
                        )));
                    }
                    if let Some(&bad) = map.iter().find(|&&v| v >= self.sigma_b) {
                        return Err(Error::InvalidParameter(format!(
                            "edge {} projects to {} outside B-alphabet {}",
                            i, bad, self.sigma_b
                        )));
                    }
                }
                EdgeConstraint::SlotMatch { slot, .. } => {
                    if *slot > 2 || self.sigma_a != 2 || self.sigma_b != 7 {
                        return Err(Error::InvalidParameter(format!(
                            "edge {} slot-match needs alphabets 2/7 and slot < 3",
                            i
                        )));
                    }
                }
            }
        }
        if let Some((d_a, d_b)) = self.regularity {
            let (da, db) = (self.degrees_a(), self.degrees_b());
            if da.iter().any(|&d| d != d_a) || db.iter().any(|&d| d != d_b) {
                return Err(Error::InvalidParameter(
                    "bi-regularity claimed but degrees are not uniform".into(),
                ));
            }
        }
        Ok(())
    }

    fn degrees_a(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.n_a];
        for e in &self.edges {
            d[e.a] += 1;
        }
        d
    }

    fn degrees_b(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.n_b];
        for e in &self.edges {
            d[e.b] += 1;
        }
        d
    }

    fn compute_regularity(&self) -> Option<(usize, usize)> {
        if self.n_a == 0 || self.n_b == 0 {
            return None;
        }
        let da = self.degrees_a();
        let db = self.degrees_b();
        if da.iter().all(|&d| d == da[0]) && db.iter().all(|&d| d == db[0]) {
            Some((da[0], db[0]))
        } else {
            None
        }
    }

    /// Serialize to the text format:
    /// `labelcover nA nB sigmaA sigmaB m` then one line per edge,
    /// `a b pi(0) ... pi(sigmaA-1)`. Only projection constraints fit this
    /// format.
    pub fn to_text(&self) -> Result<String> {
        let mut out = String::new();
        writeln!(
            out,
            "labelcover {} {} {} {} {}",
            self.n_a,
            self.n_b,
            self.sigma_a,
            self.sigma_b,
            self.edges.len()
        )
        .unwrap();
        for e in &self.edges {
            match &e.constraint {
                EdgeConstraint::Projection(map) => {
                    write!(out, "{} {}", e.a, e.b).unwrap();
                    for &v in map {
                        write!(out, " {}", v).unwrap();
                    }
                    out.push('\n');
                }
                EdgeConstraint::SlotMatch { .. } => {
                    return Err(Error::Unserializable(
                        "slot-match constraints have no projection row; \
                         keep 3SAT-derived instances in memory"
                            .into(),
                    ))
                }
            }
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .ok_or(Error::Parse {
                line: 1,
                message: "empty file".into(),
            })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 6 || fields[0] != "labelcover" {
            return Err(Error::Parse {
                line: 1,
                message: "expected header `labelcover nA nB sigmaA sigmaB m`".into(),
            });
        }
        let parse = |s: &str, what: &str| -> Result<usize> {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: 1,
                message: format!("bad {} `{}`", what, s),
            })
        };
        let n_a = parse(fields[1], "nA")?;
        let n_b = parse(fields[2], "nB")?;
        let sigma_a = parse(fields[3], "sigmaA")? as u16;
        let sigma_b = parse(fields[4], "sigmaB")? as u16;
        let m = parse(fields[5], "edge count")?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (idx, line) = lines
                .by_ref()
                .find(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
                .ok_or_else(|| Error::Parse {
                    line: text.lines().count(),
                    message: format!("expected {} edge lines, file ended early", m),
                })?;
            let line_no = idx + 1;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 + sigma_a as usize {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "edge line needs `a b` plus {} projection values, got {} tokens",
                        sigma_a,
                        toks.len()
                    ),
                });
            }
            let a = toks[0].parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad endpoint `{}`", toks[0]),
            })?;
            let b = toks[1].parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad endpoint `{}`", toks[1]),
            })?;
            let mut map = Vec::with_capacity(sigma_a as usize);
            for t in &toks[2..] {
                map.push(t.parse::<u16>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad projection value `{}`", t),
                })?);
            }
            edges.push(LcEdge {
                a,
                b,
                constraint: EdgeConstraint::Projection(map),
            });
        }
        LabelCoverInstance::new(n_a, n_b, sigma_a, sigma_b, edges)
    }
}

/// One vertex's assignment status within a labeling.
///
/// `Invalid` marks a vertex whose decoded value fell outside its alphabet;
/// every constraint touching it counts as violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarAssignment {
    Unassigned,
    Valid(u16),
    Invalid,
}

impl VarAssignment {
    /// Classify a raw decoded value against an alphabet size.
    pub fn from_value(v: u64, sigma: u16) -> Self {
        if v < sigma as u64 {
            VarAssignment::Valid(v as u16)
        } else {
            VarAssignment::Invalid
        }
    }
}

/// A (possibly partial) labeling of both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling {
    pub phi_a: Vec<VarAssignment>,
    pub phi_b: Vec<VarAssignment>,
}

impl Labeling {
    pub fn empty(n_a: usize, n_b: usize) -> Self {
        Labeling {
            phi_a: vec![VarAssignment::Unassigned; n_a],
            phi_b: vec![VarAssignment::Unassigned; n_b],
        }
    }

    pub fn total(phi_a: Vec<u16>, phi_b: Vec<u16>) -> Self {
        Labeling {
            phi_a: phi_a.into_iter().map(VarAssignment::Valid).collect(),
            phi_b: phi_b.into_iter().map(VarAssignment::Valid).collect(),
        }
    }

    pub fn is_total(&self) -> bool {
        self.phi_a
            .iter()
            .chain(self.phi_b.iter())
            .all(|v| !matches!(v, VarAssignment::Unassigned))
    }

    /// Merge two partial labelings. Overlapping assignments must agree;
    /// the caller is expected to have checked geometric agreement first.
    pub fn merged(&self, other: &Labeling) -> Labeling {
        let pick = |x: &VarAssignment, y: &VarAssignment| match (x, y) {
            (VarAssignment::Unassigned, v) => *v,
            (v, VarAssignment::Unassigned) => *v,
            (v, w) => {
                debug_assert_eq!(v, w, "merging labelings that disagree");
                *v
            }
        };
        Labeling {
            phi_a: self
                .phi_a
                .iter()
                .zip(&other.phi_a)
                .map(|(x, y)| pick(x, y))
                .collect(),
            phi_b: self
                .phi_b
                .iter()
                .zip(&other.phi_b)
                .map(|(x, y)| pick(x, y))
                .collect(),
        }
    }
}

/// Edge status under a partial labeling.
fn edge_status(e: &LcEdge, lambda: &Labeling) -> EdgeStatus {
    let va = lambda.phi_a[e.a];
    let vb = lambda.phi_b[e.b];
    match (va, vb) {
        (VarAssignment::Unassigned, _) | (_, VarAssignment::Unassigned) => {
            EdgeStatus::Undetermined
        }
        (VarAssignment::Invalid, _) | (_, VarAssignment::Invalid) => EdgeStatus::Violated,
        (VarAssignment::Valid(a), VarAssignment::Valid(b)) => {
            if e.constraint.satisfied(a, b) {
                EdgeStatus::Satisfied
            } else {
                EdgeStatus::Violated
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EdgeStatus {
    Satisfied,
    Violated,
    Undetermined,
}

/// Exact fraction of satisfied edges under a total labeling.
pub fn lc_value(inst: &LabelCoverInstance, lambda: &Labeling) -> Result<Frac> {
    if let Some(i) = lambda
        .phi_a
        .iter()
        .chain(lambda.phi_b.iter())
        .position(|v| matches!(v, VarAssignment::Unassigned))
    {
        return Err(Error::PartialLabeling(i));
    }
    if inst.edges.is_empty() {
        return Err(Error::InvalidParameter(
            "value of an edgeless instance is undefined".into(),
        ));
    }
    let sat = inst
        .edges
        .iter()
        .filter(|e| edge_status(e, lambda) == EdgeStatus::Satisfied)
        .count();
    Ok(Frac::new(sat as u64, inst.edges.len() as u64))
}

/// `(satisfied, violated, undetermined)` counts under a partial labeling.
///
/// An edge is undetermined iff either endpoint is unassigned; an invalid
/// endpoint makes it violated.
pub fn lc_partial_violations(
    inst: &LabelCoverInstance,
    lambda: &Labeling,
) -> (usize, usize, usize) {
    let mut counts = (0usize, 0usize, 0usize);
    for e in &inst.edges {
        match edge_status(e, lambda) {
            EdgeStatus::Satisfied => counts.0 += 1,
            EdgeStatus::Violated => counts.1 += 1,
            EdgeStatus::Undetermined => counts.2 += 1,
        }
    }
    counts
}

/// Count violated edges of the merged labeling without materializing it.
pub fn union_violations(inst: &LabelCoverInstance, l1: &Labeling, l2: &Labeling) -> usize {
    let resolve = |x: VarAssignment, y: VarAssignment| match (x, y) {
        (VarAssignment::Unassigned, v) => v,
        (v, _) => v,
    };
    inst.edges
        .iter()
        .filter(|e| {
            let va = resolve(l1.phi_a[e.a], l2.phi_a[e.a]);
            let vb = resolve(l1.phi_b[e.b], l2.phi_b[e.b]);
            match (va, vb) {
                (VarAssignment::Unassigned, _) | (_, VarAssignment::Unassigned) => false,
                (VarAssignment::Invalid, _) | (_, VarAssignment::Invalid) => true,
                (VarAssignment::Valid(a), VarAssignment::Valid(b)) => {
                    !e.constraint.satisfied(a, b)
                }
            }
        })
        .count()
}

/// The counting-preserving reduction from 3SAT.
///
/// One A-vertex per variable (alphabet {0,1}), one B-vertex per clause
/// (alphabet: the seven nonzero literal patterns), one edge per
/// variable-clause incidence. Satisfying labelings are in one-to-one
/// correspondence with satisfying assignments: the clause symbol's bits are
/// forced slot by slot, and any reachable symbol has at least one true
/// literal.
pub fn reduce_3sat(f: &Cnf3) -> LabelCoverInstance {
    let mut edges = Vec::with_capacity(3 * f.clauses().len());
    for (ci, clause) in f.clauses().iter().enumerate() {
        for (slot, &lit) in clause.iter().enumerate() {
            edges.push(LcEdge {
                a: lit.unsigned_abs() as usize - 1,
                b: ci,
                constraint: EdgeConstraint::SlotMatch {
                    slot: slot as u8,
                    negated: lit < 0,
                },
            });
        }
    }
    LabelCoverInstance::new(f.num_vars(), f.clauses().len(), 2, 7, edges)
        .expect("3SAT reduction always yields a valid instance")
}

fn search_space(inst: &LabelCoverInstance) -> u128 {
    let pow = |base: u128, exp: usize| -> u128 {
        let mut acc: u128 = 1;
        for _ in 0..exp {
            acc = acc.saturating_mul(base);
        }
        acc
    };
    pow(inst.sigma_a as u128, inst.n_a).saturating_mul(pow(inst.sigma_b as u128, inst.n_b))
}

/// Exact number of totally-satisfying labelings, by backtracking over A
/// and counting consistent B-symbols per vertex.
pub fn count_labelings_bruteforce(inst: &LabelCoverInstance, budget: Budget) -> Result<u128> {
    budget.check(search_space(inst))?;
    let by_b = edges_by_b(inst);
    let mut count: u128 = 0;
    for_each_a_assignment(inst, &mut |phi_a| {
        let mut product: u128 = 1;
        for b_edges in &by_b {
            let choices = (0..inst.sigma_b)
                .filter(|&vb| {
                    b_edges
                        .iter()
                        .all(|e| e.constraint.satisfied(phi_a[e.a], vb))
                })
                .count();
            product *= choices as u128;
            if product == 0 {
                break;
            }
        }
        count += product;
    });
    Ok(count)
}

/// All totally-satisfying labelings, materialized.
pub fn enumerate_satisfying(inst: &LabelCoverInstance, budget: Budget) -> Result<Vec<Labeling>> {
    budget.check(search_space(inst))?;
    let by_b = edges_by_b(inst);
    let mut out = Vec::new();
    for_each_a_assignment(inst, &mut |phi_a| {
        let choices: Vec<Vec<u16>> = by_b
            .iter()
            .map(|b_edges| {
                (0..inst.sigma_b)
                    .filter(|&vb| {
                        b_edges
                            .iter()
                            .all(|e| e.constraint.satisfied(phi_a[e.a], vb))
                    })
                    .collect()
            })
            .collect();
        if choices.iter().any(|c| c.is_empty()) {
            return;
        }
        let mut phi_b = vec![0u16; inst.n_b];
        cartesian(&choices, 0, &mut phi_b, &mut |phi_b| {
            out.push(Labeling::total(phi_a.to_vec(), phi_b.to_vec()));
        });
    });
    Ok(out)
}

fn edges_by_b(inst: &LabelCoverInstance) -> Vec<Vec<&LcEdge>> {
    let mut by_b: Vec<Vec<&LcEdge>> = vec![Vec::new(); inst.n_b];
    for e in &inst.edges {
        by_b[e.b].push(e);
    }
    by_b
}

fn for_each_a_assignment(inst: &LabelCoverInstance, f: &mut impl FnMut(&[u16])) {
    let mut phi_a = vec![0u16; inst.n_a];
    loop {
        f(&phi_a);
        let mut k = 0;
        loop {
            if k == inst.n_a {
                return;
            }
            phi_a[k] += 1;
            if phi_a[k] < inst.sigma_a {
                break;
            }
            phi_a[k] = 0;
            k += 1;
        }
    }
}

fn cartesian(choices: &[Vec<u16>], i: usize, buf: &mut Vec<u16>, f: &mut impl FnMut(&[u16])) {
    if i == choices.len() {
        f(buf);
        return;
    }
    for &v in &choices[i] {
        buf[i] = v;
        cartesian(choices, i + 1, buf, f);
    }
}
