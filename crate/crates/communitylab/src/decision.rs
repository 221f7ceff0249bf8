//! The decision gadget: Label Cover instance -> community graph built
//! from balanced field subsets, for gap-style community detection
//! questions.
//!
//! A proper vertex is a balanced subset S of GF(p) (|S| = t, with fixed
//! intersection quotas against the row set F_A and column set F_B)
//! together with 2t line polynomials of degree below |F|: one per row
//! {s} x GF(p) and one per column GF(p) x {s}, mutually consistent on
//! S x S. Variables embed at grid points of F x F in contiguous blocks:
//! the k-th A-variable of block i at (F_A[i], F[k]), the k-th B-variable
//! of block j at (F[k], F_B[j]). A point hosting both an A- and a
//! B-variable carries the pair through the mixed radix encoding
//! value = sigma_A * |Sigma_B| + sigma_B.
//!
//! Two proper vertices join iff their assignments agree on the entire
//! domain intersection - shared rows, shared columns, and both cross
//! grids S x T and T x S - and the union of their decoded labelings
//! violates no Label Cover constraint. Auxiliary twins come in three
//! kinds: u_H adjacent iff S is contained in H, u_{H_A} iff the F_A part
//! of S is contained in H_A, u_{H_B} likewise; each aux set is a twin
//! group of multiplicity min(|V|^2, cap).
//!
//! Explicit mode materializes everything; oracle mode materializes only
//! the group descriptors (linear in the vertex count) and answers edge
//! queries by rebuilding the two endpoint vertices on demand, avoiding
//! the quadratic cost.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::field::{Axis, BiPolyTable, PrimeField, UniPoly};
use crate::graph::{binomial, CommunityGraph, GraphBuilder, Group, SubsetSelection};
use crate::labelcover::{
    lc_partial_violations, lc_value, union_violations, LabelCoverInstance, Labeling,
    VarAssignment,
};
use crate::{Frac, SFrac};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionParams {
    pub field: PrimeField,
    /// The grid F.
    pub grid: Vec<u64>,
    /// Row blocks F_A and column blocks F_B, disjoint subsets of F.
    pub f_a: Vec<u64>,
    pub f_b: Vec<u64>,
    /// Balanced subset size.
    pub t: usize,
    /// Required |S with F_A| and |S with F_B|.
    pub quota_a: usize,
    pub quota_b: usize,
    /// The community threshold knob this gadget is probed at; recorded,
    /// validated, never floated.
    pub eps: Frac,
    /// Aux set sizes per kind; `None` omits the kind entirely.
    pub aux_h: Option<usize>,
    pub aux_h_a: Option<usize>,
    pub aux_h_b: Option<usize>,
    /// Aux multiplicity is min(proper_count^2, this cap).
    pub aux_cap: usize,
}

impl DecisionParams {
    /// Per-block variable counts, rows then columns.
    fn rho_a(&self, inst: &LabelCoverInstance) -> usize {
        if self.f_a.is_empty() {
            0
        } else {
            inst.n_a / self.f_a.len()
        }
    }

    fn rho_b(&self, inst: &LabelCoverInstance) -> usize {
        if self.f_b.is_empty() {
            0
        } else {
            inst.n_b / self.f_b.len()
        }
    }

    pub fn validate_for(&self, inst: &LabelCoverInstance) -> Result<()> {
        let p = self.field.order();
        let f = self.grid.len();
        if f == 0 {
            return Err(Error::InvalidParameter("grid must be nonempty".into()));
        }
        for (i, &a) in self.grid.iter().enumerate() {
            if a >= p {
                return Err(Error::InvalidParameter(format!(
                    "grid element {} outside GF({})",
                    a, p
                )));
            }
            if self.grid[..i].contains(&a) {
                return Err(Error::InvalidParameter(format!(
                    "grid element {} repeated",
                    a
                )));
            }
        }
        for &a in self.f_a.iter().chain(&self.f_b) {
            if !self.grid.contains(&a) {
                return Err(Error::InvalidParameter(format!(
                    "block element {} is not a grid element",
                    a
                )));
            }
        }
        if self.f_a.iter().any(|a| self.f_b.contains(a)) {
            return Err(Error::InvalidParameter(
                "row and column blocks must be disjoint".into(),
            ));
        }
        if self.t == 0 || self.t as u64 > p {
            return Err(Error::InvalidParameter(format!(
                "subset size t = {} must be in 1..={}",
                self.t, p
            )));
        }
        if self.quota_a > self.f_a.len()
            || self.quota_b > self.f_b.len()
            || self.quota_a + self.quota_b > self.t
        {
            return Err(Error::InvalidParameter(format!(
                "quotas ({}, {}) do not fit t = {} with |F_A| = {}, |F_B| = {}",
                self.quota_a,
                self.quota_b,
                self.t,
                self.f_a.len(),
                self.f_b.len()
            )));
        }
        let rest = p as usize - self.f_a.len() - self.f_b.len();
        if self.t - self.quota_a - self.quota_b > rest {
            return Err(Error::InvalidParameter(
                "no balanced subsets: free elements exceed the field remainder".into(),
            ));
        }
        let pair_cap = inst.sigma_a as u64 * inst.sigma_b as u64;
        if pair_cap > p {
            return Err(Error::InvalidParameter(format!(
                "a field value must encode a label pair: need |Sigma_A| * |Sigma_B| = {} <= {}",
                pair_cap, p
            )));
        }
        if inst.n_a > 0 {
            if self.f_a.is_empty() || !inst.n_a.is_multiple_of(self.f_a.len()) {
                return Err(Error::InvalidParameter(format!(
                    "{} A-variables do not split evenly into {} row blocks",
                    inst.n_a,
                    self.f_a.len()
                )));
            }
            if self.rho_a(inst) > f {
                return Err(Error::InvalidParameter(format!(
                    "row blocks of {} variables exceed the grid width {}",
                    self.rho_a(inst),
                    f
                )));
            }
        }
        if inst.n_b > 0 {
            if self.f_b.is_empty() || !inst.n_b.is_multiple_of(self.f_b.len()) {
                return Err(Error::InvalidParameter(format!(
                    "{} B-variables do not split evenly into {} column blocks",
                    inst.n_b,
                    self.f_b.len()
                )));
            }
            if self.rho_b(inst) > f {
                return Err(Error::InvalidParameter(format!(
                    "column blocks of {} variables exceed the grid width {}",
                    self.rho_b(inst),
                    f
                )));
            }
        }
        if let Some(h) = self.aux_h {
            if h as u64 > p {
                return Err(Error::InvalidParameter(format!(
                    "aux size |H| = {} exceeds the field",
                    h
                )));
            }
        }
        if let Some(h) = self.aux_h_a {
            if h > self.f_a.len() {
                return Err(Error::InvalidParameter(format!(
                    "aux size |H_A| = {} exceeds |F_A| = {}",
                    h,
                    self.f_a.len()
                )));
            }
        }
        if let Some(h) = self.aux_h_b {
            if h > self.f_b.len() {
                return Err(Error::InvalidParameter(format!(
                    "aux size |H_B| = {} exceeds |F_B| = {}",
                    h,
                    self.f_b.len()
                )));
            }
        }
        if self.aux_cap == 0 {
            return Err(Error::InvalidParameter("aux cap must be >= 1".into()));
        }
        if self.eps > Frac::new(1, 1) || self.eps == Frac::new(0, 1) {
            return Err(Error::InvalidParameter(format!(
                "eps must be in (0, 1], got {}",
                self.eps
            )));
        }
        Ok(())
    }

    /// Grid point of A-variable `a`: row F_A[block], column F[offset].
    pub fn a_point(&self, inst: &LabelCoverInstance, a: usize) -> (u64, u64) {
        let rho = self.rho_a(inst);
        (self.f_a[a / rho], self.grid[a % rho])
    }

    /// Grid point of B-variable `b`: row F[offset], column F_B[block].
    pub fn b_point(&self, inst: &LabelCoverInstance, b: usize) -> (u64, u64) {
        let rho = self.rho_b(inst);
        (self.grid[b % rho], self.f_b[b / rho])
    }
}

/// The A-side and B-side variables a grid point hosts, each with the
/// label the point's value decodes to for it.
pub type DecodedPoint = (
    Option<(usize, VarAssignment)>,
    Option<(usize, VarAssignment)>,
);

/// Which variables a grid point hosts, with the labels a value decodes
/// to. Out-of-range values mark every hosted variable invalid.
pub fn decode_point(
    inst: &LabelCoverInstance,
    params: &DecisionParams,
    value: u64,
    point: (u64, u64),
) -> DecodedPoint {
    let (x, y) = point;
    let cap = inst.sigma_a as u64 * inst.sigma_b as u64;
    let a_var = params.f_a.iter().position(|&r| r == x).and_then(|bi| {
        let rho = params.rho_a(inst);
        params
            .grid
            .iter()
            .position(|&c| c == y)
            .filter(|&k| k < rho)
            .map(|k| bi * rho + k)
    });
    let b_var = params.f_b.iter().position(|&c| c == y).and_then(|bj| {
        let rho = params.rho_b(inst);
        params
            .grid
            .iter()
            .position(|&r| r == x)
            .filter(|&k| k < rho)
            .map(|k| bj * rho + k)
    });
    let decode = |side_a: bool| {
        if value >= cap {
            VarAssignment::Invalid
        } else if side_a {
            VarAssignment::Valid((value / inst.sigma_b as u64) as u16)
        } else {
            VarAssignment::Valid((value % inst.sigma_b as u64) as u16)
        }
    };
    (
        a_var.map(|a| (a, decode(true))),
        b_var.map(|b| (b, decode(false))),
    )
}

/// A proper vertex: balanced subset plus its 2t line polynomials.
#[derive(Debug, Clone)]
pub struct DecisionVertex {
    s: Vec<u64>,
    rows: Vec<UniPoly>,
    cols: Vec<UniPoly>,
    row_vals: Vec<Vec<u64>>,
    col_vals: Vec<Vec<u64>>,
    labeling: Labeling,
    dirty: bool,
}

impl DecisionVertex {
    /// Validates the balance quotas, the degree bounds, and the S x S
    /// mutual-consistency invariant; inconsistent families are rejected
    /// here, never materialized.
    pub fn new(
        inst: &LabelCoverInstance,
        params: &DecisionParams,
        s: Vec<u64>,
        rows: Vec<UniPoly>,
        cols: Vec<UniPoly>,
    ) -> Result<Self> {
        let t = params.t;
        if s.len() != t || rows.len() != t || cols.len() != t {
            return Err(Error::InvalidParameter(format!(
                "vertex needs {} subset elements and {} + {} polynomials",
                t, t, t
            )));
        }
        if s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&x| x >= params.field.order()) {
            return Err(Error::InvalidParameter(
                "subset must be sorted, distinct, and inside the field".into(),
            ));
        }
        let in_a = s.iter().filter(|x| params.f_a.contains(x)).count();
        let in_b = s.iter().filter(|x| params.f_b.contains(x)).count();
        if in_a != params.quota_a || in_b != params.quota_b {
            return Err(Error::InvalidParameter(format!(
                "subset meets blocks in ({}, {}) elements, quotas are ({}, {})",
                in_a, in_b, params.quota_a, params.quota_b
            )));
        }
        let bound = params.grid.len();
        for q in rows.iter().chain(&cols) {
            if q.degree().is_some_and(|d| d >= bound) {
                return Err(Error::InvalidParameter(format!(
                    "line polynomial degree {} reaches the grid size {}",
                    q.degree().unwrap(),
                    bound
                )));
            }
        }
        for (i, &si) in s.iter().enumerate() {
            for (j, &sj) in s.iter().enumerate() {
                if rows[i].eval(sj) != cols[j].eval(si) {
                    return Err(Error::InvalidParameter(format!(
                        "row at {} and column at {} disagree on their crossing",
                        si, sj
                    )));
                }
            }
        }
        let p = params.field.order();
        let row_vals: Vec<Vec<u64>> = rows.iter().map(|q| (0..p).map(|y| q.eval(y)).collect()).collect();
        let col_vals: Vec<Vec<u64>> = cols.iter().map(|q| (0..p).map(|x| q.eval(x)).collect()).collect();
        let labeling = induced_labeling(inst, params, &s, &row_vals, &col_vals);
        let dirty = lc_partial_violations(inst, &labeling).1 > 0;
        Ok(DecisionVertex {
            s,
            rows,
            cols,
            row_vals,
            col_vals,
            labeling,
            dirty,
        })
    }

    pub fn subset(&self) -> &[u64] {
        &self.s
    }

    pub fn rows(&self) -> &[UniPoly] {
        &self.rows
    }

    pub fn cols(&self) -> &[UniPoly] {
        &self.cols
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }
}

/// Decode every variable hosted on the subset's lines.
fn induced_labeling(
    inst: &LabelCoverInstance,
    params: &DecisionParams,
    s: &[u64],
    row_vals: &[Vec<u64>],
    col_vals: &[Vec<u64>],
) -> Labeling {
    let mut lab = Labeling::empty(inst.n_a, inst.n_b);
    let cap = inst.sigma_a as u64 * inst.sigma_b as u64;
    let value_at = |x: u64, y: u64| -> Option<u64> {
        if let Some(i) = s.iter().position(|&e| e == x) {
            return Some(row_vals[i][y as usize]);
        }
        s.iter()
            .position(|&e| e == y)
            .map(|j| col_vals[j][x as usize])
    };
    for a in 0..inst.n_a {
        let (x, y) = params.a_point(inst, a);
        if let Some(v) = value_at(x, y) {
            lab.phi_a[a] = if v < cap {
                VarAssignment::Valid((v / inst.sigma_b as u64) as u16)
            } else {
                VarAssignment::Invalid
            };
        }
    }
    for b in 0..inst.n_b {
        let (x, y) = params.b_point(inst, b);
        if let Some(v) = value_at(x, y) {
            lab.phi_b[b] = if v < cap {
                VarAssignment::Valid((v % inst.sigma_b as u64) as u16)
            } else {
                VarAssignment::Invalid
            };
        }
    }
    lab
}

/// The proper-proper edge predicate: agreement on shared lines and both
/// cross grids, plus a violation-free union labeling. Vertices hosting a
/// violated constraint on their own lines never gain proper edges.
pub fn proper_edge(inst: &LabelCoverInstance, u: &DecisionVertex, v: &DecisionVertex) -> bool {
    if u.dirty || v.dirty {
        return false;
    }
    // Cross grids S x T and T x S; shared elements are covered by the
    // full-line checks below, and mismatches here are the cheap common
    // exit.
    for (i, &si) in u.s.iter().enumerate() {
        for (j, &tj) in v.s.iter().enumerate() {
            if u.row_vals[i][tj as usize] != v.col_vals[j][si as usize]
                || u.col_vals[i][tj as usize] != v.row_vals[j][si as usize]
            {
                return false;
            }
        }
    }
    // Shared subset elements carry whole shared lines.
    let mut i = 0;
    let mut j = 0;
    while i < u.s.len() && j < v.s.len() {
        match u.s[i].cmp(&v.s[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if u.rows[i] != v.rows[j] || u.cols[i] != v.cols[j] {
                    return false;
                }
                i += 1;
                j += 1;
            }
        }
    }
    union_violations(inst, &u.labeling, &v.labeling) == 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuxKind {
    H,
    HA,
    HB,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxSpec {
    pub kind: AuxKind,
    pub set: Vec<u64>,
}

impl AuxSpec {
    fn adjacent_to(&self, s: &[u64], params: &DecisionParams) -> bool {
        match self.kind {
            AuxKind::H => s.iter().all(|x| self.set.contains(x)),
            AuxKind::HA => s
                .iter()
                .filter(|x| params.f_a.contains(x))
                .all(|x| self.set.contains(x)),
            AuxKind::HB => s
                .iter()
                .filter(|x| params.f_b.contains(x))
                .all(|x| self.set.contains(x)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BuildMode {
    Explicit,
    Oracle,
}

/// Shared vertex/aux indexing, cheap enough for the oracle closure.
struct Layout {
    params: DecisionParams,
    instance: LabelCoverInstance,
    balanced: Vec<Vec<u64>>,
    families_per_s: u128,
    n_proper: usize,
    aux_specs: Vec<AuxSpec>,
}

impl Layout {
    /// Rebuild the proper vertex with this index from scratch.
    fn vertex(&self, id: usize) -> Result<DecisionVertex> {
        if id >= self.n_proper {
            return Err(Error::InvalidParameter(format!(
                "vertex id {} out of range {}",
                id, self.n_proper
            )));
        }
        let s_idx = (id as u128 / self.families_per_s) as usize;
        let fam = id as u128 % self.families_per_s;
        self.vertex_of(s_idx, fam)
    }

    fn vertex_of(&self, s_idx: usize, fam: u128) -> Result<DecisionVertex> {
        let params = &self.params;
        let field = params.field;
        let p = field.order();
        let f = params.grid.len();
        let t = params.t;
        let s = &self.balanced[s_idx];
        let (rows, cols) = if t >= f {
            // Families are grid tables: decode base-p digits into F x F
            // values, extend, and restrict.
            let mut vals = vec![0u64; f * f];
            let mut rest = fam;
            for v in vals.iter_mut() {
                *v = (rest % p as u128) as u64;
                rest /= p as u128;
            }
            let table = BiPolyTable::low_degree_extend(field, &params.grid, |i, j| vals[i * f + j])?;
            let rows = s.iter().map(|&e| table.restrict_line(Axis::Row, e)).collect();
            let cols = s.iter().map(|&e| table.restrict_line(Axis::Col, e)).collect();
            (rows, cols)
        } else {
            // Rows are free; each column is the interpolation through its
            // prescribed S-values plus a free multiple of the vanishing
            // polynomial of S.
            let row_space = (p as u128).pow(f as u32);
            let res_space = (p as u128).pow((f - t) as u32);
            let mut rest = fam;
            let mut rows = Vec::with_capacity(t);
            for _ in 0..t {
                let mut idx = rest % row_space;
                rest /= row_space;
                let mut coeffs = vec![0u64; f];
                for c in coeffs.iter_mut() {
                    *c = (idx % p as u128) as u64;
                    idx /= p as u128;
                }
                rows.push(UniPoly::new(field, coeffs));
            }
            let vanish = vanishing_poly(field, s);
            let mut cols = Vec::with_capacity(t);
            for (j, &sj) in s.iter().enumerate() {
                let mut idx = rest % res_space;
                rest /= res_space;
                let mut rcoeffs = vec![0u64; f - t];
                for c in rcoeffs.iter_mut() {
                    *c = (idx % p as u128) as u64;
                    idx /= p as u128;
                }
                let residual = UniPoly::new(field, rcoeffs);
                let pts: Vec<(u64, u64)> = s
                    .iter()
                    .enumerate()
                    .map(|(i, &si)| (si, rows[i].eval(sj)))
                    .collect();
                let particular = UniPoly::interpolate(field, &pts)?;
                cols.push(poly_add(
                    field,
                    &particular,
                    &poly_mul(field, &vanish, &residual),
                ));
                let _ = j;
            }
            (rows, cols)
        };
        DecisionVertex::new(&self.instance, params, s.clone(), rows, cols)
    }

    /// Inverse of `vertex_of`: the family index of a vertex's polynomials.
    fn family_index(&self, v: &DecisionVertex) -> Result<u128> {
        let params = &self.params;
        let field = params.field;
        let p = field.order() as u128;
        let f = params.grid.len();
        let t = params.t;
        if t >= f {
            // With t >= |F| the family is a global low-degree table;
            // read its grid values back through the vertex's lines.
            let _ = field;
            let mut fam: u128 = 0;
            for k in (0..f * f).rev() {
                let (gi, gj) = (k / f, k % f);
                let x = params.grid[gi];
                let y = params.grid[gj];
                let value = self.value_of_vertex(v, x, y)?;
                fam = fam * p + value as u128;
            }
            Ok(fam)
        } else {
            let row_space = p.pow(f as u32);
            let res_space = p.pow((f - t) as u32);
            let vanish = vanishing_poly(field, &v.s);
            let mut fam: u128 = 0;
            for (j, &sj) in v.s.iter().enumerate().rev() {
                let pts: Vec<(u64, u64)> = v
                    .s
                    .iter()
                    .enumerate()
                    .map(|(i, &si)| (si, v.rows[i].eval(sj)))
                    .collect();
                let particular = UniPoly::interpolate(field, &pts)?;
                let diff = poly_sub(field, &v.cols[j], &particular);
                let residual = div_exact(field, &diff, &vanish).ok_or_else(|| {
                    Error::InvalidParameter(
                        "column polynomial is not consistent with its subset values".into(),
                    )
                })?;
                let mut idx: u128 = 0;
                for &c in residual.coeffs_padded(f - t).iter().rev() {
                    idx = idx * p + c as u128;
                }
                fam = fam * res_space + idx;
            }
            for q in v.rows.iter().rev() {
                let mut idx: u128 = 0;
                for &c in q.coeffs_padded(f).iter().rev() {
                    idx = idx * p + c as u128;
                }
                fam = fam * row_space + idx;
            }
            Ok(fam)
        }
    }

    /// The vertex's value at a point covered by its lines.
    fn value_of_vertex(&self, v: &DecisionVertex, x: u64, y: u64) -> Result<u64> {
        if let Some(i) = v.s.iter().position(|&e| e == x) {
            return Ok(v.row_vals[i][y as usize]);
        }
        if let Some(j) = v.s.iter().position(|&e| e == y) {
            return Ok(v.col_vals[j][x as usize]);
        }
        // Off-line grid values come from any |F| rows by interpolation:
        // the column through x at height y is pinned by the rows.
        let f = self.params.grid.len();
        if v.s.len() >= f {
            let pts: Vec<(u64, u64)> = v
                .s
                .iter()
                .take(f)
                .enumerate()
                .map(|(i, &si)| (si, v.row_vals[i][y as usize]))
                .collect();
            return Ok(UniPoly::interpolate(self.params.field, &pts)?.eval(x));
        }
        Err(Error::InvalidParameter(format!(
            "point ({}, {}) is not determined by the vertex's lines",
            x, y
        )))
    }

    fn group_id_of_aux(&self, aux_idx: usize) -> usize {
        self.n_proper + aux_idx
    }

    fn edge(&self, i: usize, j: usize, vertex: &dyn Fn(usize) -> Result<DecisionVertex>) -> bool {
        if i == j {
            return false;
        }
        let prop = |k: usize| k < self.n_proper;
        match (prop(i), prop(j)) {
            (true, true) => {
                let u = vertex(i).expect("in-range vertex id");
                let v = vertex(j).expect("in-range vertex id");
                proper_edge(&self.instance, &u, &v)
            }
            (true, false) => {
                let spec = &self.aux_specs[j - self.n_proper];
                let s_idx = (i as u128 / self.families_per_s) as usize;
                spec.adjacent_to(&self.balanced[s_idx], &self.params)
            }
            (false, true) => self.edge(j, i, vertex),
            (false, false) => false,
        }
    }
}

/// The built decision gadget.
pub struct DecisionGadget {
    layout: Arc<Layout>,
    /// Materialized vertices (explicit mode only).
    vertices: Option<Arc<Vec<DecisionVertex>>>,
    m_aux: usize,
    graph: CommunityGraph,
}

impl std::fmt::Debug for DecisionGadget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "DecisionGadget({} balanced subsets x {} families, {} aux groups, m_aux {})",
            self.layout.balanced.len(),
            self.layout.families_per_s,
            self.layout.aux_specs.len(),
            self.m_aux
        )
    }
}

/// Build just the graph; see [`DecisionGadget::build`] for the layout.
pub fn build_decision_graph(
    inst: &LabelCoverInstance,
    params: DecisionParams,
    mode: BuildMode,
    budget: Budget,
) -> Result<CommunityGraph> {
    Ok(DecisionGadget::build(inst, params, mode, budget)?.into_graph())
}

impl DecisionGadget {
    pub fn build(
        inst: &LabelCoverInstance,
        params: DecisionParams,
        mode: BuildMode,
        budget: Budget,
    ) -> Result<Self> {
        params.validate_for(inst)?;
        let field = params.field;
        let p = field.order();
        let f = params.grid.len();
        let t = params.t;

        let families_per_s: u128 = if t >= f {
            (p as u128).saturating_pow((f * f) as u32)
        } else {
            (p as u128).saturating_pow((2 * t * f - t * t) as u32)
        };
        let rest: Vec<u64> = field
            .elements()
            .filter(|e| !params.f_a.contains(e) && !params.f_b.contains(e))
            .collect();
        let n_balanced = binomial(params.f_a.len(), params.quota_a)
            * binomial(params.f_b.len(), params.quota_b)
            * binomial(rest.len(), t - params.quota_a - params.quota_b);
        let n_proper_big = n_balanced.saturating_mul(families_per_s);
        let mut n_aux_groups: u128 = 0;
        if let Some(h) = params.aux_h {
            n_aux_groups += binomial(p as usize, h);
        }
        if let Some(h) = params.aux_h_a {
            n_aux_groups += binomial(params.f_a.len(), h);
        }
        if let Some(h) = params.aux_h_b {
            n_aux_groups += binomial(params.f_b.len(), h);
        }
        let total_groups = n_proper_big.saturating_add(n_aux_groups);
        match mode {
            BuildMode::Explicit => {
                budget.check(total_groups.saturating_mul(total_groups))?;
            }
            BuildMode::Oracle => {
                // Descriptors are materialized; edges are not.
                budget.check(total_groups)?;
            }
        }
        let n_proper = n_proper_big as usize;

        let mut balanced = Vec::new();
        for ca in combinations(&params.f_a, params.quota_a) {
            for cb in combinations(&params.f_b, params.quota_b) {
                for cr in combinations(&rest, t - params.quota_a - params.quota_b) {
                    let mut s: Vec<u64> =
                        ca.iter().chain(&cb).chain(&cr).copied().collect();
                    s.sort_unstable();
                    balanced.push(s);
                }
            }
        }
        balanced.sort();
        debug_assert_eq!(balanced.len() as u128, n_balanced);

        let mut aux_specs = Vec::new();
        if let Some(h) = params.aux_h {
            let all: Vec<u64> = field.elements().collect();
            for set in combinations(&all, h) {
                aux_specs.push(AuxSpec {
                    kind: AuxKind::H,
                    set,
                });
            }
        }
        if let Some(h) = params.aux_h_a {
            for set in combinations(&params.f_a, h) {
                aux_specs.push(AuxSpec {
                    kind: AuxKind::HA,
                    set,
                });
            }
        }
        if let Some(h) = params.aux_h_b {
            for set in combinations(&params.f_b, h) {
                aux_specs.push(AuxSpec {
                    kind: AuxKind::HB,
                    set,
                });
            }
        }

        let m_aux = n_proper_big
            .saturating_mul(n_proper_big)
            .min(params.aux_cap as u128) as usize;

        let layout = Arc::new(Layout {
            params,
            instance: inst.clone(),
            balanced,
            families_per_s,
            n_proper,
            aux_specs,
        });

        // Group descriptors, shared by both modes.
        let mut groups = Vec::with_capacity(n_proper + layout.aux_specs.len());
        let mut vertices = Vec::new();
        for id in 0..n_proper {
            let v = layout.vertex(id)?;
            groups.push(Group::new(
                serde_json::json!({
                    "kind": "proper",
                    "S": v.s,
                    "rows": v.rows.iter().map(|q| q.coeffs().to_vec()).collect::<Vec<_>>(),
                    "cols": v.cols.iter().map(|q| q.coeffs().to_vec()).collect::<Vec<_>>(),
                }),
                1,
            ));
            if matches!(mode, BuildMode::Explicit) {
                vertices.push(v);
            }
        }
        for spec in &layout.aux_specs {
            let kind = match spec.kind {
                AuxKind::H => "aux-H",
                AuxKind::HA => "aux-HA",
                AuxKind::HB => "aux-HB",
            };
            groups.push(Group::new(
                serde_json::json!({ "kind": kind, "set": spec.set }),
                m_aux,
            ));
        }
        let metadata = format!(
            "decision gadget: GF({}), grid {}, t {}, quotas ({}, {}), {} balanced subsets x {} families, m_aux {}, {:?} mode",
            p,
            f,
            t,
            layout.params.quota_a,
            layout.params.quota_b,
            layout.balanced.len(),
            families_per_s,
            m_aux,
            mode
        );

        let graph = match mode {
            BuildMode::Explicit => {
                let mut builder = GraphBuilder::new(groups);
                for i in 0..n_proper {
                    for j in (i + 1)..n_proper {
                        if proper_edge(inst, &vertices[i], &vertices[j]) {
                            builder.add_edge(i, j);
                        }
                    }
                    for (a, spec) in layout.aux_specs.iter().enumerate() {
                        if spec.adjacent_to(&vertices[i].s, &layout.params) {
                            builder.add_edge(i, layout.group_id_of_aux(a));
                        }
                    }
                }
                builder.build(metadata)
            }
            BuildMode::Oracle => {
                let oracle_layout = Arc::clone(&layout);
                CommunityGraph::new_oracle(
                    groups,
                    Arc::new(move |i, j| {
                        let l = &oracle_layout;
                        l.edge(i, j, &|id| l.vertex(id))
                    }),
                    metadata,
                )
            }
        };
        Ok(DecisionGadget {
            layout,
            vertices: if matches!(mode, BuildMode::Explicit) {
                Some(Arc::new(vertices))
            } else {
                None
            },
            m_aux,
            graph,
        })
    }

    pub fn graph(&self) -> &CommunityGraph {
        &self.graph
    }

    pub fn into_graph(self) -> CommunityGraph {
        self.graph
    }

    pub fn params(&self) -> &DecisionParams {
        &self.layout.params
    }

    pub fn instance(&self) -> &LabelCoverInstance {
        &self.layout.instance
    }

    pub fn proper_count(&self) -> usize {
        self.layout.n_proper
    }

    pub fn families_per_subset(&self) -> u128 {
        self.layout.families_per_s
    }

    pub fn balanced_subsets(&self) -> &[Vec<u64>] {
        &self.layout.balanced
    }

    pub fn aux_specs(&self) -> &[AuxSpec] {
        &self.layout.aux_specs
    }

    pub fn m_aux(&self) -> usize {
        self.m_aux
    }

    /// The proper vertex behind a group id; explicit builds return the
    /// stored vertex, oracle builds reconstruct it.
    pub fn vertex(&self, id: usize) -> Result<DecisionVertex> {
        if let Some(vs) = &self.vertices {
            vs.get(id).cloned().ok_or_else(|| {
                Error::InvalidParameter(format!("vertex id {} out of range", id))
            })
        } else {
            self.layout.vertex(id)
        }
    }

    pub fn vertex_id(&self, s_idx: usize, family: u128) -> usize {
        (s_idx as u128 * self.layout.families_per_s + family) as usize
    }

    /// The completeness selection: for each balanced subset, the vertex
    /// whose lines restrict the zero-filled low-degree extension of the
    /// labeling.
    pub fn community_from_labeling(&self, lambda: &Labeling) -> Result<SubsetSelection> {
        let inst = &self.layout.instance;
        let params = &self.layout.params;
        let value = lc_value(inst, lambda)?;
        if value != Frac::new(1, 1) {
            return Err(Error::InvalidParameter(format!(
                "labeling satisfies only {} of the constraints",
                value
            )));
        }
        let f = params.grid.len();
        let table = BiPolyTable::low_degree_extend(params.field, &params.grid, |gi, gj| {
            let x = params.grid[gi];
            let y = params.grid[gj];
            let mut sigma_a = 0u64;
            let mut sigma_b = 0u64;
            if let Some(bi) = params.f_a.iter().position(|&r| r == x) {
                let rho = params.rho_a(inst);
                if gj < rho {
                    if let VarAssignment::Valid(v) = lambda.phi_a[bi * rho + gj] {
                        sigma_a = v as u64;
                    }
                }
            }
            if let Some(bj) = params.f_b.iter().position(|&c| c == y) {
                let rho = params.rho_b(inst);
                if gi < rho {
                    if let VarAssignment::Valid(v) = lambda.phi_b[bj * rho + gi] {
                        sigma_b = v as u64;
                    }
                }
            }
            sigma_a * inst.sigma_b as u64 + sigma_b
        })?;
        let _ = f;
        let mut sel = SubsetSelection::empty(self.graph.num_groups());
        for (s_idx, s) in self.layout.balanced.iter().enumerate() {
            let rows: Vec<UniPoly> = s.iter().map(|&e| table.restrict_line(Axis::Row, e)).collect();
            let cols: Vec<UniPoly> = s.iter().map(|&e| table.restrict_line(Axis::Col, e)).collect();
            let v = DecisionVertex::new(inst, params, s.clone(), rows, cols)?;
            let fam = self.layout.family_index(&v)?;
            sel.counts[self.vertex_id(s_idx, fam)] = 1;
        }
        Ok(sel)
    }

    /// Family index of a vertex's polynomial data (inverse of vertex
    /// enumeration).
    pub fn family_index(&self, v: &DecisionVertex) -> Result<u128> {
        self.layout.family_index(v)
    }
}

/// Max-gap probe over a built gadget graph: the largest
/// alpha_star - beta_star any subset achieves, with its witness.
pub fn soundness_probe(
    graph: &CommunityGraph,
    budget: Budget,
) -> Result<(SFrac, SubsetSelection)> {
    crate::graph::max_gap(graph, budget)
}

/// How many distinct assignments a selection induces per line: for each
/// field element, the distinct row polynomials (and separately column
/// polynomials) among selected proper vertices whose subset contains it.
/// List-decoding style bounds predict few distinct assignments per line;
/// this measures, it does not assert.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineCensus {
    pub per_row: std::collections::BTreeMap<u64, usize>,
    pub per_col: std::collections::BTreeMap<u64, usize>,
    pub max_distinct: usize,
}

impl DecisionGadget {
    pub fn line_census(&self, sel: &SubsetSelection) -> Result<LineCensus> {
        if sel.counts.len() != self.graph.num_groups() {
            return Err(Error::InvalidParameter(format!(
                "selection over {} groups, graph has {}",
                sel.counts.len(),
                self.graph.num_groups()
            )));
        }
        let mut rows: std::collections::BTreeMap<u64, std::collections::BTreeSet<Vec<u64>>> =
            Default::default();
        let mut cols: std::collections::BTreeMap<u64, std::collections::BTreeSet<Vec<u64>>> =
            Default::default();
        for (id, &c) in sel.counts.iter().enumerate() {
            if c == 0 || id >= self.layout.n_proper {
                continue;
            }
            let v = self.vertex(id)?;
            for (i, &s) in v.s.iter().enumerate() {
                rows.entry(s).or_default().insert(v.rows[i].coeffs().to_vec());
                cols.entry(s).or_default().insert(v.cols[i].coeffs().to_vec());
            }
        }
        let per_row: std::collections::BTreeMap<u64, usize> =
            rows.into_iter().map(|(k, v)| (k, v.len())).collect();
        let per_col: std::collections::BTreeMap<u64, usize> =
            cols.into_iter().map(|(k, v)| (k, v.len())).collect();
        let max_distinct = per_row
            .values()
            .chain(per_col.values())
            .copied()
            .max()
            .unwrap_or(0);
        Ok(LineCensus {
            per_row,
            per_col,
            max_distinct,
        })
    }
}

/// Fraction of balanced choices whose quota-part lands inside a fixed
/// subset of size `subset_size`: C(subset_size, quota) / C(total, quota).
/// This is the exact finite analogue of the aux adjacency rate.
pub fn balanced_aux_fraction(total: usize, subset_size: usize, quota: usize) -> Frac {
    Frac::new(
        binomial(subset_size, quota) as u64,
        binomial(total, quota) as u64,
    )
}

fn combinations(src: &[u64], k: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(src: &[u64], k: usize, start: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..src.len() {
            cur.push(src[i]);
            rec(src, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(src, k, 0, &mut cur, &mut out);
    out
}

/// The monic polynomial vanishing exactly on `s`.
fn vanishing_poly(field: PrimeField, s: &[u64]) -> UniPoly {
    let mut coeffs = vec![1u64];
    for &root in s {
        // Multiply by (x - root).
        let mut next = vec![0u64; coeffs.len() + 1];
        for (d, &c) in coeffs.iter().enumerate() {
            next[d + 1] = field.add(next[d + 1], c);
            next[d] = field.sub(next[d], field.mul(c, root));
        }
        coeffs = next;
    }
    UniPoly::new(field, coeffs)
}

fn poly_add(field: PrimeField, a: &UniPoly, b: &UniPoly) -> UniPoly {
    let n = a.coeffs().len().max(b.coeffs().len());
    let av = a.coeffs_padded(n);
    let bv = b.coeffs_padded(n);
    UniPoly::new(
        field,
        av.iter().zip(&bv).map(|(&x, &y)| field.add(x, y)).collect(),
    )
}

fn poly_sub(field: PrimeField, a: &UniPoly, b: &UniPoly) -> UniPoly {
    let n = a.coeffs().len().max(b.coeffs().len());
    let av = a.coeffs_padded(n);
    let bv = b.coeffs_padded(n);
    UniPoly::new(
        field,
        av.iter().zip(&bv).map(|(&x, &y)| field.sub(x, y)).collect(),
    )
}

fn poly_mul(field: PrimeField, a: &UniPoly, b: &UniPoly) -> UniPoly {
    if a.is_zero() || b.is_zero() {
        return UniPoly::zero(field);
    }
    let mut out = vec![0u64; a.coeffs().len() + b.coeffs().len() - 1];
    for (i, &x) in a.coeffs().iter().enumerate() {
        for (j, &y) in b.coeffs().iter().enumerate() {
            out[i + j] = field.add(out[i + j], field.mul(x, y));
        }
    }
    UniPoly::new(field, out)
}

/// Quotient of an exact division by a monic divisor, or None if the
/// remainder is nonzero.
fn div_exact(field: PrimeField, num: &UniPoly, divisor: &UniPoly) -> Option<UniPoly> {
    let d = divisor.degree().expect("divisor must be nonzero");
    debug_assert_eq!(divisor.coeffs()[d], 1, "divisor must be monic");
    if num.is_zero() {
        return Some(UniPoly::zero(field));
    }
    let nd = num.degree().unwrap();
    if nd < d {
        return None;
    }
    let dc = divisor.coeffs();
    let mut work = num.coeffs().to_vec();
    let qlen = nd - d + 1;
    let mut q = vec![0u64; qlen];
    for k in (0..qlen).rev() {
        let c = work[k + d];
        q[k] = c;
        if c != 0 {
            for i in 0..=d {
                work[k + i] = field.sub(work[k + i], field.mul(c, dc[i]));
            }
        }
    }
    if work[..d].iter().any(|&c| c != 0) {
        return None;
    }
    Some(UniPoly::new(field, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac;
    use crate::graph::{is_community, profile};
    use crate::labelcover::{EdgeConstraint, LcEdge};
    use rand::Rng;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    /// 2 A-vars in one row block, 2 B-vars in one column block over
    /// GF(5); the grid point (0, 1) hosts both a1 and b0.
    fn paired_instance() -> LabelCoverInstance {
        LabelCoverInstance::new(
            2,
            2,
            2,
            2,
            vec![
                LcEdge {
                    a: 0,
                    b: 0,
                    constraint: EdgeConstraint::Projection(vec![0, 1]),
                },
                LcEdge {
                    a: 1,
                    b: 0,
                    constraint: EdgeConstraint::Projection(vec![0, 1]),
                },
                LcEdge {
                    a: 0,
                    b: 1,
                    constraint: EdgeConstraint::Projection(vec![1, 0]),
                },
            ],
        )
        .unwrap()
    }

    fn paired_params() -> DecisionParams {
        DecisionParams {
            field: gf(5),
            grid: vec![0, 1],
            f_a: vec![0],
            f_b: vec![1],
            t: 2,
            quota_a: 1,
            quota_b: 1,
            eps: frac(1, 2),
            aux_h: Some(1),
            aux_h_a: None,
            aux_h_b: None,
            aux_cap: 3,
        }
    }

    /// Tiny t < |F| configuration over GF(3): one balanced subset {0},
    /// 27 families.
    fn tiny_params() -> DecisionParams {
        DecisionParams {
            field: gf(3),
            grid: vec![0, 1],
            f_a: vec![0],
            f_b: vec![1],
            t: 1,
            quota_a: 1,
            quota_b: 0,
            eps: frac(1, 2),
            aux_h: Some(2),
            aux_h_a: Some(1),
            aux_h_b: Some(0),
            aux_cap: 2,
        }
    }

    fn tiny_instance() -> LabelCoverInstance {
        LabelCoverInstance::new(
            1,
            1,
            2,
            1,
            vec![LcEdge {
                a: 0,
                b: 0,
                constraint: EdgeConstraint::Projection(vec![0, 0]),
            }],
        )
        .unwrap()
    }

    #[test]
    fn balanced_subsets_respect_quotas() {
        let inst = LabelCoverInstance::new(1, 1, 2, 2, vec![]).unwrap();
        let params = DecisionParams {
            field: gf(5),
            grid: vec![0, 1],
            f_a: vec![0],
            f_b: vec![1],
            t: 3,
            quota_a: 1,
            quota_b: 1,
            eps: frac(1, 2),
            aux_h: Some(3),
            aux_h_a: None,
            aux_h_b: None,
            aux_cap: 4,
        };
        let gadget =
            DecisionGadget::build(&inst, params, BuildMode::Oracle, Budget::new(1 << 24)).unwrap();
        assert_eq!(
            gadget.balanced_subsets(),
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]]
        );
        // t >= |F|: one family per F x F grid table.
        assert_eq!(gadget.families_per_subset(), 625);
        assert_eq!(gadget.proper_count(), 3 * 625);
    }

    #[test]
    fn family_space_sizes_cover_both_regimes() {
        let gadget = DecisionGadget::build(
            &tiny_instance(),
            tiny_params(),
            BuildMode::Explicit,
            Budget::new(1 << 24),
        )
        .unwrap();
        // t = 1 < |F| = 2: p^(2tF - t^2) = 3^3.
        assert_eq!(gadget.families_per_subset(), 27);
        assert_eq!(gadget.proper_count(), 27);
        // Every enumerated vertex passes construction validation, and
        // ids roundtrip through the family index.
        for id in 0..gadget.proper_count() {
            let v = gadget.vertex(id).unwrap();
            let fam = gadget.family_index(&v).unwrap();
            assert_eq!(gadget.vertex_id(0, fam), id);
        }
    }

    #[test]
    fn table_regime_ids_roundtrip() {
        let gadget = DecisionGadget::build(
            &paired_instance(),
            paired_params(),
            BuildMode::Oracle,
            Budget::new(1 << 24),
        )
        .unwrap();
        assert_eq!(gadget.families_per_subset(), 625);
        let mut rng = crate::partition::seeded_rng(3, 3);
        for _ in 0..40 {
            let id = rng.gen_range(0..gadget.proper_count());
            let v = gadget.vertex(id).unwrap();
            let fam = gadget.family_index(&v).unwrap();
            assert_eq!(gadget.vertex_id(0, fam), id);
        }
    }

    #[test]
    fn inconsistent_families_are_rejected() {
        let inst = paired_instance();
        let params = paired_params();
        let field = gf(5);
        let rows = vec![
            UniPoly::new(field, vec![0]),
            UniPoly::new(field, vec![0]),
        ];
        // Column at 0 must pass through rows' values at column... break
        // it deliberately.
        let cols = vec![
            UniPoly::new(field, vec![1]),
            UniPoly::new(field, vec![0]),
        ];
        let err = DecisionVertex::new(&inst, &params, vec![0, 1], rows, cols).unwrap_err();
        assert!(err.to_string().contains("disagree"));
        // Degree bound.
        let rows = vec![
            UniPoly::new(field, vec![0, 0, 1]),
            UniPoly::new(field, vec![0]),
        ];
        let cols = vec![
            UniPoly::new(field, vec![0]),
            UniPoly::new(field, vec![0]),
        ];
        assert!(DecisionVertex::new(&inst, &params, vec![0, 1], rows, cols).is_err());
        // Quota violation.
        let rows = vec![UniPoly::zero(field), UniPoly::zero(field)];
        let cols = vec![UniPoly::zero(field), UniPoly::zero(field)];
        assert!(DecisionVertex::new(&inst, &params, vec![2, 3], rows, cols).is_err());
    }

    #[test]
    fn decode_point_handles_pairs_and_ranges() {
        // One row block of two A-vars, one column block of two B-vars,
        // alphabets 2 x 7 -> pair capacity 14 <= 17.
        let inst = LabelCoverInstance::new(
            2,
            2,
            2,
            7,
            vec![LcEdge {
                a: 0,
                b: 0,
                constraint: EdgeConstraint::Projection(vec![0, 1]),
            }],
        )
        .unwrap();
        let params = DecisionParams {
            field: gf(17),
            grid: vec![0, 1],
            f_a: vec![0],
            f_b: vec![1],
            t: 2,
            quota_a: 1,
            quota_b: 1,
            eps: frac(1, 2),
            aux_h: None,
            aux_h_a: None,
            aux_h_b: None,
            aux_cap: 1,
        };
        params.validate_for(&inst).unwrap();
        // (0, 1) hosts a1 (block 0, offset 1) and b0 (block 0, offset 0).
        assert_eq!(params.a_point(&inst, 1), (0, 1));
        assert_eq!(params.b_point(&inst, 0), (0, 1));
        let (a, b) = decode_point(&inst, &params, 13, (0, 1));
        assert_eq!(a, Some((1, VarAssignment::Valid(1))));
        assert_eq!(b, Some((0, VarAssignment::Valid(6))));
        // Re-encode: 1 * 7 + 6 = 13.
        assert_eq!(7 + 6, 13);
        let (a, b) = decode_point(&inst, &params, 0, (0, 1));
        assert_eq!(a, Some((1, VarAssignment::Valid(0))));
        assert_eq!(b, Some((0, VarAssignment::Valid(0))));
        // Out of range: invalid for every hosted variable.
        let (a, b) = decode_point(&inst, &params, 14, (0, 1));
        assert_eq!(a, Some((1, VarAssignment::Invalid)));
        assert_eq!(b, Some((0, VarAssignment::Invalid)));
        // A point hosting nothing.
        let (a, b) = decode_point(&inst, &params, 3, (5, 9));
        assert!(a.is_none() && b.is_none());
    }

    #[test]
    fn disjoint_subsets_join_only_when_the_union_satisfies() {
        // A-vars a0, a1 in two row blocks; B-vars b0, b1 in one column
        // block; constraints pair a0 with b1 and a1 with b0, so vertices
        // at S = {0} and T = {1} each host one side of a constraint.
        let inst = LabelCoverInstance::new(
            2,
            2,
            2,
            2,
            vec![
                LcEdge {
                    a: 0,
                    b: 1,
                    constraint: EdgeConstraint::Projection(vec![0, 1]),
                },
                LcEdge {
                    a: 1,
                    b: 0,
                    constraint: EdgeConstraint::Projection(vec![0, 1]),
                },
            ],
        )
        .unwrap();
        let params = DecisionParams {
            field: gf(5),
            grid: vec![0, 1, 2],
            f_a: vec![0, 1],
            f_b: vec![2],
            t: 1,
            quota_a: 1,
            quota_b: 0,
            eps: frac(1, 2),
            aux_h: None,
            aux_h_a: None,
            aux_h_b: None,
            aux_cap: 1,
        };
        params.validate_for(&inst).unwrap();
        assert_eq!(params.a_point(&inst, 0), (0, 0));
        assert_eq!(params.a_point(&inst, 1), (1, 0));
        assert_eq!(params.b_point(&inst, 0), (0, 2));
        assert_eq!(params.b_point(&inst, 1), (1, 2));
        let field = gf(5);
        // u at S = {0}: all zero values. Hosts a0 = 0, a1 = 0 (via its
        // column), b0 = 0.
        let u = DecisionVertex::new(
            &inst,
            &params,
            vec![0],
            vec![UniPoly::zero(field)],
            vec![UniPoly::zero(field)],
        )
        .unwrap();
        assert!(!u.is_dirty());
        assert_eq!(u.labeling().phi_b[0], VarAssignment::Valid(0));
        // v at T = {1}: row = x^2 + x gives value 1 at the b1 point
        // (2 -> 6 mod 5 = 1, an odd pair encoding sigma_B = 1), while
        // both crossing points stay 0-consistent with u.
        let r_v = UniPoly::new(field, vec![0, 1, 1]);
        let c_v = UniPoly::new(field, vec![0, 2]);
        assert_eq!(r_v.eval(1), c_v.eval(1));
        let v = DecisionVertex::new(&inst, &params, vec![1], vec![r_v], vec![c_v]).unwrap();
        assert!(!v.is_dirty());
        assert_eq!(v.labeling().phi_b[1], VarAssignment::Valid(1));
        // Geometric agreement holds but the union violates a0 -> b1.
        assert!(!proper_edge(&inst, &u, &v));
        // Same geometry with an even value at the b1 point satisfies the
        // union: row x^2 + 4x gives 0, 0, 2.
        let r_ok = UniPoly::new(field, vec![0, 4, 1]);
        let c_ok = UniPoly::zero(field);
        assert_eq!(r_ok.eval(1), c_ok.eval(1));
        let v_ok =
            DecisionVertex::new(&inst, &params, vec![1], vec![r_ok], vec![c_ok]).unwrap();
        assert_eq!(v_ok.labeling().phi_b[1], VarAssignment::Valid(0));
        assert!(proper_edge(&inst, &u, &v_ok));
        // Symmetry.
        assert!(!proper_edge(&inst, &v, &u));
        assert!(proper_edge(&inst, &v_ok, &u));
    }

    #[test]
    fn completeness_selection_is_a_community_and_pairs_decode() {
        let inst = paired_instance();
        let gadget = DecisionGadget::build(
            &inst,
            paired_params(),
            BuildMode::Explicit,
            Budget::new(1 << 24),
        )
        .unwrap();
        // Satisfying labeling: a = (0, 0), b = (0, 1).
        let lambda = Labeling::total(vec![0, 0], vec![0, 1]);
        assert_eq!(lc_value(&inst, &lambda).unwrap(), frac(1, 1));
        let sel = gadget.community_from_labeling(&lambda).unwrap();
        assert_eq!(sel.size(), 1, "single balanced subset");
        // |H| = 1 < t = 2 leaves every aux group isolated from C, so the
        // singleton completeness selection verifies vacuously.
        assert!(is_community(gadget.graph(), &sel, frac(1, 1), frac(1, 2)).unwrap());
        // The selected vertex hosts the double point (0, 1) = a1 and b0:
        // value must be sigma_A(a1) * 2 + sigma_B(b0) = 0 * 2 + 0.
        let id = sel.counts.iter().position(|&c| c == 1).unwrap();
        let v = gadget.vertex(id).unwrap();
        assert_eq!(v.labeling().phi_a[1], VarAssignment::Valid(0));
        assert_eq!(v.labeling().phi_b[0], VarAssignment::Valid(0));
        // A labeling with b1 = 1 forces value 1 at grid point (1, 1).
        assert_eq!(v.labeling().phi_b[1], VarAssignment::Valid(1));
        // Non-satisfying labelings refuse.
        let bad = Labeling::total(vec![0, 1], vec![0, 1]);
        assert!(gadget.community_from_labeling(&bad).is_err());
    }

    #[test]
    fn aux_kinds_follow_their_subset_rules() {
        // No Label Cover edges; the aux geometry is what matters here.
        let inst = LabelCoverInstance::new(2, 0, 2, 1, vec![]).unwrap();
        let params = DecisionParams {
            field: gf(3),
            grid: vec![0, 1],
            f_a: vec![0, 1],
            f_b: vec![],
            t: 2,
            quota_a: 1,
            quota_b: 0,
            eps: frac(1, 2),
            aux_h: Some(2),
            aux_h_a: Some(1),
            aux_h_b: Some(0),
            aux_cap: 5,
        };
        let gadget =
            DecisionGadget::build(&inst, params, BuildMode::Explicit, Budget::new(1 << 26))
                .unwrap();
        // Balanced subsets: {0, 2} and {1, 2}.
        assert_eq!(gadget.balanced_subsets(), &[vec![0, 2], vec![1, 2]]);
        assert_eq!(gadget.proper_count(), 2 * 81);
        assert_eq!(gadget.m_aux(), 5);
        let n = gadget.proper_count();
        let specs = gadget.aux_specs().to_vec();
        // Kinds: C(3,2) = 3 of H, C(2,1) = 2 of H_A, C(0,0) = 1 of H_B.
        assert_eq!(specs.len(), 6);
        let v0 = gadget.vertex(0).unwrap();
        assert_eq!(v0.subset(), &[0, 2]);
        for (a, spec) in specs.iter().enumerate() {
            let adjacent = gadget.graph().group_adjacent(0, n + a);
            let expect = match spec.kind {
                // S = {0, 2} fits inside H iff H = {0, 2}.
                AuxKind::H => spec.set == vec![0, 2],
                // S with F_A = {0}.
                AuxKind::HA => spec.set.contains(&0),
                // S with F_B is empty; the empty H_B contains it.
                AuxKind::HB => true,
            };
            assert_eq!(adjacent, expect, "aux spec {:?}", spec);
        }
        // Aux groups never touch each other.
        for a in 0..specs.len() {
            for b in (a + 1)..specs.len() {
                assert!(!gadget.graph().group_adjacent(n + a, n + b));
            }
        }
    }

    #[test]
    fn oracle_and_explicit_builds_agree() {
        let inst = tiny_instance();
        let explicit = DecisionGadget::build(
            &inst,
            tiny_params(),
            BuildMode::Explicit,
            Budget::new(1 << 24),
        )
        .unwrap();
        let oracle = DecisionGadget::build(
            &inst,
            tiny_params(),
            BuildMode::Oracle,
            Budget::new(1 << 24),
        )
        .unwrap();
        let n = explicit.graph().num_groups();
        assert_eq!(n, oracle.graph().num_groups());
        assert!(!oracle.graph().is_explicit());
        let mut rng = crate::partition::seeded_rng(11, 2);
        let mut checked = 0;
        while checked < 200 {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i == j {
                continue;
            }
            assert_eq!(
                explicit.graph().group_adjacent(i, j),
                oracle.graph().group_adjacent(i, j),
                "pair ({}, {})",
                i,
                j
            );
            checked += 1;
        }
        // Oracle graphs refuse serialization until materialized.
        assert!(oracle.graph().to_text().is_err());
        let materialized = oracle.graph().materialize(Budget::new(1 << 24)).unwrap();
        assert_eq!(
            materialized.to_text().unwrap(),
            explicit.graph().to_text().unwrap()
        );
    }

    #[test]
    fn soundness_probe_reports_the_gap() {
        // GF(2) build small enough for the exhaustive subset scan:
        // 8 proper vertices on one subset plus two singleton-H aux
        // groups, one of which is fully isolated (gap 1 witness).
        let inst = LabelCoverInstance::new(
            1,
            1,
            1,
            2,
            vec![LcEdge {
                a: 0,
                b: 0,
                constraint: EdgeConstraint::Projection(vec![0]),
            }],
        )
        .unwrap();
        let params = DecisionParams {
            field: gf(2),
            grid: vec![0, 1],
            f_a: vec![0],
            f_b: vec![1],
            t: 1,
            quota_a: 1,
            quota_b: 0,
            eps: frac(1, 2),
            aux_h: Some(1),
            aux_h_a: None,
            aux_h_b: None,
            aux_cap: 2,
        };
        let gadget =
            DecisionGadget::build(&inst, params, BuildMode::Explicit, Budget::new(1 << 26))
                .unwrap();
        assert_eq!(gadget.proper_count(), 8);
        let (gap, witness) = soundness_probe(gadget.graph(), Budget::new(1 << 26)).unwrap();
        assert!(gap > SFrac::new(0, 1));
        assert!(witness.size() > 0);
        let p = profile(gadget.graph(), &witness).unwrap();
        let direct = SFrac::new(*p.alpha_star.numer() as i64, *p.alpha_star.denom() as i64)
            - SFrac::new(*p.beta_star.numer() as i64, *p.beta_star.denom() as i64);
        assert_eq!(gap, direct);
    }

    #[test]
    fn completeness_lines_carry_one_assignment_each() {
        // Three balanced subsets, all selecting restrictions of the one
        // zero-filled table: every touched line sees exactly one
        // distinct assignment.
        let inst = paired_instance();
        let mut params = paired_params();
        params.t = 3;
        let gadget =
            DecisionGadget::build(&inst, params, BuildMode::Oracle, Budget::new(1 << 24))
                .unwrap();
        assert_eq!(gadget.balanced_subsets().len(), 3);
        let lambda = Labeling::total(vec![0, 0], vec![0, 1]);
        let sel = gadget.community_from_labeling(&lambda).unwrap();
        assert_eq!(sel.size(), 3);
        let census = gadget.line_census(&sel).unwrap();
        assert_eq!(census.max_distinct, 1);
        // The three subsets {0,1,2}, {0,1,3}, {0,1,4} touch all five
        // field elements.
        assert_eq!(census.per_row.len(), 5);
        assert_eq!(census.per_col.len(), 5);
        // A second, different completeness selection shares lines 0 and
        // 1 with different polynomials: two assignments there.
        let lambda2 = Labeling::total(vec![1, 1], vec![1, 0]);
        let sel2 = gadget.community_from_labeling(&lambda2).unwrap();
        let mut both = sel.clone();
        for (c, &c2) in both.counts.iter_mut().zip(&sel2.counts) {
            *c += c2;
        }
        let census = gadget.line_census(&both).unwrap();
        assert_eq!(census.max_distinct, 2);
    }

    #[test]
    fn aux_fraction_identity() {
        // C(2, 1) / C(4, 1) = 1/2: with one quota slot, halving the
        // block halves the admissible subsets.
        assert_eq!(balanced_aux_fraction(4, 2, 1), frac(1, 2));
        // Quota 2: C(2, 2) / C(4, 2) = 1/6.
        assert_eq!(balanced_aux_fraction(4, 2, 2), frac(1, 6));
        // Zero quota: every aux set contains the empty intersection.
        assert_eq!(balanced_aux_fraction(4, 2, 0), frac(1, 1));
    }

    #[test]
    fn explicit_budget_refusal() {
        let inst = paired_instance();
        let mut params = paired_params();
        params.field = gf(11);
        params.grid = vec![0, 1, 2];
        params.t = 3;
        // 11^9 families blow any reasonable budget.
        assert!(matches!(
            DecisionGadget::build(&inst, params, BuildMode::Explicit, Budget::new(1 << 20)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn poly_helpers_divide_exactly() {
        let field = gf(7);
        let vanish = vanishing_poly(field, &[1, 3]);
        // (x - 1)(x - 3) = x^2 - 4x + 3 = x^2 + 3x + 3 over GF(7).
        assert_eq!(vanish.coeffs(), &[3, 3, 1]);
        let q = UniPoly::new(field, vec![2, 5, 1]);
        let prod = poly_mul(field, &vanish, &q);
        let back = div_exact(field, &prod, &vanish).unwrap();
        assert_eq!(back, q);
        // A non-multiple has no exact quotient.
        let off = poly_add(field, &prod, &UniPoly::new(field, vec![1]));
        assert!(div_exact(field, &off, &vanish).is_none());
    }
}
