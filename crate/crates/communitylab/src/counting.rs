//! The counting-preserving gadget: Label Cover instance -> community
//! graph whose (1, 1/m)-communities of size >= 2 are in bijection with
//! satisfying labelings.
//!
//! Variables embed injectively into the grid F x F inside GF(p)^2. A
//! proper vertex class (g, p1, p2) carries a partial assignment on the two
//! lines through g: p1 gives values on GF(p) x {g} (a polynomial in x),
//! p2 on {g} x GF(p) (in y), tied by p1(g) = p2(g). Each class is
//! materialized m times; copies are distinct singleton groups because the
//! auxiliary vertices attach per copy index. Two proper vertices are
//! adjacent iff their assignments agree on every shared grid point and
//! their union violates no Label Cover edge. Auxiliary twins u_{g,i}
//! (multiplicity 2) attach to every proper vertex with field element other
//! than g and copy index i; their attachment into a full community is
//! exactly (p-1)/(m*p), strictly below 1/m, while a community missing a
//! field element would let some aux reach 1/m and fail the strict
//! weak-tie bound.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::field::{all_polys, Axis, BiPolyTable, PrimeField, UniPoly};
use crate::graph::{
    is_community, profile, CommunityGraph, CommunityProfile, GraphBuilder, Group, SubsetSelection,
};
use crate::labelcover::{
    lc_partial_violations, lc_value, union_violations, LabelCoverInstance, Labeling,
    VarAssignment,
};
use crate::Frac;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Parameters of the counting gadget.
///
/// Labels embed per side as the identity: an A-label s sits at field
/// element s, and likewise for B. The two images may overlap freely since
/// every grid point hosts at most one variable, so the capacity condition
/// is max(|sigma_a|, |sigma_b|) <= p rather than a sum bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountingParams {
    pub field: PrimeField,
    /// The grid F, a set of distinct field elements.
    pub grid: Vec<u64>,
    /// Copies per class; the community threshold is epsilon = 1/mult.
    pub mult: usize,
}

impl CountingParams {
    pub fn new(field: PrimeField, grid: Vec<u64>, mult: usize) -> Result<Self> {
        if mult < 2 {
            return Err(Error::InvalidParameter(format!(
                "multiplicity must be at least 2, got {}",
                mult
            )));
        }
        if grid.is_empty() {
            return Err(Error::InvalidParameter("grid must be nonempty".into()));
        }
        for (i, &a) in grid.iter().enumerate() {
            if a >= field.order() {
                return Err(Error::InvalidParameter(format!(
                    "grid element {} outside GF({})",
                    a,
                    field.order()
                )));
            }
            if grid[..i].contains(&a) {
                return Err(Error::InvalidParameter(format!(
                    "grid element {} repeated",
                    a
                )));
            }
        }
        // Soundness margin: a vertex outside a full community can share a
        // line with at most one selected class per grid point beyond its
        // own, so its attachment is at most (|F| - 1) * m out of m * p.
        // That must sit strictly below epsilon = 1/m, i.e.
        // (|F| - 1) * m < p, or legitimate communities are destroyed by
        // the exact-tie rejection.
        if (grid.len() as u64 - 1) * mult as u64 >= field.order() {
            return Err(Error::InvalidParameter(format!(
                "need (|F| - 1) * m < p for the epsilon margin; got ({} - 1) * {} >= {}",
                grid.len(),
                mult,
                field.order()
            )));
        }
        Ok(CountingParams { field, grid, mult })
    }

    pub fn epsilon(&self) -> Frac {
        Frac::new(1, self.mult as u64)
    }

    /// Grid point of combined variable index k (A-variables first, then
    /// B), filling the grid row by row.
    pub fn var_point(&self, k: usize) -> (u64, u64) {
        let f = self.grid.len();
        (self.grid[k / f], self.grid[k % f])
    }

    fn validate_for(&self, inst: &LabelCoverInstance) -> Result<()> {
        let f = self.grid.len();
        if f * f < inst.n_a + inst.n_b {
            return Err(Error::InvalidParameter(format!(
                "grid has {} points but the instance has {} variables",
                f * f,
                inst.n_a + inst.n_b
            )));
        }
        let sigma_max = inst.sigma_a.max(inst.sigma_b) as u64;
        if sigma_max > self.field.order() {
            return Err(Error::InvalidParameter(format!(
                "alphabet size {} does not embed in GF({})",
                sigma_max,
                self.field.order()
            )));
        }
        Ok(())
    }
}

/// The partial labeling a class (g, p1, p2) induces: every variable whose
/// grid point lies on one of the two lines through g reads its value off
/// the corresponding polynomial; values at or above the side's alphabet
/// size mark the variable invalidly assigned.
pub fn induced_assignment(
    inst: &LabelCoverInstance,
    params: &CountingParams,
    g: u64,
    p1: &UniPoly,
    p2: &UniPoly,
) -> Labeling {
    let mut lab = Labeling::empty(inst.n_a, inst.n_b);
    for k in 0..(inst.n_a + inst.n_b) {
        let (x, y) = params.var_point(k);
        let value = if y == g {
            Some(p1.eval(x))
        } else if x == g {
            Some(p2.eval(y))
        } else {
            None
        };
        let Some(v) = value else { continue };
        if k < inst.n_a {
            lab.phi_a[k] = VarAssignment::from_value(v, inst.sigma_a);
        } else {
            lab.phi_b[k - inst.n_a] = VarAssignment::from_value(v, inst.sigma_b);
        }
    }
    lab
}

struct ClassInfo {
    g: u64,
    p1: UniPoly,
    p2: UniPoly,
    /// p1 evaluated at every field element.
    row_vals: Vec<u64>,
    /// p2 evaluated at every field element.
    col_vals: Vec<u64>,
    labeling: Labeling,
    /// The class's own lines host a violated constraint; dirty vertices
    /// keep their aux edges but lose every proper edge.
    dirty: bool,
}

type ClassKey = (u64, Vec<u64>, Vec<u64>);

/// The built gadget: the community graph plus the class layout needed to
/// map labelings to selections and back.
pub struct CountingGadget {
    params: CountingParams,
    instance: LabelCoverInstance,
    classes: Vec<ClassInfo>,
    class_index: HashMap<ClassKey, usize>,
    graph: CommunityGraph,
}

impl std::fmt::Debug for CountingGadget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "CountingGadget({} classes, mult {}, {} groups)",
            self.classes.len(),
            self.params.mult,
            self.graph.num_groups()
        )
    }
}

/// Build just the graph; see [`CountingGadget::build`] for the full
/// layout.
pub fn build_counting_graph(
    inst: &LabelCoverInstance,
    params: CountingParams,
    budget: Budget,
) -> Result<CommunityGraph> {
    Ok(CountingGadget::build(inst, params, budget)?.into_graph())
}

impl CountingGadget {
    pub fn build(
        inst: &LabelCoverInstance,
        params: CountingParams,
        budget: Budget,
    ) -> Result<Self> {
        params.validate_for(inst)?;
        let field = params.field;
        let p = field.order();
        let f = params.grid.len();
        let m = params.mult;
        // p^(2f) classes (p^f choices of p1, p^(f-1) of p2, for each of p
        // field elements), m copies each, plus 2*m*p aux vertices.
        let num_classes_big = (p as u128).saturating_pow(2 * f as u32);
        let vertex_count = num_classes_big
            .saturating_mul(m as u128)
            .saturating_add(2 * (m as u128) * (p as u128));
        budget.check(vertex_count)?;
        // The pairwise edge predicate is quadratic in the class count.
        budget.check(num_classes_big.saturating_mul(num_classes_big))?;

        let polys = all_polys(field, f);
        let mut classes: Vec<ClassInfo> = Vec::new();
        let mut class_index: HashMap<ClassKey, usize> = HashMap::new();
        for g in field.elements() {
            for p1 in &polys {
                let anchor = p1.eval(g);
                for p2 in &polys {
                    if p2.eval(g) != anchor {
                        continue;
                    }
                    let labeling = induced_assignment(inst, &params, g, p1, p2);
                    let dirty = lc_partial_violations(inst, &labeling).1 > 0;
                    class_index.insert(
                        (g, p1.coeffs().to_vec(), p2.coeffs().to_vec()),
                        classes.len(),
                    );
                    classes.push(ClassInfo {
                        g,
                        p1: p1.clone(),
                        p2: p2.clone(),
                        row_vals: (0..p).map(|h| p1.eval(h)).collect(),
                        col_vals: (0..p).map(|h| p2.eval(h)).collect(),
                        labeling,
                        dirty,
                    });
                }
            }
        }
        let n_classes = classes.len();
        let n_proper = n_classes * m;

        let mut groups: Vec<Group> = Vec::with_capacity(n_proper + (p as usize) * m);
        for c in &classes {
            for i in 0..m {
                groups.push(Group::new(
                    serde_json::json!({
                        "kind": "proper",
                        "g": c.g,
                        "p1": c.p1.coeffs(),
                        "p2": c.p2.coeffs(),
                        "i": i + 1,
                    }),
                    1,
                ));
            }
        }
        for g in field.elements() {
            for i in 0..m {
                groups.push(Group::new(
                    serde_json::json!({ "kind": "aux", "g": g, "i": i + 1 }),
                    2,
                ));
            }
        }

        let mut builder = GraphBuilder::new(groups);
        for c1 in 0..n_classes {
            if classes[c1].dirty {
                continue;
            }
            // Same class, different copies: identical assignments.
            for i in 0..m {
                for j in (i + 1)..m {
                    builder.add_edge(c1 * m + i, c1 * m + j);
                }
            }
            for c2 in (c1 + 1)..n_classes {
                if class_pair_compatible(inst, &classes[c1], &classes[c2]) {
                    for i in 0..m {
                        for j in 0..m {
                            builder.add_edge(c1 * m + i, c2 * m + j);
                        }
                    }
                }
            }
        }
        for (g_idx, g) in field.elements().enumerate() {
            for i in 0..m {
                let aux = n_proper + g_idx * m + i;
                for (c, info) in classes.iter().enumerate() {
                    if info.g != g {
                        builder.add_edge(aux, c * m + i);
                    }
                }
            }
        }
        let graph = builder.build(format!(
            "counting gadget: GF({}), grid size {}, mult {}, instance {}x{} with {} edges",
            p,
            f,
            m,
            inst.n_a,
            inst.n_b,
            inst.edges.len()
        ));
        Ok(CountingGadget {
            params,
            instance: inst.clone(),
            classes,
            class_index,
            graph,
        })
    }

    pub fn graph(&self) -> &CommunityGraph {
        &self.graph
    }

    pub fn into_graph(self) -> CommunityGraph {
        self.graph
    }

    pub fn params(&self) -> &CountingParams {
        &self.params
    }

    pub fn instance(&self) -> &LabelCoverInstance {
        &self.instance
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn num_proper_groups(&self) -> usize {
        self.classes.len() * self.params.mult
    }

    /// Group index of copy `i` (0-based) of a class.
    pub fn proper_group(&self, class: usize, copy: usize) -> usize {
        class * self.params.mult + copy
    }

    /// Group index of the aux twin pair u_{g, i} (0-based copy index).
    pub fn aux_group(&self, g_idx: usize, copy: usize) -> usize {
        self.num_proper_groups() + g_idx * self.params.mult + copy
    }

    pub fn class_of(&self, g: u64, p1: &UniPoly, p2: &UniPoly) -> Option<usize> {
        self.class_index
            .get(&(g, p1.coeffs().to_vec(), p2.coeffs().to_vec()))
            .copied()
    }

    pub fn class_assignment(&self, class: usize) -> &Labeling {
        &self.classes[class].labeling
    }

    pub fn class_is_dirty(&self, class: usize) -> bool {
        self.classes[class].dirty
    }

    #[cfg(test)]
    pub(crate) fn compatible(&self, c1: usize, c2: usize) -> bool {
        class_pair_compatible(&self.instance, &self.classes[c1], &self.classes[c2])
    }

    /// The completeness selection: all m * p proper vertices whose
    /// polynomials restrict the low-degree extension of the labeling's
    /// grid embedding. Grid points hosting no variable extend with zero.
    pub fn community_from_labeling(&self, lambda: &Labeling) -> Result<SubsetSelection> {
        let value = lc_value(&self.instance, lambda)?;
        if value != Frac::new(1, 1) {
            return Err(Error::InvalidParameter(format!(
                "labeling satisfies only {} of the constraints",
                value
            )));
        }
        let inst = &self.instance;
        let f = self.params.grid.len();
        let table = BiPolyTable::low_degree_extend(self.params.field, &self.params.grid, |i, j| {
            let k = i * f + j;
            if k < inst.n_a {
                match lambda.phi_a[k] {
                    VarAssignment::Valid(v) => v as u64,
                    _ => 0,
                }
            } else if k < inst.n_a + inst.n_b {
                match lambda.phi_b[k - inst.n_a] {
                    VarAssignment::Valid(v) => v as u64,
                    _ => 0,
                }
            } else {
                0
            }
        })?;
        let mut sel = SubsetSelection::empty(self.graph.num_groups());
        for g in self.params.field.elements() {
            let p1 = table.restrict_line(Axis::Col, g);
            let p2 = table.restrict_line(Axis::Row, g);
            let class = self
                .class_of(g, &p1, &p2)
                .expect("line restrictions of a low-degree extension form a class");
            for i in 0..self.params.mult {
                sel.counts[self.proper_group(class, i)] = 1;
            }
        }
        Ok(sel)
    }

    /// Check the structural shape of a claimed community: no aux
    /// vertices, exactly m proper vertices per field element, pairwise
    /// consistent and jointly violation-free, decoding to a satisfying
    /// labeling. Violations come back as a report, not an error.
    pub fn check_structure_claim(&self, sel: &SubsetSelection) -> Result<StructureReport> {
        let eps = self.params.epsilon();
        let prof = profile(&self.graph, sel)?;
        let community = is_community(&self.graph, sel, Frac::new(1, 1), eps)?;
        let mut problems = Vec::new();
        if !community {
            problems.push(format!(
                "selection is not a (1, {})-community: profile ({}, {})",
                eps, prof.alpha_star, prof.beta_star
            ));
        }
        let n_proper = self.num_proper_groups();
        let aux_selected: usize = sel.counts[n_proper..].iter().sum();
        if aux_selected > 0 {
            problems.push(format!("{} auxiliary vertices selected", aux_selected));
        }
        let m = self.params.mult;
        let p = self.params.field.order() as usize;
        let mut per_field = vec![0usize; p];
        let mut selected_classes = Vec::new();
        for (class, info) in self.classes.iter().enumerate() {
            let picked: usize = (0..m).map(|i| sel.counts[self.proper_group(class, i)]).sum();
            if picked > 0 {
                per_field[info.g as usize] += picked;
                selected_classes.push(class);
                if info.dirty {
                    problems.push(format!(
                        "selected vertex class (g = {}) hosts a violated constraint",
                        info.g
                    ));
                }
            }
        }
        for (g, &count) in per_field.iter().enumerate() {
            if count != m {
                problems.push(format!(
                    "field element {} hosts {} selected proper vertices, expected {}",
                    g, count, m
                ));
            }
        }
        let mut pairwise_consistent = true;
        for (a, &c1) in selected_classes.iter().enumerate() {
            for &c2 in &selected_classes[a + 1..] {
                if !self
                    .graph
                    .group_adjacent(self.proper_group(c1, 0), self.proper_group(c2, 0))
                {
                    pairwise_consistent = false;
                    problems.push(format!(
                        "selected classes at g = {} and g = {} are not mutually consistent",
                        self.classes[c1].g, self.classes[c2].g
                    ));
                }
            }
        }
        let labeling = if pairwise_consistent {
            let mut merged = Labeling::empty(self.instance.n_a, self.instance.n_b);
            for &c in &selected_classes {
                merged = merged.merged(&self.classes[c].labeling);
            }
            if !merged.is_total() {
                problems.push("decoded labeling leaves a variable unassigned".into());
            } else {
                match lc_value(&self.instance, &merged) {
                    Ok(v) if v == Frac::new(1, 1) => {}
                    Ok(v) => problems.push(format!("decoded labeling has value {}", v)),
                    Err(e) => problems.push(format!("decoded labeling not evaluable: {}", e)),
                }
            }
            Some(merged)
        } else {
            None
        };
        Ok(StructureReport {
            profile: prof,
            community,
            aux_selected,
            per_field_counts: per_field,
            pairwise_consistent,
            labeling,
            problems,
        })
    }
}

/// Proper-proper adjacency at class level: agreement on the shared grid
/// points plus a violation-free union. Same-g classes share both entire
/// lines, so distinct ones always disagree; cross-g classes share exactly
/// the two crossing points.
fn class_pair_compatible(inst: &LabelCoverInstance, c1: &ClassInfo, c2: &ClassInfo) -> bool {
    if c1.dirty || c2.dirty {
        return false;
    }
    if c1.g == c2.g {
        return c1.p1 == c2.p1 && c1.p2 == c2.p2;
    }
    // Value of c1 at (c1.g, c2.g) vs value of c2 there, and symmetrically.
    if c1.col_vals[c2.g as usize] != c2.row_vals[c1.g as usize]
        || c1.row_vals[c2.g as usize] != c2.col_vals[c1.g as usize]
    {
        return false;
    }
    union_violations(inst, &c1.labeling, &c2.labeling) == 0
}

/// Outcome of [`CountingGadget::check_structure_claim`]; passes iff no
/// problems were recorded.
#[derive(Debug, Clone)]
pub struct StructureReport {
    pub profile: CommunityProfile,
    pub community: bool,
    pub aux_selected: usize,
    /// Selected proper vertices per field element (all must equal m).
    pub per_field_counts: Vec<usize>,
    pub pairwise_consistent: bool,
    /// Decoded labeling, present when the selection is consistent.
    pub labeling: Option<Labeling>,
    pub problems: Vec<String>,
}

impl StructureReport {
    pub fn passes(&self) -> bool {
        self.problems.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac;
    use crate::graph::count_communities;
    use crate::labelcover::{enumerate_satisfying, EdgeConstraint, LcEdge};

    /// Two A-variables, two B-variables over GF(3) with grid {0, 1}:
    /// b0 = a0, b0 = a1, b1 = 1 - a0. Exactly two satisfying labelings.
    fn micro_instance() -> LabelCoverInstance {
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

    fn micro_params(m: usize) -> CountingParams {
        CountingParams::new(PrimeField::new(3).unwrap(), vec![0, 1], m).unwrap()
    }

    fn micro_gadget(m: usize) -> CountingGadget {
        CountingGadget::build(&micro_instance(), micro_params(m), Budget::new(1 << 24)).unwrap()
    }

    /// Same instance over GF(5), roomy enough for multiplicity 3.
    fn gadget_gf5(m: usize) -> CountingGadget {
        let params = CountingParams::new(PrimeField::new(5).unwrap(), vec![0, 1], m).unwrap();
        CountingGadget::build(&micro_instance(), params, Budget::new(1 << 24)).unwrap()
    }

    fn poly(coeffs: &[u64]) -> UniPoly {
        UniPoly::new(PrimeField::new(3).unwrap(), coeffs.to_vec())
    }

    #[test]
    fn class_census_matches_formula() {
        let gadget = micro_gadget(2);
        // p^(2|F|) = 3^4 classes: for each of 3 field elements, 9 choices
        // of p1 and 3 of p2.
        assert_eq!(gadget.num_classes(), 81);
        assert_eq!(gadget.graph().num_groups(), 81 * 2 + 3 * 2);
        assert_eq!(gadget.graph().num_vertices(), 81 * 2 + 3 * 2 * 2);
    }

    #[test]
    fn crossing_agreement_decides_adjacency() {
        let gadget = micro_gadget(2);
        // u = (0, x, 0): hosts a0 = 0, a1 = 0, b0 = 1, violating b0 = a0,
        // so u is dirty.
        let u = gadget.class_of(0, &poly(&[0, 1]), &poly(&[])).unwrap();
        assert!(gadget.class_is_dirty(u));
        // v'' = (1, x, 1) crosses u consistently, but dirt blocks the
        // edge.
        let v = gadget.class_of(1, &poly(&[0, 1]), &poly(&[1])).unwrap();
        assert!(!gadget.compatible(u, v));
        assert!(!gadget
            .graph()
            .group_adjacent(gadget.proper_group(u, 0), gadget.proper_group(v, 0)));
        // Clean pair from the product extension P(x, y) = x * y:
        // (0, 0, 0) and (1, x, y) agree at both crossings and join.
        let u0 = gadget.class_of(0, &poly(&[]), &poly(&[])).unwrap();
        let u1 = gadget.class_of(1, &poly(&[0, 1]), &poly(&[0, 1])).unwrap();
        assert!(!gadget.class_is_dirty(u0));
        assert!(!gadget.class_is_dirty(u1));
        assert!(gadget.compatible(u0, u1));
        assert!(gadget
            .graph()
            .group_adjacent(gadget.proper_group(u0, 0), gadget.proper_group(u1, 1)));
        // Crossing mismatch in the first direction: (1, const 1, y) has
        // p1(0) = 1 != u0's p2(1) = 0.
        let w = gadget.class_of(1, &poly(&[1]), &poly(&[0, 1])).unwrap();
        assert!(!gadget.compatible(u0, w));
    }

    #[test]
    fn predicate_is_symmetric_across_all_class_pairs() {
        let gadget = micro_gadget(2);
        let n = gadget.num_classes();
        for c1 in 0..n {
            for c2 in (c1 + 1)..n {
                assert_eq!(gadget.compatible(c1, c2), gadget.compatible(c2, c1));
            }
        }
    }

    #[test]
    fn same_class_copies_are_adjacent_when_clean() {
        let gadget = gadget_gf5(3);
        let clean = gadget.class_of(0, &poly(&[]), &poly(&[])).unwrap();
        let dirty = gadget.class_of(0, &poly(&[0, 1]), &poly(&[])).unwrap();
        assert!(gadget
            .graph()
            .group_adjacent(gadget.proper_group(clean, 0), gadget.proper_group(clean, 2)));
        assert!(!gadget
            .graph()
            .group_adjacent(gadget.proper_group(dirty, 0), gadget.proper_group(dirty, 1)));
    }

    #[test]
    fn aux_adjacency_follows_field_element_and_copy_index() {
        let gadget = micro_gadget(2);
        let class_g0 = gadget.class_of(0, &poly(&[]), &poly(&[])).unwrap();
        let class_g1 = gadget.class_of(1, &poly(&[]), &poly(&[])).unwrap();
        // Aux at g = 0, copy 0.
        let aux = gadget.aux_group(0, 0);
        // Same field element: never adjacent, regardless of copy.
        assert!(!gadget
            .graph()
            .group_adjacent(aux, gadget.proper_group(class_g0, 0)));
        // Other field element, same copy index: adjacent (even to dirty
        // vertices).
        assert!(gadget
            .graph()
            .group_adjacent(aux, gadget.proper_group(class_g1, 0)));
        let dirty_g1 = gadget.class_of(1, &poly(&[2]), &poly(&[2])).unwrap();
        assert!(gadget.class_is_dirty(dirty_g1));
        assert!(gadget
            .graph()
            .group_adjacent(aux, gadget.proper_group(dirty_g1, 0)));
        // Other copy index: not adjacent.
        assert!(!gadget
            .graph()
            .group_adjacent(aux, gadget.proper_group(class_g1, 1)));
        // Aux groups never touch each other.
        assert!(!gadget.graph().group_adjacent(aux, gadget.aux_group(1, 0)));
        assert!(!gadget.graph().group_adjacent(aux, gadget.aux_group(1, 1)));
    }

    #[test]
    fn induced_assignment_reads_lines() {
        let inst = micro_instance();
        let params = micro_params(2);
        // g = 1 hosts a1 (on the x = ... line?): lines through g = 1 are
        // GF(3) x {1} and {1} x GF(3); grid points on them: (0,1), (1,1),
        // (1,0). Those host a1, b1, b0.
        let lab = induced_assignment(&inst, &params, 1, &poly(&[0, 1]), &poly(&[0, 1]));
        assert_eq!(lab.phi_a[0], VarAssignment::Unassigned);
        assert_eq!(lab.phi_a[1], VarAssignment::Valid(0)); // (0,1): p1(0) = 0
        assert_eq!(lab.phi_b[0], VarAssignment::Valid(0)); // (1,0): p2(0) = 0
        assert_eq!(lab.phi_b[1], VarAssignment::Valid(1)); // (1,1): p1(1) = 1
        // g = 2 is off the grid: empty labeling.
        let empty = induced_assignment(&inst, &params, 2, &poly(&[1, 1]), &poly(&[0, 2]));
        assert!(empty
            .phi_a
            .iter()
            .chain(empty.phi_b.iter())
            .all(|v| *v == VarAssignment::Unassigned));
        // Value 2 at a hosted point is outside both alphabets: invalid,
        // and the class is dirty through its incident constraints.
        let invalid = induced_assignment(&inst, &params, 0, &poly(&[2]), &poly(&[2]));
        assert_eq!(invalid.phi_a[0], VarAssignment::Invalid);
        assert!(lc_partial_violations(&inst, &invalid).1 > 0);
    }

    #[test]
    fn completeness_selection_verifies_and_decodes() {
        for (gadget, m, p) in [(micro_gadget(2), 2, 3), (gadget_gf5(3), 3, 5)] {
            let sats = enumerate_satisfying(gadget.instance(), Budget::new(1 << 20))
                .unwrap();
            assert_eq!(sats.len(), 2);
            let mut selections = Vec::new();
            for lambda in &sats {
                let sel = gadget.community_from_labeling(lambda).unwrap();
                assert_eq!(sel.size(), m * p, "m copies per field element");
                assert!(is_community(
                    gadget.graph(),
                    &sel,
                    frac(1, 1),
                    gadget.params().epsilon()
                )
                .unwrap());
                let report = gadget.check_structure_claim(&sel).unwrap();
                assert!(report.passes(), "problems: {:?}", report.problems);
                assert_eq!(report.labeling.as_ref().unwrap(), lambda);
                selections.push(sel);
            }
            assert_ne!(selections[0], selections[1]);
        }
    }

    #[test]
    fn aux_attachment_into_a_full_community_is_exact()
    {
        let gadget = micro_gadget(2);
        let sats = enumerate_satisfying(gadget.instance(), Budget::new(1 << 20)).unwrap();
        let sel = gadget.community_from_labeling(&sats[0]).unwrap();
        // Every aux group touches exactly p - 1 = 2 of the 6 selected
        // vertices: one per other field element, at its own copy index.
        for g_idx in 0..3 {
            for i in 0..2 {
                let aux = gadget.aux_group(g_idx, i);
                let attachment: usize = gadget
                    .graph()
                    .group_neighbors(aux)
                    .iter()
                    .map(|&h| sel.counts[h as usize])
                    .sum();
                assert_eq!(attachment, 2);
            }
        }
        // (p-1)/(m*p) = 2/6 = epsilon * (p-1)/p, strictly below epsilon.
        let frac_attach = frac(2, 6);
        let eps = gadget.params().epsilon();
        assert_eq!(frac_attach, eps * frac(2, 3));
        assert!(frac_attach < eps);
    }

    #[test]
    fn structure_claim_rejects_damaged_selections() {
        let gadget = micro_gadget(2);
        let sats = enumerate_satisfying(gadget.instance(), Budget::new(1 << 20)).unwrap();
        let sel = gadget.community_from_labeling(&sats[0]).unwrap();

        // Adding an aux vertex breaks the community property.
        let mut with_aux = sel.clone();
        with_aux.counts[gadget.aux_group(0, 0)] = 1;
        let report = gadget.check_structure_claim(&with_aux).unwrap();
        assert!(!report.passes());
        assert!(report.aux_selected > 0);
        assert!(!report.community);

        // Dropping one field element frees the matching aux twins to
        // reach exactly an epsilon fraction, which the strict weak-tie
        // bound rejects.
        let mut missing = sel.clone();
        for c in 0..gadget.num_classes() {
            if gadget.classes[c].g == 0 {
                for i in 0..2 {
                    missing.counts[gadget.proper_group(c, i)] = 0;
                }
            }
        }
        let report = gadget.check_structure_claim(&missing).unwrap();
        assert!(!report.passes());
        assert_eq!(report.per_field_counts[0], 0);
        assert!(!report.community);
        // The worst outsiders are the dropped vertices themselves (fully
        // attached), and the g = 0 aux twins now reach exactly the
        // epsilon fraction 2/4, which the strict weak-tie bound rejects.
        assert_eq!(report.profile.beta_star, frac(1, 1));
        for i in 0..2 {
            let aux = gadget.aux_group(0, i);
            let attachment: usize = gadget
                .graph()
                .group_neighbors(aux)
                .iter()
                .map(|&h| missing.counts[h as usize])
                .sum();
            assert_eq!(
                Frac::new(attachment as u64, missing.size() as u64),
                gadget.params().epsilon()
            );
        }
    }

    #[test]
    fn counting_matches_satisfying_labelings_at_micro_scale() {
        for (gadget, m) in [(micro_gadget(2), 2), (gadget_gf5(3), 3)] {
            let count = count_communities(
                gadget.graph(),
                frac(1, 1),
                gadget.params().epsilon(),
                2,
                Budget::new(1 << 26),
            )
            .unwrap();
            assert_eq!(count, 2, "m = {}", m);
        }
    }

    #[test]
    fn budget_refusal_reports_vertex_count() {
        let inst = micro_instance();
        let params =
            CountingParams::new(PrimeField::new(13).unwrap(), vec![0, 1, 2], 3).unwrap();
        let err = CountingGadget::build(&inst, params, Budget::new(1_000_000)).unwrap_err();
        match err {
            Error::BudgetExceeded { needed, .. } => {
                // 13^6 classes, 3 copies, plus 2 * 3 * 13 aux.
                assert_eq!(needed, 13u128.pow(6) * 3 + 78);
            }
            other => panic!("expected budget refusal, got {}", other),
        }
    }

    #[test]
    fn params_validation_rejects_bad_shapes() {
        let inst = micro_instance();
        // Grid too small for four variables.
        let tiny = CountingParams::new(PrimeField::new(3).unwrap(), vec![0], 2).unwrap();
        assert!(CountingGadget::build(&inst, tiny, Budget::new(1 << 20)).is_err());
        // Alphabet too large for the field: a 7-symbol side needs p >= 7.
        let clause_side = LabelCoverInstance::new(
            3,
            1,
            2,
            7,
            vec![LcEdge {
                a: 0,
                b: 0,
                constraint: EdgeConstraint::Projection(vec![0, 1]),
            }],
        )
        .unwrap();
        let params = CountingParams::new(PrimeField::new(5).unwrap(), vec![0, 1], 2).unwrap();
        assert!(matches!(
            CountingGadget::build(&clause_side, params, Budget::new(1 << 24)),
            Err(Error::InvalidParameter(_))
        ));
        // Multiplicity below 2.
        assert!(CountingParams::new(PrimeField::new(3).unwrap(), vec![0, 1], 1).is_err());
        // Multiplicity at or above the epsilon margin (|F|-1) * m < p.
        assert!(CountingParams::new(PrimeField::new(3).unwrap(), vec![0, 1], 3).is_err());
        assert!(CountingParams::new(PrimeField::new(5).unwrap(), vec![0, 1], 5).is_err());
    }
}
