//! Anatomy of the counting gadget: enumerate its communities, check the
//! structural claim (m proper vertices per field element, consistent
//! polynomial pair, no aux), and decode each one back to an assignment.

use communitylab::budget::Budget;
use communitylab::counting::{CountingGadget, CountingParams};
use communitylab::field::PrimeField;
use communitylab::graph::enumerate_communities;
use communitylab::labelcover::{reduce_3sat, Cnf3};
use communitylab::frac;

fn main() {
    let budget = Budget::from_env();
    let f = Cnf3::parse_dimacs("p cnf 3 1\n1 2 3 0\n").unwrap();
    let inst = reduce_3sat(&f);
    let params = CountingParams::new(PrimeField::new(7).unwrap(), vec![0, 1], 2).unwrap();
    let gadget = CountingGadget::build(&inst, params, budget).unwrap();
    println!(
        "{} classes ({} proper groups of 2 copies), {} aux groups",
        gadget.num_classes(),
        gadget.num_proper_groups(),
        gadget.graph().num_groups() - gadget.num_proper_groups()
    );

    let communities =
        enumerate_communities(gadget.graph(), frac(1, 1), frac(1, 2), 2, budget).unwrap();
    println!("(1, 1/2)-communities found: {}", communities.len());

    for (i, sel) in communities.iter().enumerate() {
        let report = gadget.check_structure_claim(sel).unwrap();
        assert!(report.passes(), "unexpected structure: {:?}", report.problems);
        let lambda = report.labeling.as_ref().unwrap();
        let value = |v: &communitylab::labelcover::VarAssignment| match v {
            communitylab::labelcover::VarAssignment::Valid(x) => *x,
            other => panic!("decoded labeling must be total, got {:?}", other),
        };
        // phi_a bits are variable values; the clause label is the
        // pattern of true literals, offset by one.
        let assignment: Vec<bool> = lambda.phi_a.iter().map(|v| value(v) == 1).collect();
        println!(
            "community {}: size {}, per-field-element counts {:?}, decodes to x = {:?} (clause pattern {})",
            i,
            sel.size(),
            report.per_field_counts,
            assignment,
            value(&lambda.phi_b[0]) + 1
        );
    }
    println!("each community carries exactly one satisfying assignment, and vice versa");
}
