//! From a 3SAT formula to a Label Cover instance to a graph whose
//! (1, 1/m)-communities are in bijection with the satisfying
//! assignments, so counting communities counts models exactly.

use communitylab::budget::Budget;
use communitylab::counting::{build_counting_graph, CountingParams};
use communitylab::field::PrimeField;
use communitylab::graph::count_communities;
use communitylab::labelcover::{enumerate_satisfying, lc_value, reduce_3sat, Cnf3};
use communitylab::frac;

fn main() {
    let budget = Budget::from_env();
    let f = Cnf3::parse_dimacs("p cnf 3 1\n1 2 3 0\n").unwrap();
    println!(
        "formula: {} variables, {} clauses",
        f.num_vars(),
        f.clauses().len()
    );

    // Variables become A-vertices with true/false labels; each clause
    // becomes a B-vertex labeled by one of the 7 ways to satisfy it.
    // Every edge checks one literal slot.
    let inst = reduce_3sat(&f);
    println!(
        "label cover: {} x {} vertices, alphabets {} and {}, {} edges",
        inst.n_a,
        inst.n_b,
        inst.sigma_a,
        inst.sigma_b,
        inst.edges.len()
    );
    let satisfying = enumerate_satisfying(&inst, budget).unwrap();
    println!("total satisfying labelings: {}", satisfying.len());
    println!(
        "value of the first one (fraction of satisfied edges): {}",
        lc_value(&inst, &satisfying[0]).unwrap()
    );

    // The parsimonious gadget: labelings become tables of values on a
    // 2 x 2 grid, extended to low-degree polynomials over GF(7)^2; a
    // proper vertex is one field element's view of such a table, made in
    // m = 2 interchangeable copies, so epsilon = 1/2.
    let params = CountingParams::new(PrimeField::new(7).unwrap(), vec![0, 1], 2).unwrap();
    let graph = build_counting_graph(&inst, params, budget).unwrap();
    println!(
        "gadget graph: {} groups, {} vertices",
        graph.num_groups(),
        graph.num_vertices()
    );
    let count = count_communities(&graph, frac(1, 1), frac(1, 2), 2, budget).unwrap();
    println!("(1, 1/2)-communities of size >= 2: {}", count);
    println!("one clause over three variables has exactly 7 satisfying assignments");
    assert_eq!(count, 7);
}
