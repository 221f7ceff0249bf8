//! Build a small graph by hand and inspect (alpha, beta)-community
//! profiles: every member's closed neighborhood must cover an alpha
//! fraction of the set, every outsider at most a beta fraction.
//!
//! Groups bundle mutually twin vertices (same neighbors, never adjacent
//! to each other), so a selection is a count per group rather than a
//! vertex list.

use communitylab::budget::Budget;
use communitylab::graph::{
    is_community, max_gap, profile, GraphBuilder, Group, SubsetSelection,
};
use communitylab::frac;

fn main() {
    // A triangle a-b-c, a pendant d hanging off c, and a twin pair e
    // (two vertices with identical neighbors b and c).
    let groups = vec![
        Group::plain("a"),
        Group::plain("b"),
        Group::plain("c"),
        Group::plain("d"),
        Group::new(serde_json::json!("e-twins"), 2),
    ];
    let mut b = GraphBuilder::new(groups);
    b.add_edge(0, 1);
    b.add_edge(0, 2);
    b.add_edge(1, 2);
    b.add_edge(2, 3);
    b.add_edge(4, 1);
    b.add_edge(4, 2);
    let graph = b.build("triangle with pendant and twin pair");
    println!(
        "{} groups, {} vertices",
        graph.num_groups(),
        graph.num_vertices()
    );

    let describe = |name: &str, sel: &SubsetSelection| {
        let p = profile(&graph, sel).unwrap();
        println!(
            "{}: size {}, alpha* = {} (weakest member cover), beta* = {} (strongest outsider pull)",
            name, p.size, p.alpha_star, p.beta_star
        );
    };

    let triangle = SubsetSelection::from_groups(graph.num_groups(), &[0, 1, 2]);
    describe("triangle {a,b,c}", &triangle);
    println!(
        "  is a (1, 1/2)-community: {}",
        is_community(&graph, &triangle, frac(1, 1), frac(1, 2)).unwrap()
    );

    // Both e-twins plus their shared neighbors; twins are never adjacent
    // to each other, which caps alpha* below 1.
    let mut twins = SubsetSelection::empty(graph.num_groups());
    twins.counts[4] = 2;
    twins.counts[1] = 1;
    twins.counts[2] = 1;
    describe("twin pair with {b,c}", &twins);

    // beta* = 0 means no outsider touches the set at all; such sets pass
    // every beta, even beta = 0.
    let isolated = SubsetSelection::from_groups(graph.num_groups(), &[0, 1, 2, 3]);
    let mut everything = isolated.clone();
    everything.counts[4] = 2;
    describe("whole graph", &everything);
    println!(
        "  is a (1/3, 0)-community: {} (beta* = 0 satisfies even beta = 0)",
        is_community(&graph, &everything, frac(1, 3), frac(0, 1)).unwrap()
    );

    // The largest alpha* - beta* margin over all nonempty selections.
    let (gap, witness) = max_gap(&graph, Budget::from_env()).unwrap();
    let p = profile(&graph, &witness).unwrap();
    println!(
        "max gap {} attained by counts {:?} (alpha* = {}, beta* = {})",
        gap, witness.counts, p.alpha_star, p.beta_star
    );
}
