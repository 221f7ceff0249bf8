//! Anatomy of the decision gadget: proper vertices are balanced subsets
//! of field elements paired with consistent line-polynomial families,
//! and a satisfying labeling lights up one vertex per subset as a
//! (1, eps)-community.

use communitylab::budget::Budget;
use communitylab::decision::{BuildMode, DecisionGadget, DecisionParams};
use communitylab::field::PrimeField;
use communitylab::graph::{is_community, profile};
use communitylab::labelcover::{EdgeConstraint, LabelCoverInstance, Labeling, LcEdge};
use communitylab::frac;

fn main() {
    let budget = Budget::from_env();
    // Two projection edges on a 2 x 2 instance; labeling a = [0, 0],
    // b = [0, 2] satisfies both.
    let inst = LabelCoverInstance::new(
        2,
        2,
        2,
        3,
        vec![
            LcEdge {
                a: 0,
                b: 0,
                constraint: EdgeConstraint::Projection(vec![0, 1]),
            },
            LcEdge {
                a: 1,
                b: 1,
                constraint: EdgeConstraint::Projection(vec![2, 0]),
            },
        ],
    )
    .unwrap();
    let params = DecisionParams {
        field: PrimeField::new(7).unwrap(),
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
        aux_cap: 16,
    };
    let gadget = DecisionGadget::build(&inst, params, BuildMode::Explicit, budget).unwrap();
    println!(
        "balanced subsets (size 2, one element from each side block): {:?}",
        gadget.balanced_subsets()
    );
    println!(
        "{} proper vertices ({} assignment families per subset), {} aux groups of multiplicity {}",
        gadget.proper_count(),
        gadget.families_per_subset(),
        gadget.aux_specs().len(),
        gadget.m_aux()
    );

    // The completeness witness: restrict the labeling's low-degree
    // encoding to each balanced subset's rows and columns.
    let lambda = Labeling::total(vec![0, 0], vec![0, 2]);
    let sel = gadget.community_from_labeling(&lambda).unwrap();
    let p = profile(gadget.graph(), &sel).unwrap();
    println!(
        "completeness selection: size {}, alpha* = {}, beta* = {}",
        p.size, p.alpha_star, p.beta_star
    );
    println!(
        "passes at (1, 1/2): {}",
        is_community(gadget.graph(), &sel, frac(1, 1), frac(1, 2)).unwrap()
    );

    // A corrupted family (one table digit bumped) attaches to the
    // witness well below the eps threshold.
    let member = (0..gadget.proper_count())
        .find(|&g| sel.counts[g] == 1)
        .unwrap();
    let fam = gadget
        .family_index(&gadget.vertex(member).unwrap())
        .unwrap();
    let corrupted = gadget.vertex_id(0, (fam + 1) % gadget.families_per_subset());
    let touching: usize = sel
        .counts
        .iter()
        .enumerate()
        .filter(|&(h, &c)| c > 0 && gadget.graph().group_adjacent(corrupted, h))
        .map(|(_, &c)| c)
        .sum();
    println!(
        "perturbed vertex covers {} of the witness's {} members, below the eps = 1/2 threshold",
        touching, p.size
    );
}
