//! Randomly partition a bi-regular Label Cover instance into
//! equal-size variable blocks and certify near-uniform edge spread:
//! every block pair must carry close to its expected share of edges.

use communitylab::gen::gen_random_biregular_lc;
use communitylab::partition::{contiguous_blocks, random_partition, PairCheck};
use communitylab::SFrac;
use num_traits::Signed;

fn main() {
    let inst = gen_random_biregular_lc(1000, 1000, 10, 10, 2, 2, 42).unwrap();
    let (d_a, d_b) = inst.regularity.unwrap();
    println!(
        "instance: {} x {} vertices, regular degrees ({}, {}), {} edges",
        inst.n_a,
        inst.n_b,
        d_a,
        d_b,
        inst.edges.len()
    );

    // B-side blocks are fixed contiguous runs; the A side is shuffled
    // and re-drawn until the certificate passes or retries run out.
    let rho = 100;
    let t_blocks = contiguous_blocks(inst.n_b, rho).unwrap();
    let (partition, report) = random_partition(&inst, &t_blocks, rho, 42, 10).unwrap();
    println!("{}", report.summary());
    println!(
        "first A-block starts with {:?}",
        &partition.blocks[0][..8.min(partition.blocks[0].len())]
    );
    let deviation = |p: &&PairCheck| {
        let count = SFrac::new(p.count as i64, 1);
        let target = SFrac::new(*p.target.numer() as i64, *p.target.denom() as i64);
        (count - target).abs()
    };
    let worst = report.pairs.iter().max_by_key(deviation).unwrap();
    println!(
        "worst block pair ({}, {}): {} edges against target {}",
        worst.i, worst.j, worst.count, worst.target
    );
    assert!(report.pass);
}
