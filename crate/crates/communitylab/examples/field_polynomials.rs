//! Exact polynomial arithmetic over a small prime field: interpolation,
//! the agreement bound, and low-degree extension of a grid function.

use communitylab::field::{all_polys, Axis, BiPolyTable, PrimeField, UniPoly};

fn main() {
    let f5 = PrimeField::new(5).unwrap();

    // The unique degree <= 2 polynomial through three points.
    let poly = UniPoly::interpolate(f5, &[(0, 1), (1, 3), (2, 2)]).unwrap();
    println!("interpolated coefficients (low to high): {:?}", poly.coeffs());
    for x in f5.elements() {
        println!("  p({}) = {}", x, poly.eval(x));
    }

    // Distinct polynomials of degree <= d agree on at most d points, so
    // low-degree encodings keep distinct data far apart.
    let q = UniPoly::new(f5, vec![2, 0, 1]);
    println!(
        "agreement between {:?} and {:?}: {} of {} points",
        poly.coeffs(),
        q.coeffs(),
        poly.agreement_count(&q),
        f5.order()
    );
    let lines = all_polys(f5, 2);
    let max_agree = lines
        .iter()
        .enumerate()
        .flat_map(|(i, a)| lines[i + 1..].iter().map(move |b| a.agreement_count(b)))
        .max()
        .unwrap();
    println!(
        "all {} degree <= 1 polynomials over GF(5): max pairwise agreement {}",
        lines.len(),
        max_agree
    );

    // Extend a function given on the 2 x 2 grid {0,1} x {0,1} to the
    // whole plane with individual degree below 2 in each variable.
    let grid = [0u64, 1];
    let table = BiPolyTable::low_degree_extend(f5, &grid, |i, j| (i as u64 + 2 * j as u64) % 5)
        .unwrap();
    println!("low-degree extension of (i, j) -> i + 2j on the 2x2 grid:");
    for x in f5.elements() {
        let row: Vec<u64> = f5.elements().map(|y| table.get(x, y)).collect();
        println!("  row {}: {:?}", x, row);
    }
    println!(
        "individual degree at most 1 everywhere: {}",
        table.individual_degree_at_most(1)
    );
    let line = table.restrict_line(Axis::Row, 3);
    println!("row 3 as a polynomial in y: {:?}", line.coeffs());
}
