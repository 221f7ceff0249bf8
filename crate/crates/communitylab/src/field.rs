//! Prime-field arithmetic, univariate interpolation and bivariate
//! low-degree extension tables.
//!
//! Everything is exact: elements are canonical residues in `0..p`, and all
//! products go through `u128` so any 64-bit prime is safe.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The field GF(p) for a prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Construct GF(p), rejecting composite or trivial moduli.
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn order(&self) -> u64 {
        self.p
    }

    /// Canonical residue of an arbitrary integer.
    pub fn elem(&self, v: u64) -> u64 {
        v % self.p
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        debug_assert!(a < self.p);
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        debug_assert!(base < self.p);
        let mut acc = 1u64 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; zero has none.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero(self.p));
        }
        Ok(self.pow(a, self.p - 2))
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64> {
        Ok(self.mul(a, self.inv(b)?))
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).is_some_and(|sq| sq <= n) {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A univariate polynomial over GF(p), stored as coefficients in ascending
/// degree order with trailing zeros trimmed (the zero polynomial has an
/// empty coefficient vector).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UniPoly {
    field: PrimeField,
    coeffs: Vec<u64>,
}

impl UniPoly {
    pub fn new(field: PrimeField, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c = field.elem(*c);
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        UniPoly { field, coeffs }
    }

    pub fn zero(field: PrimeField) -> Self {
        UniPoly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficients padded with zeros to exactly `len` entries.
    ///
    /// Panics if the polynomial does not fit, so only call with
    /// `len > degree`.
    pub fn coeffs_padded(&self, len: usize) -> Vec<u64> {
        assert!(
            self.coeffs.len() <= len,
            "degree {} polynomial does not fit in {} coefficients",
            self.coeffs.len().saturating_sub(1),
            len
        );
        let mut out = self.coeffs.clone();
        out.resize(len, 0);
        out
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: u64) -> u64 {
        let f = self.field;
        let x = f.elem(x);
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = f.add(f.mul(acc, x), c);
        }
        acc
    }

    /// Lagrange interpolation through `points = [(x_i, y_i)]`.
    ///
    /// The result has degree below `points.len()`; duplicate abscissae are
    /// rejected.
    pub fn interpolate(field: PrimeField, points: &[(u64, u64)]) -> Result<Self> {
        let n = points.len();
        for (i, &(xi, _)) in points.iter().enumerate() {
            for &(xj, _) in &points[..i] {
                if field.elem(xi) == field.elem(xj) {
                    return Err(Error::DuplicateInterpolationPoint(field.elem(xi)));
                }
            }
        }
        let mut acc = vec![0u64; n.max(1)];
        for (i, &(xi, yi)) in points.iter().enumerate() {
            let xi = field.elem(xi);
            let yi = field.elem(yi);
            if yi == 0 {
                continue;
            }
            // Basis numerator: product of (x - x_j) over j != i.
            let mut basis = vec![1u64];
            let mut denom = 1u64;
            for (j, &(xj, _)) in points.iter().enumerate() {
                if j == i {
                    continue;
                }
                let xj = field.elem(xj);
                basis = poly_mul_linear(field, &basis, field.neg(xj));
                denom = field.mul(denom, field.sub(xi, xj));
            }
            let scale = field.mul(yi, field.inv(denom)?);
            for (k, &b) in basis.iter().enumerate() {
                acc[k] = field.add(acc[k], field.mul(b, scale));
            }
        }
        Ok(UniPoly::new(field, acc))
    }

    /// Number of field points where the two polynomials evaluate equally.
    pub fn agreement_count(&self, other: &UniPoly) -> usize {
        assert_eq!(self.field, other.field, "polynomials over different fields");
        self.field
            .elements()
            .filter(|&x| self.eval(x) == other.eval(x))
            .count()
    }
}

/// Multiply `poly` by the linear factor `(x + c)`.
fn poly_mul_linear(field: PrimeField, poly: &[u64], c: u64) -> Vec<u64> {
    let mut out = vec![0u64; poly.len() + 1];
    for (k, &a) in poly.iter().enumerate() {
        out[k] = field.add(out[k], field.mul(a, c));
        out[k + 1] = field.add(out[k + 1], a);
    }
    out
}

/// Every polynomial of degree below `bound`, in lexicographic coefficient
/// order (constant coefficient fastest). There are p^bound of them.
pub fn all_polys(field: PrimeField, bound: usize) -> Vec<UniPoly> {
    let p = field.order();
    let total = (p as u128).pow(bound as u32);
    assert!(total <= 1 << 24, "polynomial family too large to enumerate");
    let mut out = Vec::with_capacity(total as usize);
    let mut coeffs = vec![0u64; bound];
    loop {
        out.push(UniPoly::new(field, coeffs.clone()));
        let mut k = 0;
        loop {
            if k == bound {
                return out;
            }
            coeffs[k] += 1;
            if coeffs[k] < p {
                break;
            }
            coeffs[k] = 0;
            k += 1;
        }
    }
}

/// Which way a bivariate table is being sliced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    /// Fix the first coordinate; the slice is a polynomial in `y`.
    Row,
    /// Fix the second coordinate; the slice is a polynomial in `x`.
    Col,
}

/// A bivariate function GF(p) x GF(p) -> GF(p) stored as a full value
/// table, `values[x * p + y] = P(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiPolyTable {
    field: PrimeField,
    values: Vec<u64>,
}

/// Largest field order for which a full p x p table stays cheap.
const MAX_TABLE_ORDER: u64 = 4096;

impl BiPolyTable {
    pub fn from_fn(field: PrimeField, f: impl Fn(u64, u64) -> u64) -> Result<Self> {
        let p = field.order();
        if p > MAX_TABLE_ORDER {
            return Err(Error::InvalidParameter(format!(
                "field order {} too large for a dense bivariate table",
                p
            )));
        }
        let mut values = vec![0u64; (p * p) as usize];
        for x in 0..p {
            for y in 0..p {
                values[(x * p + y) as usize] = field.elem(f(x, y));
            }
        }
        Ok(BiPolyTable { field, values })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn get(&self, x: u64, y: u64) -> u64 {
        let p = self.field.order();
        debug_assert!(x < p && y < p);
        self.values[(x * p + y) as usize]
    }

    /// Low-degree extension of a function given on the grid `f x f`.
    ///
    /// `on_grid(i, j)` must return the value at `(f[i], f[j])`. The result
    /// is the unique table with individual degree below `f.len()` in each
    /// variable agreeing with the input on the grid, built by extending
    /// rows first and then columns.
    pub fn low_degree_extend(
        field: PrimeField,
        f: &[u64],
        on_grid: impl Fn(usize, usize) -> u64,
    ) -> Result<Self> {
        let p = field.order();
        if f.is_empty() {
            return Err(Error::InvalidParameter(
                "interpolation set is empty".into(),
            ));
        }
        if f.len() as u64 > p {
            return Err(Error::InvalidParameter(format!(
                "interpolation set has {} points but the field only has {}",
                f.len(),
                p
            )));
        }
        for (i, &a) in f.iter().enumerate() {
            if a >= p {
                return Err(Error::InvalidParameter(format!(
                    "interpolation point {} outside GF({})",
                    a, p
                )));
            }
            if f[..i].contains(&a) {
                return Err(Error::DuplicateInterpolationPoint(a));
            }
        }
        // Stage 1: for each grid row a = f[i], extend along y.
        let mut rows_extended = Vec::with_capacity(f.len());
        for i in 0..f.len() {
            let pts: Vec<(u64, u64)> = f
                .iter()
                .enumerate()
                .map(|(j, &b)| (b, field.elem(on_grid(i, j))))
                .collect();
            let row_poly = UniPoly::interpolate(field, &pts)?;
            let row_vals: Vec<u64> = (0..p).map(|y| row_poly.eval(y)).collect();
            rows_extended.push(row_vals);
        }
        // Stage 2: for each y, extend along x.
        BiPolyTable::from_fn(field, |x, y| {
            let pts: Vec<(u64, u64)> = f
                .iter()
                .enumerate()
                .map(|(i, &a)| (a, rows_extended[i][y as usize]))
                .collect();
            // Interpolation points were validated distinct above.
            UniPoly::interpolate(field, &pts).unwrap().eval(x)
        })
    }

    /// The slice with one coordinate pinned to `g`, as the unique
    /// polynomial of degree below p through all p points of the slice.
    pub fn restrict_line(&self, axis: Axis, g: u64) -> UniPoly {
        let p = self.field.order();
        assert!(g < p);
        let pts: Vec<(u64, u64)> = (0..p)
            .map(|t| match axis {
                Axis::Row => (t, self.get(g, t)),
                Axis::Col => (t, self.get(t, g)),
            })
            .collect();
        UniPoly::interpolate(self.field, &pts).unwrap()
    }

    /// True when every row and column slice has degree at most `d`.
    pub fn individual_degree_at_most(&self, d: usize) -> bool {
        self.field.elements().all(|g| {
            self.restrict_line(Axis::Row, g).degree().unwrap_or(0) <= d
                && self.restrict_line(Axis::Col, g).degree().unwrap_or(0) <= d
        })
    }
}
