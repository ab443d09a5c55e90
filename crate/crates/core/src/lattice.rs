//! Integer lattice algebra: Smith and Hermite normal forms, saturation,
//! quotient projections and unimodular coordinates of sublattices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{AtlasError, Result};
use crate::exact;

/// Dense integer matrix with arbitrary-precision entries, row major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect();
        write!(f, "IntMatrix{:?}", rows)
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have `cols` entries.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix row");
            for (j, &x) in r.iter().enumerate() {
                m.data[i * cols + j] = BigInt::from(x);
            }
        }
        m
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix row");
            data.extend(r);
        }
        IntMatrix {
            rows: n,
            cols,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors of length `height`.
    pub fn from_columns(columns: &[Vec<i64>], height: usize) -> Self {
        Self::from_rows(columns, height).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[i64]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * BigInt::from(v[j]))
                    .sum()
            })
            .collect()
    }

    /// Applies the matrix to a point, failing if a coordinate leaves `i64`.
    pub fn apply_i64(&self, v: &[i64]) -> Result<Vec<i64>> {
        self.apply(v)
            .iter()
            .map(|x| exact::to_i64(x).ok_or(AtlasError::CoordinateOverflow))
            .collect()
    }

    pub fn select_rows(&self, range: std::ops::Range<usize>) -> IntMatrix {
        let rows: Vec<Vec<BigInt>> = range.map(|i| self.row(i)).collect();
        IntMatrix::from_big_rows(rows, self.cols)
    }

    pub fn select_columns(&self, range: std::ops::Range<usize>) -> IntMatrix {
        self.transpose().select_rows(range).transpose()
    }

    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        exact::bareiss_big((0..self.rows).map(|i| self.row(i)).collect())
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs().is_one()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(exact::to_i64).collect())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(dst, j) + q * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, dst) + q * self.get(i, src);
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

/// `u · m · v = d` with `u`, `v` unimodular and `d` diagonal with a
/// divisibility chain of non-negative invariant factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.get(i, i).clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_decompose(m: &IntMatrix) -> SmithForm {
    smith_with_inverse(m).0
}

/// Smith form together with `u⁻¹`, tracked alongside the row operations.
pub(crate) fn smith_with_inverse(m: &IntMatrix) -> (SmithForm, IntMatrix) {
    let (r, c) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut u_inv = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = d.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    let better = match pivot {
                        None => true,
                        Some((pi, pj)) => x.abs() < d.get(pi, pj).abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return finish(u, d, v, u_inv);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..r {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = d.get(i, t) / d.get(t, t);
                let neg = -&q;
                d.add_row_multiple(i, t, &neg);
                u.add_row_multiple(i, t, &neg);
                u_inv.add_col_multiple(t, i, &q);
                if !d.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -(d.get(t, j) / d.get(t, t));
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !d.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let p = d.get(t, t).clone();
            let offender = (t + 1..r).find(|&i| (t + 1..c).any(|j| !d.get(i, j).is_multiple_of(&p)));
            if let Some(i) = offender {
                let one = BigInt::one();
                d.add_row_multiple(t, i, &one);
                u.add_row_multiple(t, i, &one);
                u_inv.add_col_multiple(i, t, &-one);
                continue;
            }
            break;
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }
    finish(u, d, v, u_inv)
}

fn finish(u: IntMatrix, d: IntMatrix, v: IntMatrix, u_inv: IntMatrix) -> (SmithForm, IntMatrix) {
    (SmithForm { u, d, v }, u_inv)
}

/// Row Hermite normal form: the non-zero rows of `w · m` for a unimodular
/// `w`, in echelon form with positive pivots and entries above each pivot
/// reduced into `[0, pivot)`.
pub fn row_hermite(m: &IntMatrix) -> IntMatrix {
    let mut h = m.clone();
    let (rows, cols) = (h.rows, h.cols);
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows {
                if h.get(i, col).is_zero() {
                    continue;
                }
                if best.is_none_or(|b| h.get(i, col).abs() < h.get(b, col).abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(r, b);
            let mut done = true;
            for i in r + 1..rows {
                if h.get(i, col).is_zero() {
                    continue;
                }
                let q = -(h.get(i, col) / h.get(r, col));
                h.add_row_multiple(i, r, &q);
                if !h.get(i, col).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(r, col).is_zero() {
            continue;
        }
        if h.get(r, col).is_negative() {
            h.negate_row(r);
        }
        let p = h.get(r, col).clone();
        for i in 0..r {
            let q = -h.get(i, col).div_floor(&p);
            if !q.is_zero() {
                h.add_row_multiple(i, r, &q);
            }
        }
        r += 1;
    }
    h.select_rows(0..r)
}

/// A sublattice of `Z^n`, stored through a canonical basis: the columns of
/// `basis` are the transposed rows of the Hermite form of any generating set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sublattice {
    ambient_rank: usize,
    basis: IntMatrix,
}

impl Sublattice {
    /// The sublattice generated by arbitrary (possibly dependent) vectors.
    pub fn span(ambient_rank: usize, generators: &[Vec<i64>]) -> Self {
        let m = IntMatrix::from_rows(generators, ambient_rank);
        Self::from_generator_rows(ambient_rank, &m)
    }

    fn from_generator_rows(ambient_rank: usize, rows: &IntMatrix) -> Self {
        let h = row_hermite(rows);
        Sublattice {
            ambient_rank,
            basis: h.transpose(),
        }
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Sublattice {
            ambient_rank,
            basis: IntMatrix::zeros(ambient_rank, 0),
        }
    }

    pub fn full(ambient_rank: usize) -> Self {
        Sublattice {
            ambient_rank,
            basis: IntMatrix::identity(ambient_rank),
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.cols
    }

    /// `ambient_rank × rank` matrix whose columns form a basis.
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<BigInt>> {
        (0..self.rank()).map(|j| self.basis.column(j)).collect()
    }

    /// Coordinates of `p` in the canonical basis, if `p` lies in the lattice.
    pub fn coordinates(&self, p: &[i64]) -> Option<Vec<BigInt>> {
        let rows = self.basis.transpose();
        let target: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
        let mut coeffs = Vec::with_capacity(rows.rows);
        for i in 0..rows.rows {
            let pivot = (0..rows.cols).find(|&j| !rows.get(i, j).is_zero())?;
            let mut acc = target[pivot].clone();
            for (j, c) in coeffs.iter().enumerate() {
                acc -= c * rows.get(j, pivot);
            }
            let (q, rem) = acc.div_rem(rows.get(i, pivot));
            if !rem.is_zero() {
                return None;
            }
            coeffs.push(q);
        }
        let recon: Vec<BigInt> = (0..rows.cols)
            .map(|j| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * rows.get(i, j))
                    .sum()
            })
            .collect();
        (recon == target).then_some(coeffs)
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.coordinates(p).is_some()
    }

    pub fn is_saturated(&self) -> bool {
        smith_decompose(&self.basis)
            .invariant_factors()
            .iter()
            .all(|f| f.is_one())
    }
}

/// The saturation: the largest sublattice of the same rank containing `s`.
pub fn saturate(s: &Sublattice) -> Sublattice {
    let (snf, u_inv) = smith_with_inverse(&s.basis);
    let rank = snf.rank();
    let cols = u_inv.select_columns(0..rank);
    Sublattice::from_generator_rows(s.ambient_rank, &cols.transpose())
}

/// Surjection `Z^n → Z^{n - rank}` whose kernel is exactly `saturate(s)`,
/// in row Hermite form.
pub fn quotient_map(ambient_rank: usize, s: &Sublattice) -> IntMatrix {
    assert_eq!(ambient_rank, s.ambient_rank, "sublattice of a different ambient");
    let snf = smith_decompose(&s.basis);
    let rank = snf.rank();
    let tail = snf.u.select_rows(rank..ambient_rank);
    if tail.rows == 0 {
        return tail;
    }
    row_hermite(&tail)
}

/// A `rank × n` integer map restricting to an isomorphism
/// `saturate(s) → Z^rank`; it sends the canonical saturated basis to the
/// standard basis.
pub fn unimodular_coordinates(s: &Sublattice) -> IntMatrix {
    let sat = saturate(s);
    let snf = smith_decompose(&sat.basis);
    let r = sat.rank();
    snf.v.mul(&snf.u.select_rows(0..r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>], cols: usize) -> IntMatrix {
        IntMatrix::from_rows(rows, cols)
    }

    fn check_snf(a: &IntMatrix) -> SmithForm {
        let s = smith_decompose(a);
        assert!(s.u.is_unimodular());
        assert!(s.v.is_unimodular());
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert!(s.d.is_diagonal());
        let f = s.invariant_factors();
        for w in f.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        s
    }

    #[test]
    fn snf_diag_2_3() {
        let s = check_snf(&m(&[vec![2, 0], vec![0, 3]], 2));
        assert_eq!(s.d, m(&[vec![1, 0], vec![0, 6]], 2));
    }

    #[test]
    fn snf_identity_and_scalar() {
        let s = check_snf(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        let s = check_snf(&m(&[vec![2]], 1));
        assert_eq!(s.d, m(&[vec![2]], 1));
        assert_eq!(s.u, m(&[vec![1]], 1));
        assert_eq!(s.v, m(&[vec![1]], 1));
    }

    #[test]
    fn snf_rectangular_and_degenerate() {
        check_snf(&m(&[vec![4, 6, 8], vec![6, 9, 12]], 3));
        check_snf(&m(&[vec![0, 0], vec![0, 0], vec![0, 0]], 2));
        check_snf(&IntMatrix::zeros(2, 0));
        let s = check_snf(&m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3));
        assert_eq!(
            s.invariant_factors(),
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
    }

    #[test]
    fn saturation_examples() {
        let s = saturate(&Sublattice::span(2, &[vec![2, 0]]));
        assert_eq!(s, Sublattice::span(2, &[vec![1, 0]]));
        let s = saturate(&Sublattice::span(2, &[vec![1, 1]]));
        assert_eq!(s, Sublattice::span(2, &[vec![1, 1]]));
        let s = saturate(&Sublattice::span(2, &[vec![2, 0], vec![0, 3]]));
        assert_eq!(s, Sublattice::full(2));
    }

    #[test]
    fn quotient_map_examples() {
        let pi = quotient_map(2, &Sublattice::span(2, &[vec![1, 0]]));
        assert_eq!(pi, m(&[vec![0, 1]], 2));
        let pi = quotient_map(2, &Sublattice::span(2, &[vec![1, 1]]));
        assert_eq!(pi.apply(&[1, 1]), vec![BigInt::zero()]);
        assert_eq!(pi.rows(), 1);
        // surjective: some lattice vector maps to 1
        assert!(pi.row(0).iter().any(|x| x.abs().is_one()));
        let pi = quotient_map(2, &Sublattice::zero(2));
        assert_eq!(pi, IntMatrix::identity(2));
    }

    #[test]
    fn coordinates_examples() {
        let c = unimodular_coordinates(&Sublattice::span(2, &[vec![2, 0]]));
        assert_eq!(c.apply(&[1, 0]), vec![BigInt::one()]);
        let c = unimodular_coordinates(&Sublattice::full(2));
        assert!(c.is_unimodular());
        let c = unimodular_coordinates(&Sublattice::span(2, &[vec![1, 1]]));
        assert_eq!(c.apply(&[1, 1]), vec![BigInt::one()]);
    }

    #[test]
    fn hermite_is_canonical() {
        let a = Sublattice::span(3, &[vec![1, 2, 3], vec![4, 5, 6]]);
        let b = Sublattice::span(3, &[vec![3, 3, 3], vec![1, 2, 3], vec![5, 7, 9]]);
        assert_eq!(a, b);
        assert!(a.contains(&[2, 1, 0]));
        assert!(!a.contains(&[1, 0, 0]));
        assert!(!Sublattice::span(2, &[vec![2, 0]]).is_saturated());
    }
}
