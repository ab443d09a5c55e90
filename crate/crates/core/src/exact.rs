//! Exact integer kernels shared by the lattice and volume code.
//!
//! Determinants go through fraction-free Bareiss elimination. The `i128`
//! path uses checked arithmetic and falls back to `BigInt` on overflow, so
//! every result is exact regardless of input size.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

fn bareiss_i128(mut m: Vec<Vec<i128>>) -> Option<i128> {
    let n = m.len();
    if n == 0 {
        return Some(1);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let swap = (k + 1..n).find(|&i| m[i][k] != 0);
            match swap {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return Some(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].checked_mul(m[k][k])?;
                let b = m[i][k].checked_mul(m[k][j])?;
                m[i][j] = a.checked_sub(b)? / prev;
            }
        }
        prev = m[k][k];
    }
    m[n - 1][n - 1].checked_mul(sign)
}

pub(crate) fn bareiss_big(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Determinant of a square matrix given by rows of machine integers.
pub fn det_i64(rows: &[Vec<i64>]) -> BigInt {
    let fast: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    match bareiss_i128(fast) {
        Some(v) => BigInt::from(v),
        None => bareiss_big(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        ),
    }
}

/// Sign of `det[p1 - p0, ..., pd - p0]` style determinants, where the rows
/// are already differences.
pub fn det_sign_i64(rows: &[Vec<i64>]) -> i32 {
    let d = det_i64(rows);
    if d.is_positive() {
        1
    } else if d.is_negative() {
        -1
    } else {
        0
    }
}

/// Integer row echelon form kept primitive (each row divided by its content).
///
/// Rows are added one vector at a time; the structure answers rank queries
/// and is cheap to clone, which the subset enumerations rely on.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    width: usize,
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl Echelon {
    pub fn new(width: usize) -> Self {
        Echelon {
            width,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `v`; returns true when it increased the rank.
    pub fn insert(&mut self, v: &[i64]) -> bool {
        debug_assert_eq!(v.len(), self.width);
        let mut w: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        self.insert_big(&mut w)
    }

    pub fn insert_big(&mut self, w: &mut [BigInt]) -> bool {
        for (pivot, row) in &self.rows {
            if w[*pivot].is_zero() {
                continue;
            }
            let a = row[*pivot].clone();
            let b = w[*pivot].clone();
            for j in 0..self.width {
                w[j] = &w[j] * &a - &row[j] * &b;
            }
            make_primitive(w);
        }
        match w.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(p) => {
                make_primitive(w);
                self.rows.push((p, w.to_vec()));
                true
            }
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let mut copy = self.clone();
        !copy.insert(v)
    }
}

fn make_primitive(w: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in w.iter() {
        g = g.gcd(x);
    }
    if !g.is_zero() && !g.is_one() {
        for x in w.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// Rank of a family of integer vectors of common length `width`.
pub fn rank_i64(vectors: &[Vec<i64>], width: usize) -> usize {
    let mut e = Echelon::new(width);
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Affine dimension of a finite point set (-1 would be the empty set; callers
/// never pass one).
pub fn affine_dim(points: &[Vec<i64>]) -> usize {
    let Some(first) = points.first() else {
        return 0;
    };
    let diffs: Vec<Vec<i64>> = points
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    rank_i64(&diffs, first.len())
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Generalized binomial coefficient `x choose k` for any integer `x`.
pub fn binomial(x: i64, k: usize) -> BigInt {
    let mut num = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(x - i as i64);
    }
    num / factorial(k)
}

pub fn to_i64(v: &BigInt) -> Option<i64> {
    i64::try_from(v).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small_cases() {
        assert_eq!(det_i64(&[]), BigInt::one());
        assert_eq!(det_i64(&[vec![5]]), BigInt::from(5));
        assert_eq!(det_i64(&[vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(
            det_i64(&[vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 2]]),
            BigInt::from(6)
        );
    }

    #[test]
    fn det_falls_back_on_overflow() {
        let big = i64::MAX / 2;
        let rows = vec![
            vec![big, 1, 0],
            vec![1, big, 1],
            vec![0, 1, big],
        ];
        let b = BigInt::from(big);
        let expected = &b * &b * &b - &b - &b;
        assert_eq!(det_i64(&rows), expected);
    }

    #[test]
    fn echelon_rank() {
        assert_eq!(rank_i64(&[vec![1, 1], vec![2, 2]], 2), 1);
        assert_eq!(rank_i64(&[vec![1, 1], vec![2, 3]], 2), 2);
        assert_eq!(rank_i64(&[], 3), 0);
        let e = {
            let mut e = Echelon::new(3);
            e.insert(&[1, 0, 1]);
            e.insert(&[0, 2, 0]);
            e
        };
        assert!(e.contains(&[3, -4, 3]));
        assert!(!e.contains(&[0, 0, 1]));
    }

    #[test]
    fn generalized_binomial() {
        assert_eq!(binomial(-1, 1), BigInt::from(-1));
        assert_eq!(binomial(-1, 2), BigInt::from(1));
        assert_eq!(binomial(2, 2), BigInt::from(1));
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(1, 2), BigInt::from(0));
    }
}
