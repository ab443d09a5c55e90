//! Supports, tuples of supports, index subsets and the operations on them:
//! defects, normalization, quotient tuples, Minkowski sums and Cayley sets.

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{AtlasError, Result};
use crate::exact::{self, Echelon};
use crate::lattice::{quotient_map, saturate, unimodular_coordinates, Sublattice};

/// A finite non-empty set of integer points of a common dimension, stored
/// sorted and without duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Support {
    points: Vec<Vec<i64>>,
}

impl Support {
    pub fn new(mut points: Vec<Vec<i64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(AtlasError::EmptySupport(0));
        };
        let dim = first.len();
        if let Some(bad) = points.iter().find(|p| p.len() != dim) {
            return Err(AtlasError::DimensionMismatch {
                point: bad.clone(),
                found: bad.len(),
                expected: dim,
            });
        }
        points.sort();
        points.dedup();
        Ok(Support { points })
    }

    /// The single point of the rank-0 lattice.
    pub fn origin(dim: usize) -> Self {
        Support {
            points: vec![vec![0; dim]],
        }
    }

    /// `{0, e_1, ..., e_n}` in `Z^n`.
    pub fn standard_simplex(n: usize) -> Self {
        let mut points = vec![vec![0; n]];
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            points.push(e);
        }
        Support::new(points).expect("simplex is well formed")
    }

    /// `{0, 1, ..., d}` in `Z^1`.
    pub fn segment(d: i64) -> Self {
        Support::new((0..=d).map(|x| vec![x]).collect()).expect("segment is well formed")
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Length of the coordinate vectors.
    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Dimension of the affine span.
    pub fn affine_dim(&self) -> usize {
        exact::affine_dim(&self.points)
    }

    /// Points minus the lexicographically smallest point.
    pub fn difference_vectors(&self) -> Vec<Vec<i64>> {
        let base = &self.points[0];
        self.points[1..]
            .iter()
            .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
            .collect()
    }

    pub fn translate(&self, v: &[i64]) -> Support {
        Support {
            points: self
                .points
                .iter()
                .map(|p| p.iter().zip(v).map(|(a, b)| a + b).collect())
                .collect(),
        }
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.points.binary_search_by(|q| q.as_slice().cmp(p)).is_ok()
    }

    /// Applies an integer matrix to every point, collapsing duplicate images.
    pub fn map_linear(&self, m: &crate::lattice::IntMatrix) -> Result<Support> {
        let points = self
            .points
            .iter()
            .map(|p| m.apply_i64(p))
            .collect::<Result<Vec<_>>>()?;
        if m.rows() == 0 {
            return Ok(Support::origin(0));
        }
        Support::new(points)
    }
}

/// A subset of tuple indices, sorted and duplicate-free (0-based).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct IndexSubset {
    indices: Vec<usize>,
}

impl IndexSubset {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        IndexSubset { indices }
    }

    pub fn empty() -> Self {
        IndexSubset::default()
    }

    pub fn full(k: usize) -> Self {
        IndexSubset {
            indices: (0..k).collect(),
        }
    }

    pub fn from_mask(mask: u64) -> Self {
        IndexSubset {
            indices: (0..64).filter(|i| mask >> i & 1 == 1).collect(),
        }
    }

    /// Bit mask of the subset; every index must be below 64.
    pub fn mask(&self) -> u64 {
        self.indices.iter().fold(0, |m, &i| m | 1 << i)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &IndexSubset) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    /// Indices of `0..k` outside the subset.
    pub fn complement(&self, k: usize) -> IndexSubset {
        IndexSubset {
            indices: (0..k).filter(|&i| !self.contains(i)).collect(),
        }
    }

    pub fn union(&self, other: &IndexSubset) -> IndexSubset {
        let mut v = self.indices.clone();
        v.extend_from_slice(&other.indices);
        IndexSubset::new(v)
    }

    pub fn minus(&self, other: &IndexSubset) -> IndexSubset {
        IndexSubset {
            indices: self
                .indices
                .iter()
                .copied()
                .filter(|&i| !other.contains(i))
                .collect(),
        }
    }
}

impl fmt::Display for IndexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl From<&[usize]> for IndexSubset {
    fn from(v: &[usize]) -> Self {
        IndexSubset::new(v.to_vec())
    }
}

/// An ordered tuple of supports in `Z^ambient_rank`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SupportTuple {
    ambient_rank: usize,
    supports: Vec<Support>,
}

impl SupportTuple {
    pub fn new(ambient_rank: usize, supports: Vec<Support>) -> Result<Self> {
        if supports.is_empty() {
            return Err(AtlasError::EmptyTuple);
        }
        for s in &supports {
            if s.dim() != ambient_rank {
                let p = s.points[0].clone();
                return Err(AtlasError::DimensionMismatch {
                    found: p.len(),
                    point: p,
                    expected: ambient_rank,
                });
            }
        }
        Ok(SupportTuple {
            ambient_rank,
            supports,
        })
    }

    /// Builds a tuple from raw point lists, reporting empty supports by index.
    pub fn from_points(ambient_rank: usize, supports: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        if supports.is_empty() {
            return Err(AtlasError::EmptyTuple);
        }
        let mut out = Vec::with_capacity(supports.len());
        for (i, pts) in supports.into_iter().enumerate() {
            if pts.is_empty() {
                return Err(AtlasError::EmptySupport(i));
            }
            if let Some(bad) = pts.iter().find(|p| p.len() != ambient_rank) {
                return Err(AtlasError::DimensionMismatch {
                    point: bad.clone(),
                    found: bad.len(),
                    expected: ambient_rank,
                });
            }
            out.push(Support::new(pts)?);
        }
        SupportTuple::new(ambient_rank, out)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    pub fn supports(&self) -> &[Support] {
        &self.supports
    }

    pub fn support(&self, i: usize) -> &Support {
        &self.supports[i]
    }

    pub fn all(&self) -> IndexSubset {
        IndexSubset::full(self.len())
    }

    pub fn check_subset(&self, s: &IndexSubset) -> Result<()> {
        match s.indices.iter().find(|&&i| i >= self.len()) {
            Some(&index) => Err(AtlasError::IndexOutOfRange {
                index,
                len: self.len(),
            }),
            None => Ok(()),
        }
    }

    /// The subtuple on `s`, in increasing index order.
    pub fn subtuple(&self, s: &IndexSubset) -> Result<SupportTuple> {
        self.check_subset(s)?;
        if s.is_empty() {
            return Err(AtlasError::EmptySubset);
        }
        Ok(SupportTuple {
            ambient_rank: self.ambient_rank,
            supports: s.indices.iter().map(|&i| self.supports[i].clone()).collect(),
        })
    }

    /// Reorders supports so that new position `j` holds old support `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> SupportTuple {
        SupportTuple {
            ambient_rank: self.ambient_rank,
            supports: perm.iter().map(|&i| self.supports[i].clone()).collect(),
        }
    }

    /// Difference vectors of the supports on `s`, which span the linear
    /// space parallel to the Minkowski sum.
    pub fn span_generators(&self, s: &IndexSubset) -> Vec<Vec<i64>> {
        s.indices
            .iter()
            .flat_map(|&i| self.supports[i].difference_vectors())
            .collect()
    }

    /// Dimension of the affine span of the Minkowski sum over `s`.
    pub fn span_dim(&self, s: &IndexSubset) -> usize {
        let mut e = Echelon::new(self.ambient_rank);
        for v in self.span_generators(s) {
            e.insert(&v);
        }
        e.rank()
    }

    /// Saturated linear span of the translated supports on `s`.
    pub fn saturated_span(&self, s: &IndexSubset) -> Sublattice {
        saturate(&Sublattice::span(self.ambient_rank, &self.span_generators(s)))
    }
}

/// How a tuple was normalized: `original_i = translations[i] + Σ_j new_j · basis[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Normalization {
    pub translations: Vec<Vec<i64>>,
    #[serde(serialize_with = "crate::document::big_rows")]
    pub basis: Vec<Vec<BigInt>>,
    pub rank: usize,
}

/// Translates every support to contain the origin (by its lexicographically
/// smallest point) and rewrites it in a basis of the lattice generated by
/// the translated points, so the result spans its ambient lattice.
pub fn normalize(t: &SupportTuple) -> Result<(SupportTuple, Normalization)> {
    let translations: Vec<Vec<i64>> = t.supports.iter().map(|s| s.points[0].clone()).collect();
    let lattice = Sublattice::span(t.ambient_rank, &t.span_generators(&t.all()));
    let rank = lattice.rank();
    let mut supports = Vec::with_capacity(t.len());
    for (s, shift) in t.supports.iter().zip(&translations) {
        let mut pts = Vec::with_capacity(s.len());
        for p in &s.points {
            let diff: Vec<i64> = p.iter().zip(shift).map(|(a, b)| a - b).collect();
            let coords = lattice
                .coordinates(&diff)
                .ok_or_else(|| crate::error::invariant("translated point outside its span"))?;
            let coords = coords
                .iter()
                .map(|c| exact::to_i64(c).ok_or(AtlasError::CoordinateOverflow))
                .collect::<Result<Vec<_>>>()?;
            pts.push(coords);
        }
        supports.push(Support::new(pts)?);
    }
    Ok((
        SupportTuple {
            ambient_rank: rank,
            supports,
        },
        Normalization {
            translations,
            basis: lattice.basis_vectors(),
            rank,
        },
    ))
}

/// Translates each support to contain the origin and rewrites the tuple in
/// unimodular coordinates of the saturated span of the whole tuple.
pub fn saturated_coordinates(t: &SupportTuple) -> Result<SupportTuple> {
    let span = Sublattice::span(t.ambient_rank, &t.span_generators(&t.all()));
    let c = unimodular_coordinates(&span);
    let supports = t
        .supports
        .iter()
        .map(|s| {
            let shift: Vec<i64> = s.points[0].iter().map(|x| -x).collect();
            let moved = s.translate(&shift);
            if c.rows() == 0 {
                Ok(Support::origin(0))
            } else {
                moved.map_linear(&c)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    SupportTuple::new(c.rows(), supports)
}

/// `dim(affine span of Σ_{i∈s} A_i) − |s|`.
pub fn defect(t: &SupportTuple, s: &IndexSubset) -> Result<i64> {
    t.check_subset(s)?;
    if s.is_empty() {
        return Err(AtlasError::EmptySubset);
    }
    Ok(t.span_dim(s) as i64 - s.len() as i64)
}

/// Projects the supports outside `b` along the saturated span of the
/// supports in `b`.
pub fn quotient_tuple(t: &SupportTuple, b: &IndexSubset) -> Result<SupportTuple> {
    t.check_subset(b)?;
    if b.is_empty() {
        return Err(AtlasError::EmptySubset);
    }
    if b.len() == t.len() {
        return Err(AtlasError::FullSubset);
    }
    let span = Sublattice::span(t.ambient_rank, &t.span_generators(b));
    let pi = quotient_map(t.ambient_rank, &span);
    let supports = b
        .complement(t.len())
        .indices
        .iter()
        .map(|&i| t.supports[i].map_linear(&pi))
        .collect::<Result<Vec<_>>>()?;
    SupportTuple::new(pi.rows(), supports)
}

/// Pointwise sum set of a non-empty list of supports of one dimension.
pub fn minkowski_sum(supports: &[Support]) -> Result<Support> {
    let Some(first) = supports.first() else {
        return Err(AtlasError::EmptyTuple);
    };
    let mut acc = first.clone();
    for s in &supports[1..] {
        if s.dim() != acc.dim() {
            return Err(AtlasError::DimensionMismatch {
                point: s.points[0].clone(),
                found: s.dim(),
                expected: acc.dim(),
            });
        }
        acc = minkowski_pair(&acc, s);
    }
    Ok(acc)
}

pub(crate) fn minkowski_pair(a: &Support, b: &Support) -> Support {
    let mut pts = Vec::with_capacity(a.len() * b.len());
    for p in &a.points {
        for q in &b.points {
            pts.push(p.iter().zip(q).map(|(x, y)| x + y).collect());
        }
    }
    pts.sort();
    pts.dedup();
    Support { points: pts }
}

/// `∪_i A_i × {e_i}` in `Z^{n+k}`.
pub fn cayley_set(t: &SupportTuple) -> Support {
    let k = t.len();
    let mut pts = Vec::new();
    for (i, s) in t.supports.iter().enumerate() {
        for p in &s.points {
            let mut q = p.clone();
            q.extend((0..k).map(|j| i64::from(j == i)));
            pts.push(q);
        }
    }
    Support::new(pts).expect("Cayley set is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(rank: usize, sets: &[&[&[i64]]]) -> SupportTuple {
        SupportTuple::from_points(
            rank,
            sets.iter()
                .map(|s| s.iter().map(|p| p.to_vec()).collect())
                .collect(),
        )
        .unwrap()
    }

    fn idx(v: &[usize]) -> IndexSubset {
        IndexSubset::new(v.to_vec())
    }

    #[test]
    fn normalize_examples() {
        let (n, meta) = normalize(&tuple(1, &[&[&[5], &[6]]])).unwrap();
        assert_eq!(n, tuple(1, &[&[&[0], &[1]]]));
        assert_eq!(meta.translations, vec![vec![5]]);

        let (n, _) = normalize(&tuple(2, &[&[&[0, 0], &[2, 2]]])).unwrap();
        assert_eq!(n, tuple(1, &[&[&[0], &[1]]]));

        let t = tuple(2, &[&[&[0, 0], &[1, 0]], &[&[0, 0], &[0, 1]]]);
        assert_eq!(normalize(&t).unwrap().0, t);
    }

    #[test]
    fn normalize_reconstructs_points() {
        let t = tuple(3, &[&[&[1, 1, 1], &[3, 1, 5]], &[&[0, 2, 0], &[2, 4, 2], &[4, 4, 6]]]);
        let (n, meta) = normalize(&t).unwrap();
        assert_eq!(n.ambient_rank(), 2);
        for (i, s) in n.supports().iter().enumerate() {
            for p in s.points() {
                let orig: Vec<BigInt> = (0..3)
                    .map(|c| {
                        let mut v = BigInt::from(meta.translations[i][c]);
                        for (j, x) in p.iter().enumerate() {
                            v += &meta.basis[j][c] * x;
                        }
                        v
                    })
                    .collect();
                let o: Vec<i64> = orig.iter().map(|x| i64::try_from(x).unwrap()).collect();
                assert!(t.support(i).contains(&o));
            }
        }
    }

    #[test]
    fn defect_examples() {
        let t = tuple(1, &[&[&[0], &[1]], &[&[0], &[1]]]);
        assert_eq!(defect(&t, &idx(&[0, 1])).unwrap(), -1);
        let s = SupportTuple::new(3, vec![Support::standard_simplex(3)]).unwrap();
        assert_eq!(defect(&s, &idx(&[0])).unwrap(), 2);
        let t = tuple(2, &[&[&[0, 0], &[1, 0]], &[&[0, 0], &[0, 1]]]);
        assert_eq!(defect(&t, &idx(&[0, 1])).unwrap(), 0);
        assert_eq!(defect(&t, &idx(&[])), Err(AtlasError::EmptySubset));
    }

    #[test]
    fn quotient_examples() {
        let t = tuple(2, &[&[&[0, 0], &[1, 0]], &[&[0, 0], &[1, 0], &[0, 1]]]);
        assert_eq!(quotient_tuple(&t, &idx(&[0])).unwrap(), tuple(1, &[&[&[0], &[1]]]));

        let t = tuple(1, &[&[&[0], &[1]], &[&[0], &[2]]]);
        let q = quotient_tuple(&t, &idx(&[0])).unwrap();
        assert_eq!(q.ambient_rank(), 0);
        assert_eq!(q.support(0).points(), &[Vec::<i64>::new()]);

        let t = tuple(
            3,
            &[
                &[&[0, 0, 0], &[1, 0, 0]],
                &[&[0, 0, 0], &[0, 1, 0]],
                &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]],
            ],
        );
        assert_eq!(quotient_tuple(&t, &idx(&[0, 1])).unwrap(), tuple(1, &[&[&[0], &[1]]]));
        assert_eq!(quotient_tuple(&t, &idx(&[0, 1, 2])), Err(AtlasError::FullSubset));
    }

    #[test]
    fn minkowski_examples() {
        let s = Support::segment(1);
        assert_eq!(minkowski_sum(&[s.clone(), s.clone()]).unwrap(), Support::segment(2));
        let a = Support::new(vec![vec![3, 1], vec![0, 2]]).unwrap();
        assert_eq!(minkowski_sum(&[a.clone(), Support::origin(2)]).unwrap(), a);
        let e1 = Support::new(vec![vec![0, 0], vec![1, 0]]).unwrap();
        let e2 = Support::new(vec![vec![0, 0], vec![0, 1]]).unwrap();
        let sq = Support::new(vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        assert_eq!(minkowski_sum(&[e1, e2]).unwrap(), sq);
    }

    #[test]
    fn cayley_examples() {
        let t = tuple(1, &[&[&[0], &[1]], &[&[0], &[1]]]);
        let c = cayley_set(&t);
        let expect = Support::new(vec![
            vec![0, 1, 0],
            vec![1, 1, 0],
            vec![0, 0, 1],
            vec![1, 0, 1],
        ])
        .unwrap();
        assert_eq!(c, expect);
        assert_eq!(c.affine_dim(), 2);

        let c = cayley_set(&tuple(1, &[&[&[0], &[1]]]));
        assert_eq!(c.points(), &[vec![0, 1], vec![1, 1]]);
        assert_eq!(c.affine_dim(), 1);

        let c = cayley_set(&tuple(1, &[&[&[0]], &[&[0]]]));
        assert_eq!(c.affine_dim(), 1);
    }
}
