//! Exact lattice volumes, mixed volumes, face lattices and the Cayley
//! volume sum.
//!
//! Volumes are normalized: `d!` times the Euclidean volume measured in
//! unimodular coordinates of the saturated affine span, so a unimodular
//! simplex (and a single point) has volume 1. Hulls come from a placing
//! triangulation with exact integer hyperplanes.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{invariant, AtlasError, Result};
use crate::exact::{self, Echelon};
use crate::lattice::{unimodular_coordinates, Sublattice};
use crate::support::{
    defect, minkowski_pair, saturated_coordinates, IndexSubset, Support, SupportTuple,
};

/// Oriented hyperplane `normal · x = offset`, with the hull on the side
/// `normal · x ≤ offset`.
#[derive(Clone, Debug)]
struct Plane {
    normal: Vec<BigInt>,
    offset: BigInt,
    small: Option<(Vec<i128>, i128)>,
}

impl Plane {
    /// Hyperplane through `d` points of `Z^d`, oriented away from `inner`.
    fn through(verts: &[&Vec<i64>], inner: &[i64]) -> Result<Plane> {
        let d = inner.len();
        let base = verts[0];
        let edges: Vec<Vec<i64>> = verts[1..]
            .iter()
            .map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let mut normal = Vec::with_capacity(d);
        for j in 0..d {
            let minor: Vec<Vec<i64>> = edges
                .iter()
                .map(|e| {
                    e.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let m = exact::det_i64(&minor);
            normal.push(if j % 2 == 0 { m } else { -m });
        }
        let offset: BigInt = normal.iter().zip(base).map(|(n, &x)| n * x).sum();
        let mut plane = Plane {
            normal,
            offset,
            small: None,
        };
        plane.refresh_small();
        match plane.height(inner).sign() {
            num_bigint::Sign::Plus => plane.negate(),
            num_bigint::Sign::Minus => {}
            num_bigint::Sign::NoSign => return Err(invariant("degenerate hull facet")),
        }
        Ok(plane)
    }

    fn refresh_small(&mut self) {
        let n: Option<Vec<i128>> = self.normal.iter().map(|x| i128::try_from(x).ok()).collect();
        let c = i128::try_from(&self.offset).ok();
        self.small = n.zip(c);
    }

    fn negate(&mut self) {
        for x in &mut self.normal {
            *x = -&*x;
        }
        self.offset = -&self.offset;
        self.refresh_small();
    }

    fn small_height(&self, p: &[i64]) -> Option<i128> {
        let (n, c) = self.small.as_ref()?;
        let mut acc: i128 = 0;
        for (a, &x) in n.iter().zip(p) {
            acc = acc.checked_add(a.checked_mul(x as i128)?)?;
        }
        acc.checked_sub(*c)
    }

    /// `normal · p − offset`.
    fn height(&self, p: &[i64]) -> BigInt {
        match self.small_height(p) {
            Some(h) => BigInt::from(h),
            None => {
                self.normal.iter().zip(p).map(|(n, &x)| n * x).sum::<BigInt>() - &self.offset
            }
        }
    }

    fn sign(&self, p: &[i64]) -> i32 {
        match self.small_height(p) {
            Some(h) => h.signum() as i32,
            None => match self.height(p).sign() {
                num_bigint::Sign::Plus => 1,
                num_bigint::Sign::Minus => -1,
                num_bigint::Sign::NoSign => 0,
            },
        }
    }

    /// Primitive normal and offset, used to identify facets of the polytope.
    fn primitive(&self) -> (Vec<BigInt>, BigInt) {
        let g = self
            .normal
            .iter()
            .fold(BigInt::zero(), |g, x| g.gcd(x));
        (
            self.normal.iter().map(|x| x / &g).collect(),
            &self.offset / &g,
        )
    }
}

struct TriFacet {
    verts: Vec<usize>,
    plane: Plane,
    alive: bool,
}

/// Convex hull of a full-dimensional point set in `Z^d`, `d ≥ 1`.
pub(crate) struct Hull {
    pub volume: BigInt,
    /// The placing triangulation, as point-index simplices.
    pub simplices: Vec<Vec<usize>>,
    /// Polytope facets as (primitive outer normal, member point indices).
    pub facets: Vec<(Vec<BigInt>, Vec<usize>)>,
}

impl Hull {
    /// Returns `None` when the points do not span `Z^d` affinely.
    pub fn build(points: &[Vec<i64>], d: usize, with_facets: bool) -> Result<Option<Hull>> {
        if d == 1 {
            return Ok(Self::build_line(points));
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].cmp(&points[b]));

        let mut simplex = vec![order[0]];
        let mut ech = Echelon::new(d);
        for &i in &order[1..] {
            if simplex.len() == d + 1 {
                break;
            }
            let diff: Vec<i64> = points[i]
                .iter()
                .zip(&points[order[0]])
                .map(|(a, b)| a - b)
                .collect();
            if ech.insert(&diff) {
                simplex.push(i);
            }
        }
        if simplex.len() < d + 1 {
            return Ok(None);
        }

        let mut facets: Vec<TriFacet> = Vec::new();
        let mut ridges: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        let mut volume = BigInt::zero();
        let mut simplices = vec![simplex.clone()];
        for skip in 0..=d {
            let mut verts: Vec<usize> = simplex
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != skip)
                .map(|(_, &v)| v)
                .collect();
            verts.sort_unstable();
            let vp: Vec<&Vec<i64>> = verts.iter().map(|&v| &points[v]).collect();
            let plane = Plane::through(&vp, &points[simplex[skip]])?;
            if skip == 0 {
                volume = plane.height(&points[simplex[0]]).abs();
            }
            add_facet(&mut facets, &mut ridges, verts, plane);
        }

        let in_simplex: BTreeSet<usize> = simplex.iter().copied().collect();
        for &p in order.iter().filter(|i| !in_simplex.contains(i)) {
            let pt = &points[p];
            let Some(seed) = (0..facets.len())
                .rev()
                .find(|&f| facets[f].alive && facets[f].plane.sign(pt) > 0)
            else {
                continue;
            };
            let mut visible = vec![seed];
            let mut seen: BTreeSet<usize> = [seed].into_iter().collect();
            let mut queue = VecDeque::from([seed]);
            let mut horizon: Vec<(Vec<usize>, usize)> = Vec::new();
            while let Some(f) = queue.pop_front() {
                let verts = facets[f].verts.clone();
                for skip in 0..verts.len() {
                    let ridge: Vec<usize> = ridge_of(&verts, skip);
                    let other = ridges[&ridge].iter().copied().find(|&g| g != f);
                    let Some(g) = other else {
                        return Err(invariant("open hull boundary"));
                    };
                    if seen.contains(&g) {
                        continue;
                    }
                    if facets[g].plane.sign(pt) > 0 {
                        seen.insert(g);
                        visible.push(g);
                        queue.push_back(g);
                    } else {
                        horizon.push((ridge, verts[skip]));
                    }
                }
            }
            for &f in &visible {
                volume += facets[f].plane.height(pt);
                let mut cell = facets[f].verts.clone();
                cell.push(p);
                simplices.push(cell);
                facets[f].alive = false;
                let verts = facets[f].verts.clone();
                for skip in 0..verts.len() {
                    let ridge = ridge_of(&verts, skip);
                    if let Some(list) = ridges.get_mut(&ridge) {
                        list.retain(|&g| g != f);
                        if list.is_empty() {
                            ridges.remove(&ridge);
                        }
                    }
                }
            }
            for (ridge, opposite) in horizon {
                let mut verts = ridge;
                verts.push(p);
                verts.sort_unstable();
                let vp: Vec<&Vec<i64>> = verts.iter().map(|&v| &points[v]).collect();
                let plane = Plane::through(&vp, &points[opposite])?;
                add_facet(&mut facets, &mut ridges, verts, plane);
            }
        }

        let mut groups = Vec::new();
        if with_facets {
            let mut seen: HashMap<(Vec<BigInt>, BigInt), ()> = HashMap::new();
            for f in facets.iter().filter(|f| f.alive) {
                let key = f.plane.primitive();
                if seen.contains_key(&key) {
                    continue;
                }
                let members: Vec<usize> = (0..points.len())
                    .filter(|&i| {
                        let h: BigInt = key.0.iter().zip(&points[i]).map(|(n, &x)| n * x).sum();
                        h == key.1
                    })
                    .collect();
                groups.push((key.0.clone(), members));
                seen.insert(key, ());
            }
            groups.sort();
        }
        Ok(Some(Hull {
            volume,
            simplices,
            facets: groups,
        }))
    }

    fn build_line(points: &[Vec<i64>]) -> Option<Hull> {
        let lo = points.iter().map(|p| p[0]).min()?;
        let hi = points.iter().map(|p| p[0]).max()?;
        if lo == hi {
            return None;
        }
        let at = |v: i64| -> Vec<usize> { (0..points.len()).filter(|&i| points[i][0] == v).collect() };
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by_key(|&i| points[i][0]);
        order.dedup_by_key(|i| points[*i][0]);
        let cells = order.windows(2).map(|w| w.to_vec()).collect();
        Some(Hull {
            volume: BigInt::from(hi) - BigInt::from(lo),
            simplices: cells,
            facets: vec![
                (vec![BigInt::from(-1)], at(lo)),
                (vec![BigInt::one()], at(hi)),
            ],
        })
    }

    /// Indices of points that are vertices of the hull.
    pub fn vertices(&self, n_points: usize, d: usize) -> Vec<usize> {
        let mut incident: Vec<Vec<&Vec<BigInt>>> = vec![Vec::new(); n_points];
        for (normal, members) in &self.facets {
            for &m in members {
                incident[m].push(normal);
            }
        }
        (0..n_points)
            .filter(|&i| {
                let mut e = Echelon::new(d);
                for n in &incident[i] {
                    let mut w: Vec<BigInt> = (*n).clone();
                    e.insert_big(&mut w);
                    if e.rank() == d {
                        return true;
                    }
                }
                false
            })
            .collect()
    }
}

fn ridge_of(verts: &[usize], skip: usize) -> Vec<usize> {
    verts
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != skip)
        .map(|(_, &v)| v)
        .collect()
}

fn add_facet(
    facets: &mut Vec<TriFacet>,
    ridges: &mut HashMap<Vec<usize>, Vec<usize>>,
    verts: Vec<usize>,
    plane: Plane,
) {
    let id = facets.len();
    for skip in 0..verts.len() {
        ridges.entry(ridge_of(&verts, skip)).or_default().push(id);
    }
    facets.push(TriFacet {
        verts,
        plane,
        alive: true,
    });
}

/// Rewrites a point set in unimodular coordinates of its saturated affine
/// span, keeping the point order. Returns the dimension and the new points.
pub(crate) fn affine_coordinates(points: &[Vec<i64>]) -> Result<(usize, Vec<Vec<i64>>)> {
    let base = &points[0];
    let diffs: Vec<Vec<i64>> = points
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let span = Sublattice::span(base.len(), &diffs);
    let c = unimodular_coordinates(&span);
    let mapped = diffs
        .iter()
        .map(|v| c.apply_i64(v))
        .collect::<Result<Vec<_>>>()?;
    Ok((c.rows(), mapped))
}

/// Normalized volume of the convex hull of a point set in its own affine
/// span; a point has volume 1.
pub fn normalized_volume(a: &Support) -> Result<BigInt> {
    let (d, pts) = affine_coordinates(a.points())?;
    if d == 0 {
        return Ok(BigInt::one());
    }
    match Hull::build(&pts, d, false)? {
        Some(h) => Ok(h.volume),
        None => Err(invariant("affine coordinates are not full dimensional")),
    }
}

/// Normalized `d`-volume of points in `Z^d`; zero when they are not full
/// dimensional. Also returns the vertices, used to prune Minkowski sums.
fn volume_and_vertices(points: &[Vec<i64>], d: usize) -> Result<(BigInt, Vec<Vec<i64>>)> {
    if d == 0 {
        return Ok((BigInt::one(), points.to_vec()));
    }
    if let Some(h) = Hull::build(points, d, true)? {
        let v = h.vertices(points.len(), d);
        return Ok((h.volume, v.into_iter().map(|i| points[i].clone()).collect()));
    }
    let (k, local) = affine_coordinates(points)?;
    if k == 0 {
        return Ok((BigInt::zero(), vec![points[0].clone()]));
    }
    let h = Hull::build(&local, k, true)?
        .ok_or_else(|| invariant("affine coordinates are not full dimensional"))?;
    let v = h.vertices(local.len(), k);
    Ok((BigInt::zero(), v.into_iter().map(|i| points[i].clone()).collect()))
}

/// Mixed volume of `d` point sets already written in `Z^d`, with no
/// renormalization: a deficient family gives 0.
pub(crate) fn mixed_volume_raw(sets: &[Vec<Vec<i64>>], d: usize) -> Result<BigInt> {
    if sets.len() != d {
        return Err(AtlasError::ArityMismatch {
            supports: sets.len(),
            rank: d,
        });
    }
    if d == 0 {
        return Ok(BigInt::one());
    }
    let mut pruned = Vec::with_capacity(d);
    for s in sets {
        pruned.push(volume_and_vertices(s, d)?.1);
    }
    let full = 1usize << d;
    let mut sums: Vec<Option<Support>> = vec![None; full];
    let mut total = BigInt::zero();
    for mask in 1..full {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let piece = Support::new(pruned[low].clone())?;
        let candidate = match &sums[rest] {
            None => piece,
            Some(prev) => minkowski_pair(prev, &piece),
        };
        let (vol, verts) = volume_and_vertices(candidate.points(), d)?;
        let sign = if (d - mask.count_ones() as usize).is_multiple_of(2) { 1 } else { -1 };
        total += vol * sign;
        sums[mask] = Some(Support::new(verts)?);
    }
    let (q, r) = total.div_rem(&exact::factorial(d));
    if !r.is_zero() {
        return Err(invariant("mixed volume polarization is not divisible by d!"));
    }
    if q.is_negative() {
        return Err(invariant("negative mixed volume"));
    }
    Ok(q)
}

/// Mixed volume of a tuple whose number of supports equals the rank of its
/// saturated span, measured in that span.
pub fn mixed_volume(t: &SupportTuple) -> Result<BigInt> {
    let s = saturated_coordinates(t)?;
    let sets: Vec<Vec<Vec<i64>>> = s.supports().iter().map(|x| x.points().to_vec()).collect();
    mixed_volume_raw(&sets, s.ambient_rank())
}

/// Mixed volume of a zero-defect subtuple inside the saturated span of its
/// Minkowski sum.
pub fn mixed_volume_in_span(t: &SupportTuple, s: &IndexSubset) -> Result<BigInt> {
    let dft = defect(t, s)?;
    if dft != 0 {
        return Err(AtlasError::NonzeroDefect(dft));
    }
    mixed_volume(&t.subtuple(s)?)
}

/// A face of `conv(A)`, reported as the points of `A` lying on it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Face {
    pub dim: usize,
    pub subset: Support,
    pub codim_in_a: usize,
}

/// All non-empty faces of `conv(A)`, including `A` itself, sorted by
/// dimension and then by point set.
pub fn face_lattice(a: &Support) -> Result<Vec<Face>> {
    let (d, pts) = affine_coordinates(a.points())?;
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    faces.insert((0..pts.len()).collect());
    if d > 0 {
        let hull = Hull::build(&pts, d, true)?
            .ok_or_else(|| invariant("affine coordinates are not full dimensional"))?;
        let facets: Vec<Vec<usize>> = hull.facets.into_iter().map(|(_, m)| m).collect();
        let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
        for f in &facets {
            if faces.insert(f.clone()) {
                queue.push_back(f.clone());
            }
        }
        while let Some(face) = queue.pop_front() {
            for f in &facets {
                let meet: Vec<usize> = face.iter().copied().filter(|i| f.contains(i)).collect();
                if !meet.is_empty() && faces.insert(meet.clone()) {
                    queue.push_back(meet);
                }
            }
        }
    }
    let mut out: Vec<Face> = faces
        .into_iter()
        .map(|idx| {
            let subset = Support::new(idx.iter().map(|&i| a.points()[i].clone()).collect())?;
            let fd = subset.affine_dim();
            Ok(Face {
                dim: fd,
                subset,
                codim_in_a: d - fd,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

/// Compositions of `total` into `parts` non-negative parts, in
/// lexicographically decreasing order.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `Σ_{a ∈ Δ_k(d)} MV(A_1^{a_1}, …, A_k^{a_k})` with `d` the dimension of
/// the Minkowski sum; equals the normalized volume of the Cayley set.
pub fn cayley_volume_rhs(t: &SupportTuple) -> Result<BigInt> {
    let s = saturated_coordinates(t)?;
    let d = s.ambient_rank();
    let mut total = BigInt::zero();
    for a in compositions(d, s.len()) {
        let sets: Vec<Vec<Vec<i64>>> = a
            .iter()
            .enumerate()
            .flat_map(|(i, &m)| std::iter::repeat_n(s.support(i).points().to_vec(), m))
            .collect();
        total += mixed_volume_raw(&sets, d)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::cayley_set;

    fn sup(pts: &[&[i64]]) -> Support {
        Support::new(pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn tuple(rank: usize, sets: Vec<Support>) -> SupportTuple {
        SupportTuple::new(rank, sets).unwrap()
    }

    #[test]
    fn volume_examples() {
        assert_eq!(normalized_volume(&Support::segment(4)).unwrap(), BigInt::from(4));
        for n in 1..5 {
            assert_eq!(normalized_volume(&Support::standard_simplex(n)).unwrap(), BigInt::one());
        }
        let sq = sup(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(normalized_volume(&sq).unwrap(), BigInt::from(2));
        assert_eq!(normalized_volume(&sup(&[&[3, 3]])).unwrap(), BigInt::one());
        let cube: Vec<Vec<i64>> = (0..8).map(|m| (0..3).map(|b| (m >> b) & 1).collect()).collect();
        assert_eq!(normalized_volume(&Support::new(cube).unwrap()).unwrap(), BigInt::from(6));
        // a diagonal segment is unimodular in its own span
        assert_eq!(normalized_volume(&sup(&[&[0, 0], &[2, 2]])).unwrap(), BigInt::from(2));
    }

    #[test]
    fn volume_ignores_interior_and_coplanar_points() {
        let a = sup(&[&[0, 0], &[4, 0], &[0, 4], &[1, 1], &[2, 0], &[2, 2], &[1, 2]]);
        assert_eq!(normalized_volume(&a).unwrap(), BigInt::from(16));
    }

    #[test]
    fn mixed_volume_examples() {
        for n in 1..4 {
            let t = tuple(n, vec![Support::standard_simplex(n); n]);
            assert_eq!(mixed_volume(&t).unwrap(), BigInt::one());
        }
        let t = tuple(2, vec![sup(&[&[0, 0], &[1, 0]]), sup(&[&[0, 0], &[1, 0], &[0, 1]])]);
        assert_eq!(mixed_volume(&t).unwrap(), BigInt::one());
        let t = tuple(1, vec![Support::segment(2)]);
        assert_eq!(mixed_volume(&t).unwrap(), BigInt::from(2));
        let t = tuple(2, vec![Support::standard_simplex(2); 3]);
        assert!(matches!(mixed_volume(&t), Err(AtlasError::ArityMismatch { .. })));
    }

    #[test]
    fn mixed_volume_in_span_examples() {
        let t = tuple(2, vec![sup(&[&[0, 0], &[2, 0]]), sup(&[&[0, 0], &[0, 1]])]);
        let s = IndexSubset::new(vec![0]);
        assert_eq!(mixed_volume_in_span(&t, &s).unwrap(), BigInt::from(2));
        let t = tuple(2, vec![Support::standard_simplex(2); 2]);
        assert_eq!(mixed_volume_in_span(&t, &t.all()).unwrap(), mixed_volume(&t).unwrap());
        let s = IndexSubset::new(vec![0]);
        assert_eq!(mixed_volume_in_span(&t, &s), Err(AtlasError::NonzeroDefect(1)));
    }

    fn face_counts(a: &Support) -> Vec<usize> {
        let faces = face_lattice(a).unwrap();
        let top = faces.iter().map(|f| f.dim).max().unwrap();
        (0..=top).map(|k| faces.iter().filter(|f| f.dim == k).count()).collect()
    }

    #[test]
    fn face_lattice_examples() {
        let faces = face_lattice(&Support::segment(2)).unwrap();
        let sets: Vec<&Support> = faces.iter().map(|f| &f.subset).collect();
        assert_eq!(sets, vec![&sup(&[&[0]]), &sup(&[&[2]]), &Support::segment(2)]);
        assert_eq!(face_counts(&Support::standard_simplex(2)), vec![3, 3, 1]);
        let t = tuple(2, vec![Support::standard_simplex(2); 2]);
        assert_eq!(face_counts(&cayley_set(&t)), vec![6, 9, 5, 1]);
    }

    #[test]
    fn cayley_rhs_examples() {
        let t = tuple(1, vec![Support::segment(1); 2]);
        assert_eq!(cayley_volume_rhs(&t).unwrap(), BigInt::from(2));
        assert_eq!(normalized_volume(&cayley_set(&t)).unwrap(), BigInt::from(2));
        let a = sup(&[&[0, 0], &[3, 1], &[1, 2]]);
        let t = tuple(2, vec![a.clone()]);
        assert_eq!(cayley_volume_rhs(&t).unwrap(), normalized_volume(&a).unwrap());
        let t = tuple(2, vec![Support::standard_simplex(2); 2]);
        assert_eq!(cayley_volume_rhs(&t).unwrap(), BigInt::from(3));
        assert_eq!(normalized_volume(&cayley_set(&t)).unwrap(), BigInt::from(3));
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(2, 3).len(), 6);
        assert_eq!(compositions(0, 2), vec![vec![0, 0]]);
    }
}
