//! Local Euler obstructions of the projective toric variety of a point set,
//! one value per face, via the relative subdiagram volume recursion
//!
//! `Eu(α) = Σ_{β ⊋ α} (−1)^{dim β − dim α − 1} RSV(β, α) Eu(β)`, `Eu(top) = 1`.
//!
//! The recursion is only valid for normal varieties, so the semigroup
//! generated by the homogenized points is checked for saturation first.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{invariant, AtlasError, Result};
use crate::exact;
use crate::lattice::{quotient_map, smith_with_inverse, unimodular_coordinates, IntMatrix, Sublattice};
use crate::volume::{Face, Hull};

/// Rewrites points in coordinates of the lattice their differences
/// generate, keeping the order. Returns the dimension and the new points.
pub(crate) fn generated_coordinates(points: &[Vec<i64>]) -> Result<(usize, Vec<Vec<i64>>)> {
    let base = &points[0];
    let diffs: Vec<Vec<i64>> = points
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let span = Sublattice::span(base.len(), &diffs);
    let mut out = Vec::with_capacity(diffs.len());
    for v in &diffs {
        let c = span
            .coordinates(v)
            .ok_or_else(|| invariant("difference outside its own span"))?;
        out.push(
            c.iter()
                .map(|x| exact::to_i64(x).ok_or(AtlasError::CoordinateOverflow))
                .collect::<Result<Vec<i64>>>()?,
        );
    }
    Ok((span.rank(), out))
}

/// Euler obstruction of the toric variety of `points` along each face.
/// `faces` lists faces of `conv(points)` by the points they contain.
/// The inner `Err` explains why the value is not available.
pub(crate) fn euler_obstructions(
    points: &[Vec<i64>],
    faces: &[Face],
) -> Result<std::result::Result<Vec<BigInt>, String>> {
    let (d, local) = generated_coordinates(points)?;
    let position: HashMap<&Vec<i64>, usize> =
        points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let members: Vec<Vec<usize>> = faces
        .iter()
        .map(|f| {
            f.subset
                .points()
                .iter()
                .map(|p| position.get(p).copied().ok_or_else(|| invariant("face point outside the set")))
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<_>>()?;
    if d == 0 {
        return Ok(Ok(vec![BigInt::one(); faces.len()]));
    }
    if let Some(reason) = saturation_gap(&local, d)? {
        return Ok(Err(reason));
    }
    let lifted: Vec<Vec<i64>> = local
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q.push(1);
            q
        })
        .collect();

    let sets: Vec<HashSet<usize>> = members.iter().map(|m| m.iter().copied().collect()).collect();
    let mut order: Vec<usize> = (0..faces.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(faces[i].dim));
    let mut eu: Vec<Option<BigInt>> = vec![None; faces.len()];
    for &i in &order {
        if faces[i].dim == d {
            eu[i] = Some(BigInt::one());
            continue;
        }
        let mut total = BigInt::zero();
        for j in 0..faces.len() {
            if faces[j].dim <= faces[i].dim || !sets[i].is_subset(&sets[j]) {
                continue;
            }
            let above = eu[j]
                .as_ref()
                .ok_or_else(|| invariant("face visited before a larger one"))?;
            let rsv = relative_subdiagram_volume(&lifted, &members[i], &members[j])?;
            let term = rsv * above;
            if (faces[j].dim - faces[i].dim - 1).is_multiple_of(2) {
                total += term;
            } else {
                total -= term;
            }
        }
        eu[i] = Some(total);
    }
    Ok(Ok(eu.into_iter().map(|e| e.expect("every face visited")).collect()))
}

/// Normalized volume of the region of the cone of `β` (projected along the
/// span of `α`) lying below the convex hull of its nonzero semigroup points.
fn relative_subdiagram_volume(lifted: &[Vec<i64>], alpha: &[usize], beta: &[usize]) -> Result<BigInt> {
    let n = lifted[0].len();
    let gens: Vec<Vec<i64>> = alpha.iter().map(|&i| lifted[i].clone()).collect();
    let pi = quotient_map(n, &Sublattice::span(n, &gens));
    let images: Vec<Vec<i64>> = beta
        .iter()
        .filter(|i| !alpha.contains(i))
        .map(|&i| pi.apply_i64(&lifted[i]))
        .collect::<Result<_>>()?;
    let c = unimodular_coordinates(&Sublattice::span(pi.rows(), &images));
    let k = c.rows();
    let mut cloud: Vec<Vec<i64>> = Vec::with_capacity(2 * images.len());
    for v in &images {
        let g = c.apply_i64(v)?;
        if g.iter().all(|&x| x == 0) {
            return Err(invariant("face point projects to the origin"));
        }
        cloud.push(g.iter().map(|x| 2 * x).collect());
        cloud.push(g);
    }
    cloud.sort();
    cloud.dedup();
    let hull = Hull::build(&cloud, k, true)?
        .ok_or_else(|| invariant("projected cone is not full dimensional"))?;
    let mut total = BigInt::zero();
    for (normal, on) in &hull.facets {
        let offset: BigInt = normal
            .iter()
            .zip(&cloud[on[0]])
            .map(|(a, &x)| a * x)
            .sum();
        if !offset.is_negative() {
            continue;
        }
        let mut pyramid = vec![vec![0i64; k]];
        pyramid.extend(on.iter().map(|&m| cloud[m].clone()));
        let cone = Hull::build(&pyramid, k, false)?
            .ok_or_else(|| invariant("flat pyramid over a bounded facet"))?;
        total += cone.volume;
    }
    Ok(total)
}

/// Checks that the semigroup generated by `(p, 1)` for `p ∈ points` contains
/// every lattice point of its cone. `points` must affinely generate `Z^d`.
/// Returns a description of a missing point, if any.
fn saturation_gap(points: &[Vec<i64>], d: usize) -> Result<Option<String>> {
    let hull = Hull::build(points, d, false)?
        .ok_or_else(|| invariant("generated coordinates are not full dimensional"))?;
    let mut sums: Vec<HashSet<Vec<i64>>> = vec![[vec![0i64; d]].into_iter().collect()];
    for cell in &hull.simplices {
        let cols: Vec<Vec<i64>> = cell
            .iter()
            .map(|&i| {
                let mut q = points[i].clone();
                q.push(1);
                q
            })
            .collect();
        let v = IntMatrix::from_columns(&cols, d + 1);
        if v.determinant().abs().is_one() {
            continue;
        }
        for p in parallelepiped_points(&v)? {
            let h = p[d];
            let h = usize::try_from(h).map_err(|_| invariant("negative height in the cone"))?;
            while sums.len() <= h {
                let last = sums.last().expect("nonempty");
                let mut next = HashSet::new();
                for s in last {
                    for q in points {
                        next.insert(s.iter().zip(q).map(|(a, b)| a + b).collect::<Vec<i64>>());
                    }
                }
                sums.push(next);
            }
            if !sums[h].contains(&p[..d]) {
                return Ok(Some(format!(
                    "the toric variety is not normal: {:?} at height {} is not a sum of points",
                    &p[..d],
                    h
                )));
            }
        }
    }
    Ok(None)
}

/// Nonzero lattice points `Σ λ_i v_i` with `0 ≤ λ_i < 1`, where `v_i` are
/// the columns of the nonsingular square matrix `v`.
fn parallelepiped_points(v: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    let n = v.rows();
    let (snf, u_inv) = smith_with_inverse(v);
    let moduli: Vec<i64> = (0..n)
        .map(|i| exact::to_i64(snf.d.get(i, i)).ok_or(AtlasError::CoordinateOverflow))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut digits = vec![0i64; n];
    loop {
        if digits.iter().any(|&x| x != 0) {
            let x = u_inv.apply(&digits);
            let lambda = solve(v, &x)?;
            let shift: Vec<i64> = lambda
                .iter()
                .map(|l| exact::to_i64(&l.floor().to_integer()).ok_or(AtlasError::CoordinateOverflow))
                .collect::<Result<_>>()?;
            let back = v.apply(&shift);
            let p: Vec<i64> = x
                .iter()
                .zip(&back)
                .map(|(a, b)| exact::to_i64(&(a - b)).ok_or(AtlasError::CoordinateOverflow))
                .collect::<Result<_>>()?;
            out.push(p);
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            digits[i] += 1;
            if digits[i] < moduli[i] {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Solves `m · λ = x` over the rationals for a nonsingular square `m`.
fn solve(m: &IntMatrix, x: &[BigInt]) -> Result<Vec<BigRational>> {
    let n = m.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = m.row(i).into_iter().map(BigRational::from_integer).collect();
            row.push(BigRational::from_integer(x[i].clone()));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| invariant("singular simplex matrix"))?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for x in &mut a[col][col..] {
            *x /= &p;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, q) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= q * &f;
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n].clone()).collect())
}
