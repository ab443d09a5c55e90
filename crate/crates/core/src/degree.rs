//! Degree formulas: resultant degrees through the flat lift, circuit and
//! essential sums, the face-sum formula with Euler obstructions, lir degrees,
//! component degrees and the Cayley product.
//!
//! Every formula first rewrites its input in the lattice the input itself
//! generates, since degrees of discriminants and resultants depend only on
//! that lattice.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::classify::{circuits, classify, TupleKind};
use crate::error::{invariant, AtlasError, Result};
use crate::euler::euler_obstructions;
use crate::exact;
use crate::poset::{build_poset, is_irreducible_bk, BkPoset, IrrClass};
use crate::support::{cayley_set, defect, normalize, IndexSubset, Support, SupportTuple};
use crate::volume::{affine_coordinates, face_lattice, mixed_volume_raw, normalized_volume, Face};

/// A degree, or the reason it could not be computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegreeValue {
    Known(BigInt),
    Unsupported { reason: String },
    /// The face sum came out non-positive: the set is dual defective at the
    /// requested codimension.
    NotAHypersurface { value: BigInt },
}

impl DegreeValue {
    pub fn known(&self) -> Option<&BigInt> {
        match self {
            DegreeValue::Known(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_known(&self) -> bool {
        matches!(self, DegreeValue::Known(_))
    }
}

impl fmt::Display for DegreeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeValue::Known(v) => write!(f, "{v}"),
            DegreeValue::Unsupported { reason } => write!(f, "unsupported ({reason})"),
            DegreeValue::NotAHypersurface { value } => {
                write!(f, "not a hypersurface (face sum {value})")
            }
        }
    }
}

impl Serialize for DegreeValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::document::degree_json(self).serialize(s)
    }
}

/// The lift `A × Δ_δ` of a negative-defect subtuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatTuple {
    pub base: SupportTuple,
    pub delta: usize,
    pub lifted: SupportTuple,
}

fn normalized_subtuple(t: &SupportTuple, s: &IndexSubset) -> Result<SupportTuple> {
    Ok(normalize(&t.subtuple(s)?)?.0)
}

fn point_sets(t: &SupportTuple) -> Vec<Vec<Vec<i64>>> {
    t.supports().iter().map(|s| s.points().to_vec()).collect()
}

pub fn flat_tuple(t: &SupportTuple, m: &IndexSubset) -> Result<FlatTuple> {
    let dft = defect(t, m)?;
    if dft >= 0 {
        return Err(AtlasError::NonnegativeDefect(dft));
    }
    let delta = (-dft) as usize;
    let base = normalized_subtuple(t, m)?;
    let d = base.ambient_rank();
    let simplex = Support::standard_simplex(delta);
    let lifted = base
        .supports()
        .iter()
        .map(|a| {
            let mut pts = Vec::with_capacity(a.len() * (delta + 1));
            for p in a.points() {
                for q in simplex.points() {
                    let mut v = p.clone();
                    v.extend_from_slice(q);
                    pts.push(v);
                }
            }
            Support::new(pts)
        })
        .collect::<Result<Vec<_>>>()?;
    let lifted = SupportTuple::new(d + delta, lifted)?;
    if defect(&lifted, &lifted.all())? != 0 {
        return Err(invariant("lifted tuple has nonzero defect"));
    }
    if !is_irreducible_bk(&lifted)? {
        return Err(AtlasError::Precondition(format!(
            "the lift of {m} is reducible; {m} is not the minimal-defect subtuple"
        )));
    }
    Ok(FlatTuple {
        base,
        delta,
        lifted,
    })
}

/// Degree of the sparse resultant of `m`: the mixed volume of its lift.
pub fn resultant_degree(t: &SupportTuple, m: &IndexSubset) -> Result<BigInt> {
    let flat = flat_tuple(t, m)?;
    let mv = mixed_volume_raw(&point_sets(&flat.lifted), flat.lifted.ambient_rank())?;
    if !mv.is_positive() {
        return Err(invariant(format!("resultant of {m} has degree {mv}")));
    }
    Ok(mv)
}

/// `Σ_{C ∈ c} MV(c \ C)` for the unique circuit `c`.
pub fn circuit_mixed_degree(t: &SupportTuple, c: &IndexSubset) -> Result<BigInt> {
    let all = circuits(t)?;
    if all.len() != 1 {
        return Err(AtlasError::NotUniqueCircuit(all.len()));
    }
    if &all[0] != c {
        return Err(AtlasError::Precondition(format!(
            "{c} is not the circuit {}",
            all[0]
        )));
    }
    let base = normalized_subtuple(t, c)?;
    let sets = point_sets(&base);
    let mut total = BigInt::zero();
    for skip in 0..sets.len() {
        let rest: Vec<Vec<Vec<i64>>> = sets
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, s)| s.clone())
            .collect();
        total += mixed_volume_raw(&rest, base.ambient_rank())?;
    }
    Ok(total)
}

/// Sum of mixed volumes of all subtuples with `dim⟨t⟩` supports.
pub fn essential_resultant_degree(t: &SupportTuple) -> Result<BigInt> {
    let class = classify(t)?;
    if class.kind != TupleKind::LinearlyDependent || !class.essential {
        return Err(AtlasError::NotEssentialDependent);
    }
    let (base, _) = normalize(t)?;
    let d = base.ambient_rank();
    let sets = point_sets(&base);
    let mut total = BigInt::zero();
    for mask in 1u64..1 << sets.len() {
        if mask.count_ones() as usize != d {
            continue;
        }
        let chosen: Vec<Vec<Vec<i64>>> = (0..sets.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| sets[i].clone())
            .collect();
        total += mixed_volume_raw(&chosen, d)?;
    }
    Ok(total)
}

/// Signed Euler obstruction of a face, or why it is not available.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EulerValue {
    Value(i64),
    Unsupported(String),
}

/// Checks that every vertex of `conv(a)` has exactly `dim a` edges whose
/// primitive directions `w` satisfy `v + w ∈ a` and form a lattice basis.
/// Returns the failing vertex description on failure.
pub fn smoothness_certificate(a: &Support) -> Result<std::result::Result<(), String>> {
    let (d, pts) = affine_coordinates(a.points())?;
    if d == 0 {
        return Ok(Ok(()));
    }
    let local = Support::new(pts.clone())?;
    let faces = face_lattice(&local)?;
    let back = |p: &Vec<i64>| -> Vec<i64> {
        let i = pts.iter().position(|q| q == p).expect("point of the set");
        a.points()[i].clone()
    };
    for vertex in faces.iter().filter(|f| f.dim == 0) {
        let v = &vertex.subset.points()[0];
        let edges: Vec<&Face> = faces
            .iter()
            .filter(|f| f.dim == 1 && f.subset.contains(v))
            .collect();
        if edges.len() != d {
            return Ok(Err(format!(
                "vertex {:?} lies on {} edges, expected {}",
                back(v),
                edges.len(),
                d
            )));
        }
        let mut dirs = Vec::with_capacity(d);
        for e in edges {
            let other = e
                .subset
                .points()
                .iter()
                .find(|p| *p != v)
                .expect("edge has two points");
            let diff: Vec<i64> = other.iter().zip(v).map(|(x, y)| x - y).collect();
            let g = diff.iter().fold(0i64, |g, &x| g.gcd(&x));
            let w: Vec<i64> = diff.iter().map(|x| x / g).collect();
            let step: Vec<i64> = v.iter().zip(&w).map(|(x, y)| x + y).collect();
            if !local.contains(&step) {
                return Ok(Err(format!(
                    "vertex {:?}: the first lattice point along an edge is missing",
                    back(v)
                )));
            }
            dirs.push(w);
        }
        if !exact::det_i64(&dirs).abs().is_one() {
            return Ok(Err(format!("vertex {:?}: edge directions are not a lattice basis", back(v))));
        }
    }
    Ok(Ok(()))
}

/// `(−1)^{dim a − dim f} Eu(f)`, where `Eu` is the local Euler obstruction
/// of the toric variety of `a` along the orbit of `f`. Unsupported when the
/// variety is not normal.
pub fn signed_euler_obstruction(a: &Support, f: &Face) -> Result<EulerValue> {
    let faces = face_lattice(a)?;
    let Some(at) = faces.iter().position(|g| g.subset == f.subset) else {
        return Err(AtlasError::Precondition("not a face of the set".into()));
    };
    Ok(match obstructions(a, &faces)? {
        Ok(eu) => {
            let v = exact::to_i64(&eu[at]).ok_or(AtlasError::CoordinateOverflow)?;
            EulerValue::Value(sign_for(a.affine_dim() - f.dim) * v)
        }
        Err(reason) => EulerValue::Unsupported(reason),
    })
}

/// Euler obstructions per face; all ones once smoothness is certified.
fn obstructions(a: &Support, faces: &[Face]) -> Result<std::result::Result<Vec<BigInt>, String>> {
    if smoothness_certificate(a)?.is_ok() {
        return Ok(Ok(vec![BigInt::one(); faces.len()]));
    }
    euler_obstructions(a.points(), faces)
}

fn sign_for(codim: usize) -> i64 {
    if codim.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Evaluates `Σ_faces e · coefficient(dim face) · Vol(face)` on `a`
/// rewritten in the lattice it generates.
fn face_sum(a: &Support, coefficient: impl Fn(usize) -> BigInt) -> Result<std::result::Result<BigInt, String>> {
    let single = SupportTuple::new(a.dim(), vec![a.clone()])?;
    let (n, _) = normalize(&single)?;
    let a = n.support(0);
    let faces = face_lattice(a)?;
    let eu = match obstructions(a, &faces)? {
        Ok(eu) => eu,
        Err(reason) => return Ok(Err(reason)),
    };
    let top = a.affine_dim();
    let mut total = BigInt::zero();
    for (f, eu) in faces.iter().zip(eu) {
        let e = sign_for(top - f.dim);
        total += coefficient(f.dim) * normalized_volume(&f.subset)? * eu * e;
    }
    Ok(Ok(total))
}

fn positive(value: BigInt) -> DegreeValue {
    if value.is_positive() {
        DegreeValue::Known(value)
    } else {
        DegreeValue::NotAHypersurface { value }
    }
}

/// `Σ_{A′} e^{A′,A} (binom(dim A′ − 1, δ) + (−1)^{δ+1}(δ+1)) Vol(A′)`.
pub fn matsui_takeuchi_degree(a: &Support, codim: usize) -> Result<DegreeValue> {
    if codim == 0 {
        return Err(AtlasError::Precondition("codimension must be positive".into()));
    }
    let tail = BigInt::from(codim as i64 + 1) * sign_for(codim + 1);
    let sum = face_sum(a, |dim| exact::binomial(dim as i64 - 1, codim) + &tail)?;
    Ok(match sum {
        Ok(v) => positive(v),
        Err(reason) => DegreeValue::Unsupported { reason },
    })
}

/// `c(c+1)/2`.
pub fn lir_degree(c: u64) -> Result<BigInt> {
    if c == 0 {
        return Err(AtlasError::Precondition("lir degree needs c ≥ 1".into()));
    }
    Ok(BigInt::from(c) * BigInt::from(c + 1) / 2)
}

/// Degree of the component of element `a`, computed on the Cayley set of
/// its principal ideal with the branch matching its class, and checked
/// against the general face-sum formula.
pub fn component_degree(t: &SupportTuple, p: &BkPoset, a: usize) -> Result<DegreeValue> {
    let el = p.element(a);
    let cay = cayley_set(&t.subtuple(&el.principal_ideal)?);
    let branch = match el.irr_class {
        IrrClass::Nir => face_sum(&cay, |dim| BigInt::from(dim as i64 + 1))?,
        IrrClass::Lir => {
            let twice = face_sum(&cay, |dim| {
                BigInt::from(dim as i64 + 1) * BigInt::from(dim as i64 - 4)
            })?;
            match twice {
                Ok(v) if v.is_odd() => return Err(invariant(format!("odd lir face sum {v}"))),
                Ok(v) => Ok(v / 2),
                Err(reason) => Err(reason),
            }
        }
    };
    let value = match branch {
        Ok(v) => v,
        Err(reason) => return Ok(DegreeValue::Unsupported { reason }),
    };
    let codim = match el.irr_class {
        IrrClass::Nir => 1,
        IrrClass::Lir => 2,
    };
    let check = matsui_takeuchi_degree(&cay, codim)?;
    let expected = positive(value);
    if check != expected {
        return Err(invariant(format!(
            "component {} degree {expected} disagrees with the face-sum formula {check}",
            el.principal_ideal
        )));
    }
    Ok(expected)
}

/// Product of the component degrees over the maximal poset elements.
pub fn cayley_degree(t: &SupportTuple) -> Result<DegreeValue> {
    let p = build_poset(t)?;
    cayley_degree_of(t, &p)
}

pub(crate) fn cayley_degree_of(t: &SupportTuple, p: &BkPoset) -> Result<DegreeValue> {
    let mut product = BigInt::from(1);
    for a in p.maximal_elements() {
        match component_degree(t, p, a)? {
            DegreeValue::Known(v) => product *= v,
            other => return Ok(other),
        }
    }
    Ok(DegreeValue::Known(product))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sup(pts: &[&[i64]]) -> Support {
        Support::new(pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn segs(ds: &[i64]) -> SupportTuple {
        SupportTuple::new(1, ds.iter().map(|&d| Support::segment(d)).collect()).unwrap()
    }

    fn known(v: i64) -> DegreeValue {
        DegreeValue::Known(BigInt::from(v))
    }

    #[test]
    fn flat_tuple_examples() {
        let t = segs(&[1, 1]);
        let f = flat_tuple(&t, &t.all()).unwrap();
        let square = sup(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(f.lifted.supports(), &[square.clone(), square]);
        let t = segs(&[1, 1, 1]);
        let f = flat_tuple(&t, &t.all()).unwrap();
        assert_eq!(f.delta, 2);
        assert_eq!(f.lifted.ambient_rank(), 3);
        assert_eq!(f.lifted.support(0).len(), 6);
        let t = SupportTuple::new(2, vec![Support::standard_simplex(2); 2]).unwrap();
        assert_eq!(flat_tuple(&t, &t.all()), Err(AtlasError::NonnegativeDefect(0)));
    }

    #[test]
    fn resultant_degree_examples() {
        let t = segs(&[2, 3]);
        assert_eq!(resultant_degree(&t, &t.all()).unwrap(), BigInt::from(5));
        let t = segs(&[1, 1]);
        assert_eq!(resultant_degree(&t, &t.all()).unwrap(), BigInt::from(2));
        let t = segs(&[1, 1, 1]);
        assert_eq!(resultant_degree(&t, &t.all()).unwrap(), BigInt::from(3));
        let t = SupportTuple::new(1, vec![sup(&[&[0], &[2]]); 2]).unwrap();
        assert_eq!(resultant_degree(&t, &t.all()).unwrap(), BigInt::from(2));
    }

    #[test]
    fn circuit_and_essential_examples() {
        let t = segs(&[1, 1]);
        assert_eq!(circuit_mixed_degree(&t, &t.all()).unwrap(), BigInt::from(2));
        let t = segs(&[2, 3]);
        assert_eq!(circuit_mixed_degree(&t, &t.all()).unwrap(), BigInt::from(5));
        assert_eq!(essential_resultant_degree(&t).unwrap(), BigInt::from(5));
        let t = segs(&[1, 1, 1]);
        assert_eq!(
            circuit_mixed_degree(&t, &t.all()),
            Err(AtlasError::NotUniqueCircuit(3))
        );
        assert_eq!(essential_resultant_degree(&t).unwrap(), BigInt::from(3));
        assert_eq!(essential_resultant_degree(&segs(&[1, 1])).unwrap(), BigInt::from(2));
    }

    #[test]
    fn euler_signs() {
        let a = Support::segment(2);
        let faces = face_lattice(&a).unwrap();
        assert_eq!(signed_euler_obstruction(&a, &faces[0]).unwrap(), EulerValue::Value(-1));
        assert_eq!(signed_euler_obstruction(&a, &faces[2]).unwrap(), EulerValue::Value(1));
        let prism = cayley_set(&SupportTuple::new(2, vec![Support::standard_simplex(2); 2]).unwrap());
        let faces = face_lattice(&prism).unwrap();
        let square = faces.iter().find(|f| f.dim == 2 && f.subset.len() == 4).unwrap();
        assert_eq!(signed_euler_obstruction(&prism, square).unwrap(), EulerValue::Value(-1));
        let gap = sup(&[&[0], &[2]]);
        let faces = face_lattice(&gap).unwrap();
        assert_eq!(signed_euler_obstruction(&gap, &faces[0]).unwrap(), EulerValue::Value(-1));
        let pinched = sup(&[&[0], &[2], &[3]]);
        let faces = face_lattice(&pinched).unwrap();
        assert!(matches!(
            signed_euler_obstruction(&pinched, &faces[0]).unwrap(),
            EulerValue::Unsupported(_)
        ));
    }

    #[test]
    fn matsui_takeuchi_anchors() {
        for d in 2..6 {
            assert_eq!(
                matsui_takeuchi_degree(&Support::segment(d), 1).unwrap(),
                known(2 * d - 2)
            );
        }
        let prism = cayley_set(&SupportTuple::new(2, vec![Support::standard_simplex(2); 2]).unwrap());
        assert_eq!(matsui_takeuchi_degree(&prism, 2).unwrap(), known(3));
        for n in 1..4 {
            assert!(matches!(
                matsui_takeuchi_degree(&Support::standard_simplex(n), 1).unwrap(),
                DegreeValue::NotAHypersurface { .. }
            ));
        }
    }

    #[test]
    fn lir_degrees() {
        assert_eq!(lir_degree(1).unwrap(), BigInt::from(1));
        assert_eq!(lir_degree(2).unwrap(), BigInt::from(3));
        assert_eq!(lir_degree(3).unwrap(), BigInt::from(6));
    }

    #[test]
    fn component_degree_examples() {
        let t = SupportTuple::new(2, vec![Support::standard_simplex(2); 2]).unwrap();
        let p = build_poset(&t).unwrap();
        assert_eq!(component_degree(&t, &p, 0).unwrap(), known(3));
        assert_eq!(cayley_degree(&t).unwrap(), known(3));

        let t = SupportTuple::new(1, vec![Support::segment(2)]).unwrap();
        let p = build_poset(&t).unwrap();
        assert_eq!(component_degree(&t, &p, 0).unwrap(), known(2));

        let t = SupportTuple::new(1, vec![Support::segment(1)]).unwrap();
        let p = build_poset(&t).unwrap();
        assert_eq!(component_degree(&t, &p, 0).unwrap(), known(1));
    }

    #[test]
    fn disjoint_cayley_degree() {
        let a = sup(&[&[0, 0, 0, 0], &[1, 0, 0, 0], &[0, 1, 0, 0]]);
        let b = sup(&[&[0, 0, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        let t = SupportTuple::new(4, vec![a.clone(), a, b.clone(), b]).unwrap();
        assert_eq!(cayley_degree(&t).unwrap(), known(9));
    }
}
