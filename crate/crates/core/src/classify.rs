//! Defect-based classification of support tuples.

use serde::Serialize;

use crate::error::{invariant, AtlasError, Result};
use crate::exact::Echelon;
use crate::support::{quotient_tuple, IndexSubset, SupportTuple};

/// Largest tuple length accepted by the exhaustive subset scans.
pub const DEFAULT_BOUND: usize = 20;

/// No configured bound may exceed this (the tables hold `2^k` entries).
pub const HARD_BOUND: usize = 26;

/// Span dimensions of every sub-Minkowski-sum, indexed by subset mask.
#[derive(Clone, Debug)]
pub struct DefectTable {
    k: usize,
    dims: Vec<u32>,
}

impl DefectTable {
    pub fn new(t: &SupportTuple) -> Result<Self> {
        Self::with_bound(t, DEFAULT_BOUND)
    }

    pub fn with_bound(t: &SupportTuple, bound: usize) -> Result<Self> {
        let k = t.len();
        let limit = bound.min(HARD_BOUND);
        if k > limit {
            return Err(AtlasError::TooLarge {
                supports: k,
                bound: limit,
            });
        }
        let gens: Vec<Vec<Vec<i64>>> = t.supports().iter().map(|s| s.difference_vectors()).collect();
        let mut dims = vec![0u32; 1 << k];
        fill(&gens, 0, 0, &Echelon::new(t.ambient_rank()), &mut dims);
        Ok(DefectTable { k, dims })
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn full_mask(&self) -> u64 {
        (1u64 << self.k) - 1
    }

    pub fn dim(&self, mask: u64) -> usize {
        self.dims[mask as usize] as usize
    }

    /// Defect of a subset mask; the empty mask has defect 0.
    pub fn defect(&self, mask: u64) -> i64 {
        self.dims[mask as usize] as i64 - mask.count_ones() as i64
    }

    /// Masks of all non-empty subsets.
    pub fn masks(&self) -> impl Iterator<Item = u64> {
        1..=self.full_mask()
    }
}

fn fill(gens: &[Vec<Vec<i64>>], i: usize, mask: u64, ech: &Echelon, dims: &mut [u32]) {
    if i == gens.len() {
        dims[mask as usize] = ech.rank() as u32;
        return;
    }
    fill(gens, i + 1, mask, ech, dims);
    let mut with = ech.clone();
    for v in &gens[i] {
        with.insert(v);
    }
    fill(gens, i + 1, mask | 1 << i, &with, dims);
}

fn is_proper_submask(a: u64, b: u64) -> bool {
    a != b && a & b == a
}

fn sorted_subsets(masks: impl IntoIterator<Item = u64>) -> Vec<IndexSubset> {
    let mut v: Vec<IndexSubset> = masks.into_iter().map(IndexSubset::from_mask).collect();
    v.sort();
    v
}

/// Minimum defect over non-empty subsets, with its inclusion-minimal
/// minimizers in lexicographic order.
pub fn min_defect_scan(t: &SupportTuple) -> Result<(i64, Vec<IndexSubset>)> {
    let table = DefectTable::new(t)?;
    Ok(scan_table(&table))
}

pub(crate) fn scan_table(table: &DefectTable) -> (i64, Vec<IndexSubset>) {
    let min = table.masks().map(|m| table.defect(m)).min().unwrap_or(0);
    let minimizers: Vec<u64> = table.masks().filter(|&m| table.defect(m) == min).collect();
    let minimal = minimizers
        .iter()
        .copied()
        .filter(|&m| !minimizers.iter().any(|&o| is_proper_submask(o, m)));
    (min, sorted_subsets(minimal))
}

/// The unique inclusion-minimal subset of minimal (negative) defect.
pub fn minimal_defect_subtuple(t: &SupportTuple) -> Result<IndexSubset> {
    let (min, minimizers) = min_defect_scan(t)?;
    unique_minimizer(min, minimizers)
}

fn unique_minimizer(min: i64, mut minimizers: Vec<IndexSubset>) -> Result<IndexSubset> {
    if min >= 0 {
        return Err(AtlasError::NotLinearlyDependent);
    }
    if minimizers.len() != 1 {
        let list: Vec<String> = minimizers.iter().map(|m| m.to_string()).collect();
        return Err(invariant(format!(
            "minimal-defect subtuple is not unique: {}",
            list.join(" ")
        )));
    }
    Ok(minimizers.remove(0))
}

/// Inclusion-minimal subsets of negative defect; each has defect −1.
pub fn circuits(t: &SupportTuple) -> Result<Vec<IndexSubset>> {
    circuits_of(&DefectTable::new(t)?)
}

pub(crate) fn circuits_of(table: &DefectTable) -> Result<Vec<IndexSubset>> {
    let n = 1usize << table.len();
    // below[m]: some non-empty subset of m (m included) has negative defect
    let mut below = vec![false; n];
    let mut found = Vec::new();
    for m in 1..n as u64 {
        let neg = table.defect(m) < 0;
        let mut sub_neg = false;
        let mut bits = m;
        while bits != 0 {
            let b = bits & bits.wrapping_neg();
            bits ^= b;
            if below[(m ^ b) as usize] {
                sub_neg = true;
                break;
            }
        }
        below[m as usize] = neg || sub_neg;
        if neg && !sub_neg {
            if table.defect(m) != -1 {
                return Err(invariant(format!(
                    "circuit {} has defect {}",
                    IndexSubset::from_mask(m),
                    table.defect(m)
                )));
            }
            found.push(m);
        }
    }
    Ok(sorted_subsets(found))
}

/// Every subtuple with at most `dim⟨t⟩` supports has non-negative defect.
pub fn is_essential(t: &SupportTuple) -> Result<bool> {
    Ok(essential_of(&DefectTable::new(t)?))
}

pub(crate) fn essential_of(table: &DefectTable) -> bool {
    let d = table.dim(table.full_mask()) as u32;
    table
        .masks()
        .filter(|m| m.count_ones() <= d)
        .all(|m| table.defect(m) >= 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TupleKind {
    LinearlyDependent,
    #[serde(rename = "BK")]
    Bk,
    Underdetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TupleClass {
    pub kind: TupleKind,
    pub min_defect: i64,
    pub total_defect: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimal_subtuple: Option<IndexSubset>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circuits: Option<Vec<IndexSubset>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unique_circuit: Option<bool>,
    pub essential: bool,
}

/// Classifies a tuple as linearly dependent, BK or underdetermined, and
/// checks the structural claims the later stages rely on.
pub fn classify(t: &SupportTuple) -> Result<TupleClass> {
    let table = DefectTable::new(t)?;
    classify_table(t, &table)
}

pub(crate) fn classify_table(t: &SupportTuple, table: &DefectTable) -> Result<TupleClass> {
    let (min, minimizers) = scan_table(table);
    let total = table.defect(table.full_mask());
    let essential = essential_of(table);
    if min < 0 {
        let m = unique_minimizer(min, minimizers)?;
        let circ = circuits_of(table)?;
        let unique = circ.len() == 1;
        if unique != (min == -1) {
            return Err(invariant(format!(
                "{} circuits but the minimal subtuple has defect {}",
                circ.len(),
                min
            )));
        }
        if m.len() < t.len() {
            let q = quotient_tuple(t, &m)?;
            let qt = DefectTable::new(&q)?;
            if qt.masks().any(|x| qt.defect(x) < 0) {
                return Err(invariant("quotient by the minimal subtuple is dependent"));
            }
        }
        return Ok(TupleClass {
            kind: TupleKind::LinearlyDependent,
            min_defect: min,
            total_defect: total,
            minimal_subtuple: Some(m),
            circuits: Some(circ),
            unique_circuit: Some(unique),
            essential,
        });
    }
    let kind = if total == 0 {
        TupleKind::Bk
    } else {
        TupleKind::Underdetermined
    };
    Ok(TupleClass {
        kind,
        min_defect: min,
        total_defect: total,
        minimal_subtuple: None,
        circuits: None,
        unique_circuit: None,
        essential,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::Support;

    fn sup(pts: &[&[i64]]) -> Support {
        Support::new(pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn idx(v: &[usize]) -> IndexSubset {
        IndexSubset::new(v.to_vec())
    }

    fn seg(d: i64) -> Support {
        Support::segment(d)
    }

    fn dependent_plane() -> SupportTuple {
        SupportTuple::new(
            2,
            vec![
                sup(&[&[0, 0], &[1, 0]]),
                sup(&[&[0, 0], &[1, 0]]),
                sup(&[&[0, 0], &[0, 1]]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn scan_examples() {
        let t = SupportTuple::new(1, vec![seg(1), seg(1)]).unwrap();
        assert_eq!(min_defect_scan(&t).unwrap(), (-1, vec![idx(&[0, 1])]));
        let t = SupportTuple::new(2, vec![Support::standard_simplex(2); 2]).unwrap();
        assert_eq!(min_defect_scan(&t).unwrap(), (0, vec![idx(&[0, 1])]));
        let t = SupportTuple::new(1, vec![seg(1); 3]).unwrap();
        assert_eq!(min_defect_scan(&t).unwrap(), (-2, vec![idx(&[0, 1, 2])]));
    }

    #[test]
    fn minimal_subtuple_examples() {
        assert_eq!(minimal_defect_subtuple(&dependent_plane()).unwrap(), idx(&[0, 1]));
        let t = SupportTuple::new(1, vec![seg(1), seg(1)]).unwrap();
        assert_eq!(minimal_defect_subtuple(&t).unwrap(), idx(&[0, 1]));
        let t = SupportTuple::new(1, vec![seg(1), sup(&[&[0], &[2]]), sup(&[&[0], &[3]])]).unwrap();
        assert_eq!(minimal_defect_subtuple(&t).unwrap(), idx(&[0, 1, 2]));
        let t = SupportTuple::new(2, vec![Support::standard_simplex(2); 2]).unwrap();
        assert_eq!(minimal_defect_subtuple(&t), Err(AtlasError::NotLinearlyDependent));
    }

    #[test]
    fn circuit_examples() {
        let t = SupportTuple::new(1, vec![seg(1), seg(1)]).unwrap();
        assert_eq!(circuits(&t).unwrap(), vec![idx(&[0, 1])]);
        let t = SupportTuple::new(1, vec![seg(1); 3]).unwrap();
        assert_eq!(
            circuits(&t).unwrap(),
            vec![idx(&[0, 1]), idx(&[0, 2]), idx(&[1, 2])]
        );
        let t = SupportTuple::new(2, vec![Support::standard_simplex(2); 2]).unwrap();
        assert!(circuits(&t).unwrap().is_empty());
    }

    #[test]
    fn essential_examples() {
        let t = SupportTuple::new(1, vec![seg(1), seg(1)]).unwrap();
        assert!(is_essential(&t).unwrap());
        assert!(!is_essential(&dependent_plane()).unwrap());
        let t = SupportTuple::new(2, vec![Support::standard_simplex(2); 2]).unwrap();
        assert!(is_essential(&t).unwrap());
    }

    #[test]
    fn classify_examples() {
        let t = SupportTuple::new(
            2,
            vec![sup(&[&[0, 0], &[1, 0]]), sup(&[&[0, 0], &[1, 0], &[0, 1]])],
        )
        .unwrap();
        assert_eq!(classify(&t).unwrap().kind, TupleKind::Bk);

        let c = classify(&dependent_plane()).unwrap();
        assert_eq!(c.kind, TupleKind::LinearlyDependent);
        assert_eq!(c.minimal_subtuple, Some(idx(&[0, 1])));
        assert_eq!(c.circuits, Some(vec![idx(&[0, 1])]));
        assert_eq!(c.unique_circuit, Some(true));

        let t = SupportTuple::new(2, vec![Support::standard_simplex(2)]).unwrap();
        let c = classify(&t).unwrap();
        assert_eq!(c.kind, TupleKind::Underdetermined);
        assert_eq!(c.total_defect, 1);
    }

    #[test]
    fn too_large() {
        let t = SupportTuple::new(1, vec![seg(1); 21]).unwrap();
        assert!(matches!(classify(&t), Err(AtlasError::TooLarge { .. })));
    }
}
