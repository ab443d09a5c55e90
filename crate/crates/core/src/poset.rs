//! The lattice of BK-subtuples of a BK-tuple and its poset of
//! join-irreducibles: blocks, irreducible quotients, lir/nir classes,
//! heights and maximal filtrations.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::classify::{classify_table, DefectTable, TupleKind};
use crate::error::{invariant, AtlasError, Result};
use crate::support::{normalize, quotient_tuple, IndexSubset, SupportTuple};
use crate::volume::mixed_volume;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum IrrClass {
    Lir,
    Nir,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PosetElement {
    pub id: usize,
    pub block: IndexSubset,
    pub principal_ideal: IndexSubset,
    /// The irreducible quotient of the principal ideal by its part below the
    /// element, with supports in block order.
    pub quotient: SupportTuple,
    /// Mixed volume of the quotient in its saturated span.
    #[serde(serialize_with = "crate::document::big_number")]
    pub quotient_mixed_volume: BigInt,
    pub irr_class: IrrClass,
}

impl PosetElement {
    /// `principal_ideal \ block`.
    pub fn lower(&self) -> IndexSubset {
        self.principal_ideal.minus(&self.block)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BkPoset {
    pub tuple_len: usize,
    pub elements: Vec<PosetElement>,
    /// Hasse diagram edges `(lower id, upper id)`.
    pub covers: Vec<(usize, usize)>,
    pub heights: Vec<usize>,
}

fn check_bk(t: &SupportTuple, table: &DefectTable) -> Result<()> {
    match classify_table(t, table)?.kind {
        TupleKind::Bk => Ok(()),
        _ => Err(AtlasError::NotBk),
    }
}

fn bk_masks(table: &DefectTable) -> Result<Vec<u64>> {
    let mut masks: Vec<u64> = std::iter::once(0)
        .chain(table.masks())
        .filter(|&m| table.defect(m) == 0)
        .collect();
    let set: BTreeSet<u64> = masks.iter().copied().collect();
    for &a in &masks {
        for &b in &masks {
            if !set.contains(&(a | b)) || !set.contains(&(a & b)) {
                return Err(invariant(format!(
                    "BK-subtuples {} and {} are not closed under union and intersection",
                    IndexSubset::from_mask(a),
                    IndexSubset::from_mask(b)
                )));
            }
        }
    }
    masks.sort_by_key(|&m| (m.count_ones(), IndexSubset::from_mask(m)));
    Ok(masks)
}

/// All BK-subtuples (zero-defect subsets, including the empty one), by size
/// and then lexicographically.
pub fn enumerate_bk_subtuples(t: &SupportTuple) -> Result<Vec<IndexSubset>> {
    let table = DefectTable::new(t)?;
    check_bk(t, &table)?;
    Ok(bk_masks(&table)?.into_iter().map(IndexSubset::from_mask).collect())
}

/// Irreducibility: zero total defect and positive defect on every proper
/// non-empty subtuple.
pub fn is_irreducible_bk(t: &SupportTuple) -> Result<bool> {
    let table = DefectTable::new(t)?;
    let full = table.full_mask();
    Ok(table.defect(full) == 0 && table.masks().all(|m| m == full || table.defect(m) > 0))
}

/// The quotient `principal / lower`, with `lower ⊂ principal`.
pub(crate) fn filtration_quotient(
    t: &SupportTuple,
    principal: &IndexSubset,
    lower: &IndexSubset,
) -> Result<SupportTuple> {
    let sub = t.subtuple(principal)?;
    if lower.is_empty() {
        return Ok(sub);
    }
    let local: Vec<usize> = principal
        .indices()
        .iter()
        .enumerate()
        .filter(|(_, i)| lower.contains(**i))
        .map(|(pos, _)| pos)
        .collect();
    quotient_tuple(&sub, &IndexSubset::new(local))
}

/// Lir exactly when the quotient, rewritten in the lattice it generates,
/// has unit mixed volume.
pub(crate) fn irr_class_of(quotient: &SupportTuple) -> Result<IrrClass> {
    let (n, _) = normalize(quotient)?;
    Ok(if mixed_volume(&n)?.is_one() {
        IrrClass::Lir
    } else {
        IrrClass::Nir
    })
}

pub fn build_poset(t: &SupportTuple) -> Result<BkPoset> {
    let table = DefectTable::new(t)?;
    check_bk(t, &table)?;
    let masks = bk_masks(&table)?;

    let mut irreducibles: Vec<(u64, u64)> = Vec::new();
    for &j in masks.iter().filter(|&&m| m != 0) {
        let lower = masks
            .iter()
            .filter(|&&m| m != j && m & j == m)
            .fold(0u64, |acc, &m| acc | m);
        if lower != j {
            irreducibles.push((j, lower));
        }
    }
    irreducibles.sort_by_key(|&(j, _)| (j.count_ones(), IndexSubset::from_mask(j)));

    let mut elements = Vec::with_capacity(irreducibles.len());
    for (id, &(j, lower)) in irreducibles.iter().enumerate() {
        let principal = IndexSubset::from_mask(j);
        let lower_set = IndexSubset::from_mask(lower);
        let quotient = filtration_quotient(t, &principal, &lower_set)?;
        if !is_irreducible_bk(&quotient)? {
            return Err(invariant(format!(
                "quotient of {} by {} is not an irreducible BK-tuple",
                principal, lower_set
            )));
        }
        let qmv = mixed_volume(&quotient)?;
        let irr_class = irr_class_of(&quotient)?;
        elements.push(PosetElement {
            id,
            block: IndexSubset::from_mask(j & !lower),
            principal_ideal: principal,
            quotient,
            quotient_mixed_volume: qmv,
            irr_class,
        });
    }

    let mut union = 0u64;
    for &(j, lower) in &irreducibles {
        if union & (j & !lower) != 0 {
            return Err(invariant("blocks are not disjoint"));
        }
        union |= j & !lower;
    }
    if union != table.full_mask() {
        return Err(invariant("blocks do not cover the tuple"));
    }

    let n = irreducibles.len();
    let below = |a: usize, b: usize| {
        let (ja, jb) = (irreducibles[a].0, irreducibles[b].0);
        ja != jb && ja & jb == ja
    };
    let mut covers = Vec::new();
    for b in 0..n {
        for a in 0..n {
            if below(a, b) && !(0..n).any(|c| below(a, c) && below(c, b)) {
                covers.push((a, b));
            }
        }
    }
    covers.sort_unstable();
    let mut heights = vec![0usize; n];
    for b in 0..n {
        // elements are sorted by ideal size, so lower elements come first
        heights[b] = covers
            .iter()
            .filter(|&&(_, up)| up == b)
            .map(|&(low, _)| heights[low] + 1)
            .max()
            .unwrap_or(0);
    }

    let poset = BkPoset {
        tuple_len: t.len(),
        elements,
        covers,
        heights,
    };
    if poset.len() <= 16 && poset.order_ideals().len() != masks.len() {
        return Err(invariant("order ideals do not match BK-subtuples"));
    }
    Ok(poset)
}

impl BkPoset {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, id: usize) -> &PosetElement {
        &self.elements[id]
    }

    /// Strict order `a < b`.
    pub fn less(&self, a: usize, b: usize) -> bool {
        let (pa, pb) = (&self.elements[a].principal_ideal, &self.elements[b].principal_ideal);
        pa != pb && pa.is_subset(pb)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        a == b || self.less(a, b)
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| !(0..self.len()).any(|b| self.less(a, b)))
            .collect()
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| !(0..self.len()).any(|b| self.less(b, a)))
            .collect()
    }

    /// Unique maximal element, i.e. the whole tuple is a principal ideal.
    pub fn is_simple(&self) -> bool {
        self.maximal_elements().len() == 1
    }

    pub fn is_prelinear(&self, a: usize) -> bool {
        self.elements[a].irr_class == IrrClass::Lir
    }

    /// Principal order filter `[a] = {b : a ≤ b}`.
    pub fn order_filter(&self, a: usize) -> Vec<usize> {
        (0..self.len()).filter(|&b| self.leq(a, b)).collect()
    }

    /// Principal order ideal `(a) = {b : b ≤ a}`.
    pub fn order_ideal(&self, a: usize) -> Vec<usize> {
        (0..self.len()).filter(|&b| self.leq(b, a)).collect()
    }

    /// Connected components of the Hasse diagram, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut label: Vec<usize> = (0..n).collect();
        fn root(label: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while label[r] != r {
                r = label[r];
            }
            label[x] = r;
            r
        }
        for &(a, b) in &self.covers {
            let (ra, rb) = (root(&mut label, a), root(&mut label, b));
            if ra != rb {
                label[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut index = vec![usize::MAX; n];
        for x in 0..n {
            let r = root(&mut label, x);
            if index[r] == usize::MAX {
                index[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[index[r]].push(x);
        }
        groups
    }

    /// Union of blocks over a set of elements.
    pub fn union_of_blocks(&self, ids: &[usize]) -> IndexSubset {
        ids.iter()
            .fold(IndexSubset::empty(), |acc, &a| acc.union(&self.elements[a].block))
    }

    /// All order ideals as element-id sets, by brute force over subsets.
    pub fn order_ideals(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut out = Vec::new();
        for mask in 0u64..1 << n {
            let ids: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            let closed = self
                .covers
                .iter()
                .all(|&(low, up)| mask >> up & 1 == 0 || mask >> low & 1 == 1);
            if closed {
                out.push(ids);
            }
        }
        out
    }
}

/// A linear extension of the poset, as element ids. The sorted element
/// order already is one.
pub fn maximal_filtration(p: &BkPoset) -> Vec<usize> {
    (0..p.len()).collect()
}

/// Successive quotients along a linear extension, in the order given.
pub fn filtration_quotients(t: &SupportTuple, order: &[usize], p: &BkPoset) -> Result<Vec<SupportTuple>> {
    let mut prefix = IndexSubset::empty();
    let mut out = Vec::with_capacity(order.len());
    for &a in order {
        let next = prefix.union(&p.elements[a].block);
        out.push(filtration_quotient(t, &next, &prefix)?);
        prefix = next;
    }
    Ok(out)
}

/// Whether `order` is a linear extension of `p`.
pub fn is_linear_extension(p: &BkPoset, order: &[usize]) -> bool {
    let mut pos = vec![usize::MAX; p.len()];
    for (i, &a) in order.iter().enumerate() {
        if a >= p.len() || pos[a] != usize::MAX {
            return false;
        }
        pos[a] = i;
    }
    order.len() == p.len() && p.covers.iter().all(|&(a, b)| pos[a] < pos[b])
}
