//! The three discriminants of a tuple (the A-discriminant, the Cayley
//! discriminant and the mixed discriminant) as component lists with
//! codimensions, degrees and symbolic structure expressions.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::classify::{classify, TupleClass, TupleKind};
use crate::degree::{circuit_mixed_degree, component_degree, resultant_degree, DegreeValue};
use crate::error::{invariant, AtlasError, Result};
use crate::poset::{build_poset, BkPoset, IrrClass};
use crate::support::{IndexSubset, SupportTuple};

/// Expression tree describing a component. `AmbientFactor` is the full
/// coefficient space of the listed supports; `BkMult` is the product of
/// varieties living on disjoint groups of supports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Structure {
    ResultantOf { indices: IndexSubset },
    QuotientDiscOf { indices: IndexSubset, modulo: IndexSubset },
    QuotientCayleyDiscOf { indices: IndexSubset, modulo: IndexSubset },
    AmbientFactor { indices: IndexSubset },
    BkMult { factors: Vec<Structure> },
    Intersection { factors: Vec<Structure> },
}

impl Structure {
    /// Factors of an intersection, or the expression itself.
    pub fn intersection_factors(&self) -> Vec<&Structure> {
        match self {
            Structure::Intersection { factors } => factors.iter().collect(),
            other => vec![other],
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, xs: &[Structure], sep: &str| -> fmt::Result {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, "{sep}")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        };
        match self {
            Structure::ResultantOf { indices } => write!(f, "R{indices}"),
            Structure::QuotientDiscOf { indices, modulo } => write!(f, "D({indices}/{modulo})"),
            Structure::QuotientCayleyDiscOf { indices, modulo } => {
                write!(f, "Dcay({indices}/{modulo})")
            }
            Structure::AmbientFactor { indices } => write!(f, "C{indices}"),
            Structure::BkMult { factors } => {
                write!(f, "[")?;
                join(f, factors, " • ")?;
                write!(f, "]")
            }
            Structure::Intersection { factors } => {
                write!(f, "(")?;
                join(f, factors, " ∩ ")?;
                write!(f, ")")
            }
        }
    }
}

/// A codimension, or why it is not available.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Codim {
    Known(u32),
    Unsupported(String),
}

impl Codim {
    pub fn known(&self) -> Option<u32> {
        match self {
            Codim::Known(c) => Some(*c),
            Codim::Unsupported(_) => None,
        }
    }
}

impl fmt::Display for Codim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Codim::Known(c) => write!(f, "{c}"),
            Codim::Unsupported(r) => write!(f, "unsupported ({r})"),
        }
    }
}

impl Serialize for Codim {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Codim::Known(c) => s.serialize_u32(*c),
            Codim::Unsupported(reason) => {
                serde_json::json!({"status": "unsupported", "reason": reason}).serialize(s)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub label: String,
    pub structure: Structure,
    pub codim: Codim,
    /// `None` when degrees were not requested.
    pub degree: Option<DegreeValue>,
    /// Set on strata contained in a larger component; such strata are not
    /// components themselves.
    pub absorbed_into: Option<String>,
}

impl Component {
    pub fn is_absorbed(&self) -> bool {
        self.absorbed_into.is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscriminantKind {
    ADisc,
    CayleyDisc,
    MixedDisc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminantReport {
    pub kind: DiscriminantKind,
    pub components: Vec<Component>,
    pub empty: bool,
    pub complete_intersection_codim: Option<u32>,
}

impl DiscriminantReport {
    fn new(kind: DiscriminantKind, components: Vec<Component>) -> Self {
        DiscriminantReport {
            kind,
            empty: components.is_empty(),
            components,
            complete_intersection_codim: None,
        }
    }

    /// Components that are not absorbed into larger ones.
    pub fn maximal_components(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| !c.is_absorbed())
    }
}

/// Everything the discriminant reports are derived from.
#[derive(Clone, Debug)]
pub struct Atlas {
    pub class: TupleClass,
    pub poset: Option<BkPoset>,
    pub a_disc: DiscriminantReport,
    pub cayley_disc: DiscriminantReport,
    pub mixed_disc: DiscriminantReport,
    pub warnings: Vec<String>,
}

impl Atlas {
    pub fn reports(&self) -> [&DiscriminantReport; 3] {
        [&self.a_disc, &self.cayley_disc, &self.mixed_disc]
    }
}

pub fn stratum_label(ideal: &IndexSubset) -> String {
    format!("S{ideal}")
}

pub fn resultant_label(s: &IndexSubset) -> String {
    format!("R{s}")
}

fn cayley_label(t: &SupportTuple) -> String {
    format!("C{}", t.all())
}

fn ambient(indices: IndexSubset) -> Option<Structure> {
    (!indices.is_empty()).then_some(Structure::AmbientFactor { indices })
}

/// `C(lower) • D(block / lower) • C(rest)`, dropping empty ambient factors.
fn stratum_structure(p: &BkPoset, a: usize) -> Structure {
    let el = p.element(a);
    let lower = el.lower();
    let rest = el.principal_ideal.complement(p.tuple_len);
    let mut factors: Vec<Structure> = Vec::new();
    factors.extend(ambient(lower.clone()));
    factors.push(Structure::QuotientDiscOf {
        indices: el.block.clone(),
        modulo: lower,
    });
    factors.extend(ambient(rest));
    if factors.len() == 1 {
        factors.pop().expect("one factor")
    } else {
        Structure::BkMult { factors }
    }
}

fn stratum_codim(class: IrrClass) -> u32 {
    match class {
        IrrClass::Nir => 1,
        IrrClass::Lir => 2,
    }
}

fn resultant_codim(delta: i64) -> Result<Codim> {
    u32::try_from(-delta)
        .ok()
        .filter(|&c| c > 0)
        .map(Codim::Known)
        .ok_or_else(|| invariant(format!("resultant of a subtuple with defect {delta}")))
}

fn degree_if(on: bool, f: impl FnOnce() -> Result<DegreeValue>) -> Result<Option<DegreeValue>> {
    if on {
        f().map(Some)
    } else {
        Ok(None)
    }
}

fn known(v: Result<num_bigint::BigInt>) -> Result<DegreeValue> {
    v.map(DegreeValue::Known)
}

/// Analyzes a tuple: classification, poset (for BK tuples) and all three
/// discriminant reports. Degrees are skipped when `degrees` is false.
pub fn build_atlas(t: &SupportTuple, degrees: bool) -> Result<Atlas> {
    let class = classify(t)?;
    match class.kind {
        TupleKind::Underdetermined => Err(AtlasError::Underdetermined(class.total_defect)),
        TupleKind::Bk => bk_atlas(t, class, degrees),
        TupleKind::LinearlyDependent => dependent_atlas(t, class, degrees),
    }
}

fn bk_atlas(t: &SupportTuple, class: TupleClass, degrees: bool) -> Result<Atlas> {
    let p = build_poset(t)?;
    let mut warnings = Vec::new();
    let mut strata = Vec::with_capacity(p.len());
    let mut degs: Vec<Option<DegreeValue>> = Vec::with_capacity(p.len());
    for a in 0..p.len() {
        let el = p.element(a);
        let filter = p.order_filter(a);
        let absorbed_into = match el.irr_class {
            IrrClass::Nir => None,
            IrrClass::Lir => {
                let nir: Vec<usize> = filter
                    .iter()
                    .copied()
                    .filter(|&b| p.element(b).irr_class == IrrClass::Nir)
                    .collect();
                let first = nir
                    .iter()
                    .copied()
                    .find(|&b| !nir.iter().any(|&c| p.less(c, b)));
                if let Some(b) = first {
                    if !p.covers.contains(&(a, b)) {
                        warnings.push(format!(
                            "lir stratum {} lies below the nir stratum {} only through other lir strata",
                            stratum_label(&el.principal_ideal),
                            stratum_label(&p.element(b).principal_ideal)
                        ));
                    }
                }
                first.map(|b| stratum_label(&p.element(b).principal_ideal))
            }
        };
        let degree = degree_if(degrees, || component_degree(t, &p, a))?;
        if let Some(DegreeValue::NotAHypersurface { value }) = &degree {
            warnings.push(format!(
                "face sum {} for stratum {} is not positive",
                value,
                stratum_label(&el.principal_ideal)
            ));
        }
        degs.push(degree.clone());
        strata.push(Component {
            label: stratum_label(&el.principal_ideal),
            structure: stratum_structure(&p, a),
            codim: Codim::Known(stratum_codim(el.irr_class)),
            degree,
            absorbed_into,
        });
    }
    let a_disc = DiscriminantReport::new(DiscriminantKind::ADisc, strata);

    let maximal = p.maximal_elements();
    let ci_codim: u32 = maximal
        .iter()
        .map(|&a| stratum_codim(p.element(a).irr_class))
        .sum();
    let mut factors: Vec<Structure> = maximal.iter().map(|&a| stratum_structure(&p, a)).collect();
    let structure = if factors.len() == 1 {
        factors.pop().expect("one factor")
    } else {
        Structure::Intersection { factors }
    };
    let cayley_deg = if degrees {
        let mut product = num_bigint::BigInt::from(1);
        let mut out = None;
        for &a in &maximal {
            match degs[a].clone().expect("degrees computed") {
                DegreeValue::Known(v) => product *= v,
                other => {
                    out = Some(other);
                    break;
                }
            }
        }
        Some(out.unwrap_or(DegreeValue::Known(product)))
    } else {
        None
    };
    let mut cayley_disc = DiscriminantReport::new(
        DiscriminantKind::CayleyDisc,
        vec![Component {
            label: cayley_label(t),
            structure,
            codim: Codim::Known(ci_codim),
            degree: cayley_deg,
            absorbed_into: None,
        }],
    );
    cayley_disc.complete_intersection_codim = Some(ci_codim);

    let mixed = if let [top] = maximal[..] {
        let mut c = a_disc.components[top].clone();
        c.absorbed_into = None;
        vec![c]
    } else {
        Vec::new()
    };
    let mixed_disc = DiscriminantReport::new(DiscriminantKind::MixedDisc, mixed);
    Ok(Atlas {
        class,
        poset: Some(p),
        a_disc,
        cayley_disc,
        mixed_disc,
        warnings,
    })
}

fn dependent_atlas(t: &SupportTuple, class: TupleClass, degrees: bool) -> Result<Atlas> {
    let m = class
        .minimal_subtuple
        .clone()
        .ok_or_else(|| invariant("dependent tuple without a minimal subtuple"))?;
    let a_disc = DiscriminantReport::new(
        DiscriminantKind::ADisc,
        vec![Component {
            label: resultant_label(&m),
            structure: Structure::ResultantOf { indices: m.clone() },
            codim: resultant_codim(class.min_defect)?,
            degree: degree_if(degrees, || known(resultant_degree(t, &m)))?,
            absorbed_into: None,
        }],
    );

    let all = t.all();
    let cayley = if class.essential || m == all {
        if m != all {
            return Err(invariant("essential dependent tuple with a proper minimal subtuple"));
        }
        Component {
            label: cayley_label(t),
            structure: Structure::ResultantOf { indices: all.clone() },
            codim: resultant_codim(class.total_defect)?,
            degree: degree_if(degrees, || known(resultant_degree(t, &all)))?,
            absorbed_into: None,
        }
    } else {
        let why = "not determined for dependent tuples that are not essential";
        Component {
            label: cayley_label(t),
            structure: Structure::BkMult {
                factors: vec![
                    Structure::ResultantOf { indices: m.clone() },
                    Structure::QuotientCayleyDiscOf {
                        indices: m.complement(t.len()),
                        modulo: m.clone(),
                    },
                ],
            },
            codim: Codim::Unsupported(why.into()),
            degree: degree_if(degrees, || {
                Ok(DegreeValue::Unsupported { reason: why.into() })
            })?,
            absorbed_into: None,
        }
    };
    let cayley_disc = DiscriminantReport::new(DiscriminantKind::CayleyDisc, vec![cayley]);

    let circuits = class.circuits.clone().unwrap_or_default();
    let mixed = match &circuits[..] {
        [c] => vec![Component {
            label: resultant_label(c),
            structure: Structure::ResultantOf { indices: c.clone() },
            codim: Codim::Known(1),
            degree: degree_if(degrees, || known(circuit_mixed_degree(t, c)))?,
            absorbed_into: None,
        }],
        _ => Vec::new(),
    };
    let mixed_disc = DiscriminantReport::new(DiscriminantKind::MixedDisc, mixed);
    Ok(Atlas {
        class,
        poset: None,
        a_disc,
        cayley_disc,
        mixed_disc,
        warnings: Vec::new(),
    })
}

pub fn a_discriminant(t: &SupportTuple) -> Result<DiscriminantReport> {
    build_atlas(t, true).map(|a| a.a_disc)
}

pub fn cayley_discriminant(t: &SupportTuple) -> Result<DiscriminantReport> {
    build_atlas(t, true).map(|a| a.cayley_disc)
}

pub fn mixed_discriminant(t: &SupportTuple) -> Result<DiscriminantReport> {
    build_atlas(t, true).map(|a| a.mixed_disc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::Support;
    use num_bigint::BigInt;

    fn tuple(rank: usize, sets: &[&[&[i64]]]) -> SupportTuple {
        SupportTuple::from_points(
            rank,
            sets.iter()
                .map(|s| s.iter().map(|p| p.to_vec()).collect())
                .collect(),
        )
        .unwrap()
    }

    fn vee() -> SupportTuple {
        tuple(
            3,
            &[
                &[&[0, 0, 0], &[1, 0, 0]],
                &[&[0, 0, 0], &[0, 1, 0]],
                &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]],
            ],
        )
    }

    fn known(v: i64) -> Option<DegreeValue> {
        Some(DegreeValue::Known(BigInt::from(v)))
    }

    fn set(xs: &[usize]) -> IndexSubset {
        IndexSubset::new(xs.to_vec())
    }

    #[test]
    fn sylvester_with_a_free_set() {
        let t = tuple(2, &[&[&[0, 0], &[1, 0]], &[&[0, 0], &[1, 0]], &[&[0, 0], &[0, 1]]]);
        let atlas = build_atlas(&t, true).unwrap();
        let a = &atlas.a_disc;
        assert_eq!(a.components.len(), 1);
        assert_eq!(a.components[0].structure, Structure::ResultantOf { indices: set(&[0, 1]) });
        assert_eq!(a.components[0].codim, Codim::Known(1));
        assert_eq!(a.components[0].degree, known(2));
        let m = &atlas.mixed_disc;
        assert_eq!(m.components[0].structure, Structure::ResultantOf { indices: set(&[0, 1]) });
        assert_eq!(m.components[0].degree, known(2));
        let c = &atlas.cayley_disc.components[0];
        assert!(matches!(c.codim, Codim::Unsupported(_)));
        assert_eq!(
            c.structure,
            Structure::BkMult {
                factors: vec![
                    Structure::ResultantOf { indices: set(&[0, 1]) },
                    Structure::QuotientCayleyDiscOf { indices: set(&[2]), modulo: set(&[0, 1]) },
                ]
            }
        );
    }

    #[test]
    fn vee_reports() {
        let atlas = build_atlas(&vee(), true).unwrap();
        let a = &atlas.a_disc;
        assert_eq!(a.components.len(), 3);
        assert!(a.components.iter().all(|c| c.codim == Codim::Known(2) && !c.is_absorbed()));
        let labels: Vec<&str> = a.components.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(labels, ["S{0}", "S{1}", "S{0,1,2}"]);
        let degrees: Vec<_> = a.components.iter().map(|c| c.degree.clone()).collect();
        assert_eq!(degrees, vec![known(1), known(1), known(3)]);
        assert_eq!(atlas.cayley_disc.complete_intersection_codim, Some(2));
        assert_eq!(atlas.cayley_disc.components[0].degree, known(3));
        let m = &atlas.mixed_disc;
        assert_eq!(m.components.len(), 1);
        assert_eq!(m.components[0].codim, Codim::Known(2));
        assert_eq!(
            m.components[0].structure,
            Structure::BkMult {
                factors: vec![
                    Structure::AmbientFactor { indices: set(&[0, 1]) },
                    Structure::QuotientDiscOf { indices: set(&[2]), modulo: set(&[0, 1]) },
                ]
            }
        );
    }

    #[test]
    fn univariate_quadratic() {
        let t = SupportTuple::new(1, vec![Support::segment(2)]).unwrap();
        let atlas = build_atlas(&t, true).unwrap();
        assert_eq!(atlas.a_disc.components.len(), 1);
        assert_eq!(atlas.a_disc.components[0].codim, Codim::Known(1));
        assert_eq!(atlas.a_disc.components[0].degree, known(2));
        assert_eq!(atlas.cayley_disc.complete_intersection_codim, Some(1));
    }

    #[test]
    fn essential_and_non_simple() {
        let t = SupportTuple::new(1, vec![Support::segment(1); 2]).unwrap();
        let c = cayley_discriminant(&t).unwrap();
        assert_eq!(c.components[0].structure, Structure::ResultantOf { indices: set(&[0, 1]) });
        assert_eq!(c.components[0].codim, Codim::Known(1));

        let t = SupportTuple::new(1, vec![Support::segment(1); 3]).unwrap();
        assert!(mixed_discriminant(&t).unwrap().empty);

        let tri = |o: usize| {
            let mut pts = vec![vec![0; 4]];
            for j in 0..2 {
                let mut p = vec![0; 4];
                p[o + j] = 1;
                pts.push(p);
            }
            Support::new(pts).unwrap()
        };
        let t = SupportTuple::new(4, vec![tri(0), tri(0), tri(2), tri(2)]).unwrap();
        let atlas = build_atlas(&t, true).unwrap();
        assert_eq!(atlas.cayley_disc.complete_intersection_codim, Some(4));
        assert_eq!(atlas.cayley_disc.components[0].degree, known(9));
        assert!(atlas.mixed_disc.empty);
    }

    #[test]
    fn chain_degrees() {
        let t = tuple(2, &[&[&[0, 0], &[1, 0]], &[&[0, 0], &[1, 0], &[0, 1]]]);
        let a = a_discriminant(&t).unwrap();
        let degrees: Vec<_> = a.components.iter().map(|c| c.degree.clone()).collect();
        assert_eq!(degrees, vec![known(1), known(2)]);
    }

    #[test]
    fn absorbed_lir_below_nir() {
        // a lir segment below the univariate quadratic quotient
        let t = tuple(2, &[&[&[0, 0], &[1, 0]], &[&[0, 0], &[0, 1], &[0, 2], &[1, 0]]]);
        let atlas = build_atlas(&t, false).unwrap();
        let a = &atlas.a_disc;
        let absorbed: Vec<&Component> = a.components.iter().filter(|c| c.is_absorbed()).collect();
        assert!(a.components.iter().all(|c| c.degree.is_none()));
        assert_eq!(absorbed.len(), 1, "{a:?}");
        assert_eq!(absorbed[0].label, "S{0}");
        assert_eq!(absorbed[0].absorbed_into.as_deref(), Some("S{0,1}"));
    }

    #[test]
    fn underdetermined_is_an_error() {
        let t = tuple(2, &[&[&[0, 0], &[1, 0], &[0, 1]]]);
        assert_eq!(build_atlas(&t, true).unwrap_err(), AtlasError::Underdetermined(1));
    }
}
