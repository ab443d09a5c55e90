//! Built-in example tuples and the `selfcheck` suite that runs the
//! independent oracles over them.

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{classify, TupleKind};
use crate::degree::{matsui_takeuchi_degree, resultant_degree, DegreeValue};
use crate::error::Result;
use crate::oracle::{bernstein_oracle, simplex_equivalent};
use crate::poset::{build_poset, IrrClass};
use crate::random::random_bk;
use crate::support::{cayley_set, Support, SupportTuple};

fn tuple(rank: usize, sets: &[&[&[i64]]]) -> SupportTuple {
    SupportTuple::from_points(
        rank,
        sets.iter()
            .map(|s| s.iter().map(|p| p.to_vec()).collect())
            .collect(),
    )
    .expect("well-formed built-in tuple")
}

fn planar_pair_in(rank: usize, offset: usize) -> Support {
    let mut pts = vec![vec![0; rank]];
    for j in 0..2 {
        let mut p = vec![0; rank];
        p[offset + j] = 1;
        pts.push(p);
    }
    Support::new(pts).expect("nonempty")
}

/// Named example tuples covering every classification branch.
pub fn builtin() -> Vec<(&'static str, SupportTuple)> {
    let tri: &[&[i64]] = &[&[0, 0], &[1, 0], &[0, 1]];
    vec![
        ("chain", tuple(2, &[&[&[0, 0], &[1, 0]], tri])),
        (
            "vee",
            tuple(
                3,
                &[
                    &[&[0, 0, 0], &[1, 0, 0]],
                    &[&[0, 0, 0], &[0, 1, 0]],
                    &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]],
                ],
            ),
        ),
        ("irreducible", tuple(2, &[tri, tri])),
        (
            "disjoint",
            SupportTuple::new(
                4,
                vec![
                    planar_pair_in(4, 0),
                    planar_pair_in(4, 0),
                    planar_pair_in(4, 2),
                    planar_pair_in(4, 2),
                ],
            )
            .expect("consistent"),
        ),
        (
            "lir_below_nir",
            tuple(2, &[&[&[0, 0], &[1, 0]], &[&[0, 0], &[0, 1], &[0, 2], &[1, 0]]]),
        ),
        (
            "univariate_quadratic",
            SupportTuple::new(1, vec![Support::segment(2)]).expect("consistent"),
        ),
        (
            "separated",
            tuple(2, &[&[&[0, 0], &[2, 0]], &[&[0, 0], &[0, 1], &[0, 2]]]),
        ),
        (
            "sylvester",
            SupportTuple::new(1, vec![Support::segment(2), Support::segment(3)]).expect("consistent"),
        ),
        (
            "resultant_with_free_set",
            tuple(2, &[&[&[0, 0], &[1, 0]], &[&[0, 0], &[1, 0]], &[&[0, 0], &[0, 1]]]),
        ),
        (
            "three_segments",
            SupportTuple::new(1, vec![Support::segment(1); 3]).expect("consistent"),
        ),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelfCheck {
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn check(checks: &mut Vec<Check>, name: String, passed: bool, detail: String) {
    checks.push(Check { name, passed, detail });
}

/// Runs the oracle suite: root counts against mixed volumes on every
/// rank-≤2 BK instance (built-in and `random` extra ones), the lir
/// brute-force search on every poset element, and the degree anchors.
pub fn selfcheck(seed: u64, trials: usize, random: usize) -> Result<SelfCheck> {
    let mut checks = Vec::new();
    let mut oracle_inputs: Vec<(String, SupportTuple)> = Vec::new();
    for (name, t) in builtin() {
        if classify(&t)?.kind != TupleKind::Bk {
            continue;
        }
        let p = build_poset(&t)?;
        for el in &p.elements {
            let brute = simplex_equivalent(&el.quotient)?;
            let lir = el.irr_class == IrrClass::Lir;
            check(
                &mut checks,
                format!("lir search {name} {}", el.principal_ideal),
                brute == lir,
                format!("class {:?}, simplex search {brute}", el.irr_class),
            );
        }
        if t.ambient_rank() <= 2 {
            oracle_inputs.push((name.to_string(), t));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..random {
        let rank = 1 + i % 2;
        oracle_inputs.push((format!("random #{i}"), random_bk(&mut rng, rank, 5)));
    }
    for (i, (name, t)) in oracle_inputs.iter().enumerate() {
        let v = bernstein_oracle(t, trials, seed.wrapping_add(i as u64))?;
        check(
            &mut checks,
            format!("root count {name}"),
            v.agrees && v.mismatches == 0,
            format!(
                "mixed volume {}, counts {:?}, rejected draws {}",
                v.mixed_volume, v.counts, v.rejected
            ),
        );
    }
    for d in 2..=5 {
        let got = matsui_takeuchi_degree(&Support::segment(d), 1)?;
        let want = DegreeValue::Known(BigInt::from(2 * d - 2));
        check(
            &mut checks,
            format!("univariate discriminant degree d={d}"),
            got == want,
            format!("{got}"),
        );
    }
    let prism = cayley_set(&builtin()[2].1);
    let got = matsui_takeuchi_degree(&prism, 2)?;
    check(
        &mut checks,
        "determinantal degree".into(),
        got == DegreeValue::Known(BigInt::from(3)),
        format!("{got}"),
    );
    for d1 in 1..=4 {
        for d2 in 1..=4 {
            let t = SupportTuple::new(1, vec![Support::segment(d1), Support::segment(d2)])?;
            let got = resultant_degree(&t, &t.all())?;
            check(
                &mut checks,
                format!("resultant degree {d1}+{d2}"),
                got == BigInt::from(d1 + d2),
                got.to_string(),
            );
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(SelfCheck {
        seed,
        trials,
        passed,
        checks,
    })
}
