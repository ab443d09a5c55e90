//! Seeded random tuple generators for property tests and `selfcheck`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::classify::{classify, TupleKind};
use crate::support::{Support, SupportTuple};

/// A random support of `1..=max_points` points living in a random
/// coordinate subspace of `Z^rank`, with coordinates in `0..=span`.
pub fn random_support<R: Rng>(rng: &mut R, rank: usize, max_points: usize, span: i64) -> Support {
    let mut coords: Vec<usize> = (0..rank).collect();
    coords.shuffle(rng);
    let used = rng.gen_range(1..=rank.max(1)).min(rank);
    coords.truncate(used);
    let count = rng.gen_range(1..=max_points.max(1));
    let mut pts = Vec::with_capacity(count);
    for _ in 0..count {
        let mut p = vec![0i64; rank];
        for &c in &coords {
            p[c] = rng.gen_range(0..=span);
        }
        pts.push(p);
    }
    Support::new(pts).expect("at least one point")
}

/// `k` random supports in `Z^rank`.
pub fn random_tuple<R: Rng>(rng: &mut R, rank: usize, k: usize, max_points: usize) -> SupportTuple {
    let supports = (0..k).map(|_| random_support(rng, rank, max_points, 2)).collect();
    SupportTuple::new(rank, supports).expect("consistent dimensions")
}

/// A random tuple of the requested kind, by rejection sampling; `k` is the
/// number of supports.
pub fn random_of_kind<R: Rng>(
    rng: &mut R,
    kind: TupleKind,
    rank: usize,
    k: usize,
    max_points: usize,
) -> SupportTuple {
    loop {
        let t = random_tuple(rng, rank, k, max_points);
        if classify(&t).map(|c| c.kind) == Ok(kind) {
            return t;
        }
    }
}

/// A random BK-tuple with as many supports as `rank`.
pub fn random_bk<R: Rng>(rng: &mut R, rank: usize, max_points: usize) -> SupportTuple {
    random_of_kind(rng, TupleKind::Bk, rank, rank, max_points)
}

/// A random essential linearly dependent tuple of `rank + extra` full
/// dimensional supports.
pub fn random_essential_dependent<R: Rng>(
    rng: &mut R,
    rank: usize,
    extra: usize,
    max_points: usize,
) -> SupportTuple {
    loop {
        let supports: Vec<Support> = (0..rank + extra)
            .map(|_| {
                let count = rng.gen_range(rank + 1..=max_points.max(rank + 1));
                let pts = (0..count)
                    .map(|_| (0..rank).map(|_| rng.gen_range(0..=2)).collect())
                    .collect();
                Support::new(pts).expect("nonempty")
            })
            .collect();
        if supports.iter().any(|s| s.affine_dim() != rank) {
            continue;
        }
        let t = SupportTuple::new(rank, supports).expect("consistent dimensions");
        if let Ok(c) = classify(&t) {
            if c.kind == TupleKind::LinearlyDependent && c.essential {
                return t;
            }
        }
    }
}
