//! Independent checks used by tests and `selfcheck`: an exact root counter
//! for generic systems on BK-tuples of rank at most 2, and a brute-force
//! search deciding whether an irreducible tuple is a tuple of translated
//! standard simplexes after a common unimodular map.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{classify, TupleKind};
use crate::exact::{self, bareiss_big};
use crate::lattice::{smith_decompose, Sublattice};
use crate::support::{normalize, SupportTuple};
use crate::volume::mixed_volume;
use crate::error::{AtlasError, Result};

const COEFFICIENT_RANGE: i64 = 1000;
const REDRAWS: usize = 50;

/// Outcome of [`bernstein_oracle`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleVerdict {
    #[serde(serialize_with = "crate::document::big_number")]
    pub mixed_volume: BigInt,
    /// Torus root counts of the accepted draws.
    pub counts: Vec<usize>,
    /// Draws discarded as non-generic.
    pub rejected: usize,
    /// Accepted draws whose count differs from the mixed volume.
    pub mismatches: usize,
    /// The largest observed count equals the mixed volume.
    pub agrees: bool,
}

/// Counts the torus roots of `trials` random integer systems supported on
/// `t` by exact elimination and compares with the mixed volume.
pub fn bernstein_oracle(t: &SupportTuple, trials: usize, seed: u64) -> Result<OracleVerdict> {
    if t.ambient_rank() > 2 {
        return Err(AtlasError::RankTooHigh(t.ambient_rank()));
    }
    if classify(t)?.kind != TupleKind::Bk {
        return Err(AtlasError::NotBk);
    }
    let mv = mixed_volume(t)?;
    // Roots are counted in coordinates of the lattice the supports generate.
    // The torus of the saturated span covers that torus `index`-to-one, and
    // the fibres are exactly the orbits no monomial projection separates.
    let span = Sublattice::span(t.ambient_rank(), &t.span_generators(&t.all()));
    let index: BigInt = smith_decompose(span.basis()).invariant_factors().iter().product();
    let index = exact::to_i64(&index).ok_or(AtlasError::CoordinateOverflow)? as usize;
    let (local, _) = normalize(t)?;
    let sets: Vec<Vec<Vec<i64>>> = local.supports().iter().map(|s| s.points().to_vec()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Vec::with_capacity(trials);
    let mut rejected = 0;
    for _ in 0..trials {
        let mut done = false;
        for _ in 0..REDRAWS {
            let count = match sets.len() {
                0 => Some(1),
                1 => count_univariate(&sets[0], &mut rng),
                2 => count_bivariate(&sets[0], &sets[1], &mut rng)?,
                n => return Err(AtlasError::RankTooHigh(n)),
            };
            match count {
                Some(c) => {
                    counts.push(c * index);
                    done = true;
                    break;
                }
                None => rejected += 1,
            }
        }
        if !done {
            return Err(AtlasError::Precondition(format!(
                "no generic draw in {REDRAWS} attempts"
            )));
        }
    }
    let target = exact::to_i64(&mv).ok_or(AtlasError::CoordinateOverflow)? as usize;
    let mismatches = counts.iter().filter(|&&c| c != target).count();
    let agrees = counts.iter().max() == Some(&target);
    Ok(OracleVerdict {
        mixed_volume: mv,
        counts,
        rejected,
        mismatches,
        agrees,
    })
}

fn coefficient(rng: &mut ChaCha8Rng) -> BigInt {
    loop {
        let c = rng.gen_range(-COEFFICIENT_RANGE..=COEFFICIENT_RANGE);
        if c != 0 {
            return BigInt::from(c);
        }
    }
}

/// Dense univariate polynomial over `Q`, lowest degree first, trimmed.
#[derive(Clone, Debug, PartialEq)]
struct Poly(Vec<BigRational>);

impl Poly {
    fn from_ints(c: &[BigInt]) -> Poly {
        Poly(c.iter().cloned().map(BigRational::from_integer).collect()).trim()
    }

    fn trim(mut self) -> Poly {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
        .trim()
    }

    fn rem(&self, d: &Poly) -> Poly {
        let mut r = self.0.clone();
        let lead = d.0.last().expect("nonzero divisor");
        while r.len() >= d.0.len() {
            let q = r.last().expect("nonempty") / lead;
            let shift = r.len() - d.0.len();
            for (i, c) in d.0.iter().enumerate() {
                r[shift + i] -= &q * c;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Poly(r).trim()
    }

    fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    /// Drops factors of `x`.
    fn strip_x(mut self) -> Poly {
        let zeros = self.0.iter().take_while(|c| c.is_zero()).count();
        self.0.drain(..zeros);
        self
    }

    fn shares_root_with(&self, other: &Poly) -> bool {
        !other.is_zero() && self.gcd(other).degree() > 0
    }
}

/// Distinct nonzero roots of a random polynomial on `set ⊂ Z`, or `None`
/// for a draw with a repeated root.
fn count_univariate(set: &[Vec<i64>], rng: &mut ChaCha8Rng) -> Option<usize> {
    let lo = set.iter().map(|p| p[0]).min()?;
    let hi = set.iter().map(|p| p[0]).max()?;
    let mut c = vec![BigInt::zero(); (hi - lo) as usize + 1];
    for p in set {
        c[(p[0] - lo) as usize] = coefficient(rng);
    }
    let f = Poly::from_ints(&c).strip_x();
    if f.shares_root_with(&f.derivative()) {
        return None;
    }
    Some(f.degree())
}

type Bivariate = Vec<Vec<BigInt>>;

/// Coefficients indexed `[y degree][x degree]`, shifted to start at zero.
fn random_bivariate(set: &[Vec<i64>], rng: &mut ChaCha8Rng) -> Bivariate {
    let lx = set.iter().map(|p| p[0]).min().expect("nonempty");
    let ly = set.iter().map(|p| p[1]).min().expect("nonempty");
    let hx = set.iter().map(|p| p[0]).max().expect("nonempty");
    let hy = set.iter().map(|p| p[1]).max().expect("nonempty");
    let mut f = vec![vec![BigInt::zero(); (hx - lx) as usize + 1]; (hy - ly) as usize + 1];
    for p in set {
        f[(p[1] - ly) as usize][(p[0] - lx) as usize] = coefficient(rng);
    }
    f
}

fn eval(c: &[BigInt], x: &BigInt) -> BigInt {
    c.iter().rev().fold(BigInt::zero(), |acc, a| acc * x + a)
}

/// Sylvester determinant in `y` of `f(x0, y)` and `g(x0, y)` with the
/// formal degrees of `f` and `g`.
fn sylvester_at(f: &Bivariate, g: &Bivariate, x0: &BigInt) -> BigInt {
    let fv: Vec<BigInt> = f.iter().map(|c| eval(c, x0)).collect();
    let gv: Vec<BigInt> = g.iter().map(|c| eval(c, x0)).collect();
    let (m, n) = (fv.len() - 1, gv.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut r = vec![BigInt::zero(); size];
        for (j, c) in fv.iter().rev().enumerate() {
            r[i + j] = c.clone();
        }
        rows.push(r);
    }
    for i in 0..m {
        let mut r = vec![BigInt::zero(); size];
        for (j, c) in gv.iter().rev().enumerate() {
            r[i + j] = c.clone();
        }
        rows.push(r);
    }
    bareiss_big(rows)
}

/// Polynomial through `(i, values[i])`, by Newton divided differences.
fn interpolate(values: &[BigInt]) -> Poly {
    let n = values.len();
    let mut dd: Vec<BigRational> = values.iter().cloned().map(BigRational::from_integer).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / BigRational::from_integer(BigInt::from(level));
        }
    }
    // Horner on the Newton basis (x - 0)(x - 1)...
    let mut acc: Vec<BigRational> = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut next = vec![BigRational::zero(); n];
        for (k, c) in acc.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k + 1 < n {
                next[k + 1] += c;
            }
            next[k] -= c * BigRational::from_integer(BigInt::from(i));
        }
        next[0] += &dd[i];
        acc = next;
    }
    Poly(acc).trim()
}

/// The identity half of the time, otherwise a small shear; enough to
/// separate the x-coordinates of the roots of a generic draw.
fn random_unimodular(rng: &mut ChaCha8Rng) -> [[i64; 2]; 2] {
    if rng.gen_bool(0.5) {
        return [[1, 0], [0, 1]];
    }
    let a = rng.gen_range(-1..=1);
    let b = rng.gen_range(-2..=2);
    // [[1, a], [0, 1]] · [[1, 0], [b, 1]]
    [[1 + a * b, a], [b, 1]]
}

fn transform(set: &[Vec<i64>], u: &[[i64; 2]; 2]) -> Vec<Vec<i64>> {
    set.iter()
        .map(|p| vec![u[0][0] * p[0] + u[0][1] * p[1], u[1][0] * p[0] + u[1][1] * p[1]])
        .collect()
}

/// Torus roots of a random system on two sets in `Z^2`, or `None` for a
/// non-generic draw.
fn count_bivariate(a: &[Vec<i64>], b: &[Vec<i64>], rng: &mut ChaCha8Rng) -> Result<Option<usize>> {
    let u = random_unimodular(rng);
    let (a, b) = (transform(a, &u), transform(b, &u));
    let f = random_bivariate(&a, rng);
    let g = random_bivariate(&b, rng);
    if f.len() < 2 || g.len() < 2 {
        return Ok(None);
    }
    let dx = |h: &Bivariate| h.iter().map(|c| c.len() - 1).max().unwrap_or(0);
    let bound = dx(&f) * (g.len() - 1) + dx(&g) * (f.len() - 1);
    let values: Vec<BigInt> = (0..=bound)
        .map(|x| sylvester_at(&f, &g, &BigInt::from(x)))
        .collect();
    let r = interpolate(&values);
    if r.0.iter().any(|c| !c.is_integer()) {
        return Err(AtlasError::Invariant("resultant with non-integral coefficients".into()));
    }
    let r = r.strip_x();
    if r.is_zero() {
        return Ok(None);
    }
    if r.shares_root_with(&r.derivative()) {
        return Ok(None);
    }
    let low = Poly::from_ints(&f[0]).gcd(&Poly::from_ints(&g[0]));
    let high = Poly::from_ints(f.last().expect("nonempty")).gcd(&Poly::from_ints(g.last().expect("nonempty")));
    if r.shares_root_with(&low) || r.shares_root_with(&high) {
        return Ok(None);
    }
    Ok(Some(r.degree()))
}

/// Whether an irreducible tuple is `(v_i + U Δ_n)` for a common unimodular
/// `U` and translations `v_i`, by brute force over vertex choices. The
/// tuple is first rewritten in the lattice it generates.
pub fn simplex_equivalent(t: &SupportTuple) -> Result<bool> {
    let (local, _) = normalize(t)?;
    let n = local.ambient_rank();
    let sets: Vec<&[Vec<i64>]> = local.supports().iter().map(|s| s.points()).collect();
    if sets.len() != n || sets.iter().any(|s| s.len() != n + 1) {
        return Ok(false);
    }
    if n == 0 {
        return Ok(true);
    }
    let shape = |set: &[Vec<i64>], v: &Vec<i64>| -> Vec<Vec<i64>> {
        let mut d: Vec<Vec<i64>> = set
            .iter()
            .filter(|p| *p != v)
            .map(|p| p.iter().zip(v).map(|(a, b)| a - b).collect())
            .collect();
        d.sort();
        d
    };
    for v0 in sets[0] {
        let edges = shape(sets[0], v0);
        if !exact::det_i64(&edges).abs().is_one() {
            continue;
        }
        if sets[1..]
            .iter()
            .all(|s| s.iter().any(|v| shape(s, v) == edges))
        {
            return Ok(true);
        }
    }
    Ok(false)
}
