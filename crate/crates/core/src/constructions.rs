//! Extremal constructions with exact predicted statistics, and seeded random
//! point sets.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`)
//! with `Rng::gen_range` for bounded integers. Sweeps derive one seed per
//! parameter point with [`derive_seed`], a splitmix64 mix of the base seed
//! and the point index.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{self, floor_root, to_f64, BoundReport};
use crate::energy::fiber_energy;
use crate::error::{domain, Error, Result};
use crate::field::{is_prime, subfield_elements, subspace_containing, Elem, Field, Subspace};
use crate::geometry::{distance_profile, max_fiber, Point, PointSet};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionKind {
    Grid,
    Subspace,
    SharpnessGrid,
    SharpnessSubspace,
}

impl ConstructionKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstructionKind::Grid => "grid",
            ConstructionKind::Subspace => "subspace",
            ConstructionKind::SharpnessGrid => "sharpness-grid",
            ConstructionKind::SharpnessSubspace => "sharpness-subspace",
        }
    }
}

/// How the distance set relates to the target subspace.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Contained,
    Equal,
}

/// The subspace that traps the distance set.
#[derive(Clone, Debug, Serialize)]
pub struct Target {
    pub basis: Vec<String>,
    pub dimension: usize,
    pub size: u64,
    pub relation: Relation,
    #[serde(skip)]
    pub subspace: Subspace,
}

/// x^power written exactly as a reduced fraction, for an x that is only
/// rational after raising to `power`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerRatio {
    pub approx: f64,
    pub power: u32,
    pub exact_power: String,
}

impl PowerRatio {
    fn new(value_to_power: BigRational, power: u32) -> Self {
        let approx = to_f64(&value_to_power).powf(1.0 / power as f64);
        PowerRatio { approx, power, exact_power: value_to_power.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Predictions {
    pub size: u64,
    pub max_fiber: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<u64>,
    /// Exact |Δ_P(E)|; asserted only when the construction is applicable.
    pub delta_size: Option<u64>,
    pub delta_upper: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionResult {
    pub kind: ConstructionKind,
    pub params: BTreeMap<String, String>,
    pub field: String,
    #[serde(skip)]
    pub set: PointSet,
    pub predicted: Predictions,
    pub target: Option<Target>,
    pub applicable: bool,
    pub reason: String,
    /// Observed size against the asymptotic size, as an exact power.
    pub size_ratio: Option<PowerRatio>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NamedCheck {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub passed: bool,
}

impl NamedCheck {
    fn new(name: &str, expected: impl ToString, observed: impl ToString, passed: bool) -> Self {
        NamedCheck { name: name.into(), expected: expected.to_string(), observed: observed.to_string(), passed }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Observed {
    pub size: u64,
    pub max_fiber: u64,
    pub delta_size: u64,
    pub fiber_energy: u64,
    pub second_moment: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionCheck {
    pub observed: Observed,
    pub checks: Vec<NamedCheck>,
    pub bounds: Vec<BoundReport>,
    pub passed: bool,
}

impl ConstructionResult {
    /// Exhaustively computes the distance set and compares every prediction
    /// that is asserted at these parameters, plus the bound soundness checks.
    pub fn verify(&self) -> Result<ConstructionCheck> {
        let e = &self.set;
        let q = e.field().order() as u64;
        let profile = distance_profile(e)?;
        let observed = Observed {
            size: e.len() as u64,
            max_fiber: max_fiber(e)? as u64,
            delta_size: profile.support_size() as u64,
            fiber_energy: fiber_energy(e)?,
            second_moment: profile.second_moment(),
        };
        let pred = &self.predicted;
        let mut checks = vec![
            NamedCheck::new("size", pred.size, observed.size, pred.size == observed.size),
            NamedCheck::new("max_fiber", pred.max_fiber, observed.max_fiber, pred.max_fiber == observed.max_fiber),
        ];
        if let (true, Some(d)) = (self.applicable, pred.delta_size) {
            checks.push(NamedCheck::new("delta_size", d, observed.delta_size, d == observed.delta_size));
        }
        if let Some(u) = pred.delta_upper {
            checks.push(NamedCheck::new(
                "delta_upper",
                format!("<= {u}"),
                observed.delta_size,
                observed.delta_size <= u,
            ));
        }
        if let Some(target) = &self.target {
            let mask = target.subspace.membership();
            let support = profile.support();
            let inside = support.iter().all(|t| mask[t.index()]);
            checks.push(NamedCheck::new("delta_in_target", "true", inside, inside));
            if target.relation == Relation::Equal {
                let equal = inside && support.len() as u64 == target.size;
                checks.push(NamedCheck::new("delta_equals_target", "true", equal, equal));
            }
        }
        if self.kind == ConstructionKind::SharpnessSubspace {
            // |E|·q^ε = q·√K, with q^ε = p^{km − dim V}, compared squared
            let p = BigUint::from(e.field().characteristic());
            let km = e.field().degree() as u32;
            let dv = self.target.as_ref().map(|t| t.dimension).unwrap_or(0) as u32;
            let lhs = (BigUint::from(observed.size) * p.pow(km - dv)).pow(2);
            let rhs = BigUint::from(q).pow(2) * BigUint::from(observed.max_fiber);
            checks.push(NamedCheck::new("size_relation", &rhs, &lhs, lhs == rhs));
        }
        let bounds = bounds::single_set_reports(
            q,
            observed.size,
            observed.max_fiber,
            observed.fiber_energy,
            observed.delta_size,
            observed.second_moment,
        )?;
        let passed = checks.iter().all(|c| c.passed) && bounds.iter().all(|b| b.satisfied != Some(false));
        Ok(ConstructionCheck { observed, checks, bounds, passed })
    }
}

fn check_odd_prime(p: u64) -> Result<()> {
    if !is_prime(p) || p == 2 {
        return Err(domain(format!("p = {p} is not an odd prime")));
    }
    Ok(())
}

fn check_open_unit(eps: Rational64) -> Result<()> {
    if eps <= Rational64::zero() || eps >= Rational64::one() {
        return Err(domain(format!("eps = {eps} outside (0, 1)")));
    }
    Ok(())
}

/// ⌊p^{num/den}⌋
fn floor_pow(p: u64, num: i64, den: i64) -> u64 {
    let x = BigUint::from(p).pow(num as u32);
    let r = floor_root(&x, den as u32);
    r.try_into().expect("root below p")
}

fn interval(field: &Field, len: u64) -> Vec<Elem> {
    (0..len as i64).map(|i| field.from_int(i)).collect()
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn rational_pow(base: u64, exp: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(base).pow(exp))
}

fn grid_common(kind: ConstructionKind, p: u64, eps: Rational64, m: u64, n: u64) -> Result<ConstructionResult> {
    let field = Field::prime(p)?;
    let set = PointSet::grid(&field, &interval(&field, m), &interval(&field, n))?;
    let no_overlap = n >= m;
    let no_wrap = m * m + 2 * n < p;
    let applicable = no_overlap && no_wrap;
    let reason = if applicable {
        format!("N >= M ({n} >= {m}) and M^2 + 2N = {} < p = {p}", m * m + 2 * n)
    } else if !no_overlap {
        format!("N = {n} < M = {m}: consecutive translates need not overlap")
    } else {
        format!("M^2 + 2N = {} >= p = {p}: distances wrap around", m * m + 2 * n)
    };
    let (a, b) = (*eps.numer() as u32, *eps.denom() as u32);
    // |E| / p^{3/2 − ε} for the grid, |E|·p^ε / (p·√K) for the sharpness grid
    let size_ratio = match kind {
        ConstructionKind::Grid => PowerRatio::new(
            rational_pow(m * n, 2 * b) / rational_pow(p, 3 * b - 2 * a),
            2 * b,
        ),
        _ => PowerRatio::new(
            rational_pow(m * n, 2 * b) * rational_pow(p, 2 * a) / (rational_pow(p, 2 * b) * rational_pow(n, b)),
            2 * b,
        ),
    };
    Ok(ConstructionResult {
        kind,
        params: params(&[("p", p.to_string()), ("eps", eps.to_string())]),
        field: field.to_string(),
        set,
        predicted: Predictions {
            size: m * n,
            max_fiber: n,
            grid_m: Some(m),
            grid_n: Some(n),
            delta_size: Some((m - 1) * (m - 1) + 2 * n - 1),
            delta_upper: None,
        },
        target: None,
        applicable,
        reason,
        size_ratio: Some(size_ratio),
    })
}

/// {0..M−1} × {0..N−1} in F_p² with M = ⌊p^{1/2−ε/2}⌋ and N = ⌊p^{1−ε/2}⌋.
pub fn grid_construction(p: u64, eps: Rational64) -> Result<ConstructionResult> {
    check_odd_prime(p)?;
    check_open_unit(eps)?;
    let (a, b) = (*eps.numer(), *eps.denom());
    let m = floor_pow(p, b - a, 2 * b);
    let n = floor_pow(p, 2 * b - a, 2 * b);
    grid_common(ConstructionKind::Grid, p, eps, m, n)
}

/// The grid with the shorter columns N = ⌊p^{1−ε}⌋.
pub fn sharpness_grid(p: u64, eps: Rational64) -> Result<ConstructionResult> {
    check_odd_prime(p)?;
    check_open_unit(eps)?;
    let (a, b) = (*eps.numer(), *eps.denom());
    let m = floor_pow(p, b - a, 2 * b);
    let n = floor_pow(p, b - a, b);
    grid_common(ConstructionKind::SharpnessGrid, p, eps, m, n)
}

/// (1 − ε)·total as an integer, if it is one.
fn integral_dimension(eps: Rational64, total: i64) -> Option<i64> {
    let d = (Rational64::one() - eps) * Rational64::from_integer(total);
    d.is_integer().then(|| d.to_integer())
}

fn target(subspace: &Subspace, relation: Relation) -> Target {
    let f = subspace.field();
    Target {
        basis: subspace.basis().iter().map(|&b| f.format_elem(b)).collect(),
        dimension: subspace.dimension(),
        size: subspace.size(),
        relation,
        subspace: subspace.clone(),
    }
}

/// H × V in F_q² with q = p^{2m}, H the subfield of order p^m and V ⊇ H of
/// dimension (1 − ε)·2m.
pub fn subspace_construction(p: u64, m: u64, eps: Rational64) -> Result<ConstructionResult> {
    check_odd_prime(p)?;
    if m == 0 {
        return Err(domain("m must be positive"));
    }
    let d = integral_dimension(eps, 2 * m as i64)
        .ok_or_else(|| domain(format!("(1 - eps)·2m = (1 - {eps})·{} is not an integer", 2 * m)))?;
    if d < m as i64 || d > 2 * m as i64 {
        return Err(domain(format!("dimension (1 - eps)·2m = {d} outside [m, 2m] = [{m}, {}]", 2 * m)));
    }
    let field = Field::new(p, 2 * m as usize, None)?;
    let h = subfield_elements(&field, m as usize)?;
    let v = subspace_containing(&h, d as usize)?;
    let set = PointSet::grid(&field, &h.elements(), &v.elements())?;
    Ok(ConstructionResult {
        kind: ConstructionKind::Subspace,
        params: params(&[("p", p.to_string()), ("m", m.to_string()), ("eps", eps.to_string())]),
        field: field.to_string(),
        set,
        predicted: Predictions {
            size: h.size() * v.size(),
            max_fiber: v.size(),
            grid_m: None,
            grid_n: None,
            delta_size: None,
            delta_upper: Some(v.size()),
        },
        target: Some(target(&v, Relation::Contained)),
        applicable: true,
        reason: format!("dim H = {m}, dim V = {d}"),
        size_ratio: None,
    })
}

/// U × V in F_q² with q = p^{km}: V ⊇ H of dimension (1 − ε)km, and U
/// spanned by the first (1 − ε)km/2 basis vectors of H.
pub fn sharpness_subspace(p: u64, k: u64, m: u64, eps: Rational64) -> Result<ConstructionResult> {
    check_odd_prime(p)?;
    if k < 2 || m == 0 {
        return Err(domain(format!("need k >= 2 and m >= 1, got k = {k}, m = {m}")));
    }
    if eps < Rational64::zero() || eps >= Rational64::one() {
        return Err(domain(format!("eps = {eps} outside [0, 1)")));
    }
    let scaled = (Rational64::one() - eps) * Rational64::from_integer(k as i64);
    if scaled < Rational64::one() || scaled > Rational64::from_integer(2) {
        return Err(domain(format!("k(1 - eps) = {scaled} outside [1, 2]")));
    }
    let km = (k * m) as i64;
    let dv = integral_dimension(eps, km)
        .ok_or_else(|| domain(format!("(1 - eps)·km = (1 - {eps})·{km} is not an integer")))?;
    if dv % 2 != 0 || dv == 0 {
        return Err(domain(format!("(1 - eps)·km/2 = {dv}/2 is not a positive integer")));
    }
    let du = (dv / 2) as usize;
    let field = Field::new(p, km as usize, None)?;
    let h = subfield_elements(&field, m as usize)?;
    let v = subspace_containing(&h, dv as usize)?;
    let u = Subspace::new(&field, h.basis()[..du].to_vec())?;
    let set = PointSet::grid(&field, &u.elements(), &v.elements())?;
    Ok(ConstructionResult {
        kind: ConstructionKind::SharpnessSubspace,
        params: params(&[
            ("p", p.to_string()),
            ("k", k.to_string()),
            ("m", m.to_string()),
            ("eps", eps.to_string()),
        ]),
        field: field.to_string(),
        set,
        predicted: Predictions {
            size: u.size() * v.size(),
            max_fiber: v.size(),
            grid_m: None,
            grid_n: None,
            delta_size: Some(v.size()),
            delta_upper: Some(v.size()),
        },
        target: Some(target(&v, Relation::Equal)),
        applicable: true,
        reason: format!("dim U = {du}, dim H = {m}, dim V = {dv}"),
        size_ratio: None,
    })
}

/// splitmix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `index`-th point of a sweep: splitmix64(seed ⊕ splitmix64(index)).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn point_at(q: u64, i: u64) -> Point {
    Point(Elem((i / q) as u32), Elem((i % q) as u32))
}

/// The first `n` entries of a partial Fisher–Yates shuffle of the points of
/// F_q² in canonical order (index u·q + v for the point (u, v)).
pub fn random_set(field: &Field, n: u64, seed: u64) -> Result<PointSet> {
    let q = field.order() as u64;
    if n == 0 || n > q * q {
        return Err(domain(format!("n = {n} outside [1, q²] for q = {q}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut idx: Vec<u64> = (0..q * q).collect();
    for i in 0..n as usize {
        let j = rng.gen_range(i..idx.len());
        idx.swap(i, j);
    }
    PointSet::new(field, idx[..n as usize].iter().map(|&i| point_at(q, i)))
}

/// A random n-point set whose largest fiber has exactly `cap` points.
///
/// A uniformly chosen fiber is filled with `cap` random points first; the
/// remaining points come from a partial Fisher–Yates shuffle of the other
/// fibers, skipping points whose fiber is already full.
pub fn random_set_with_fiber_cap(field: &Field, n: u64, cap: u64, seed: u64) -> Result<PointSet> {
    let q = field.order() as u64;
    if cap == 0 || cap > q || n < cap || n > cap * q {
        return Err(Error::InfeasibleParameters(format!(
            "need 1 <= K <= q and K <= n <= K·q, got n = {n}, K = {cap}, q = {q}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let u0 = rng.gen_range(0..q);
    let mut ys: Vec<u64> = (0..q).collect();
    for i in 0..cap as usize {
        let j = rng.gen_range(i..ys.len());
        ys.swap(i, j);
    }
    let mut points: Vec<Point> = ys[..cap as usize].iter().map(|&y| point_at(q, u0 * q + y)).collect();
    let mut counts = vec![0u64; q as usize];
    let mut rest: Vec<u64> = (0..q * q).filter(|i| i / q != u0).collect();
    let mut i = 0;
    while (points.len() as u64) < n {
        let j = rng.gen_range(i..rest.len());
        rest.swap(i, j);
        let pt = rest[i];
        let u = (pt / q) as usize;
        if counts[u] < cap {
            counts[u] += 1;
            points.push(point_at(q, pt));
        }
        i += 1;
    }
    PointSet::new(field, points)
}
