//! Point sets in F_q², the parabolic distance and its counting function,
//! the shear maps, vertical fibers, and the point-line incidence model.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// A point (x₁, x₂) of F_q².
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub Elem, pub Elem);

/// A finite subset of F_q², stored by vertical fibers u ↦ E_u.
///
/// Fibers are kept sorted and deduplicated; empty fibers are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    field: Field,
    fibers: BTreeMap<Elem, Vec<Elem>>,
    len: usize,
}

impl PointSet {
    /// Collects `points` into a set; repeated points are merged.
    pub fn new(field: &Field, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut fibers: BTreeMap<Elem, Vec<Elem>> = BTreeMap::new();
        for Point(u, v) in points {
            if !field.contains(u) || !field.contains(v) {
                return Err(Error::MixedFields);
            }
            fibers.entry(u).or_default().push(v);
        }
        let mut len = 0;
        for ys in fibers.values_mut() {
            ys.sort_unstable();
            ys.dedup();
            len += ys.len();
        }
        Ok(PointSet { field: field.clone(), fibers, len })
    }

    pub fn empty(field: &Field) -> Self {
        PointSet { field: field.clone(), fibers: BTreeMap::new(), len: 0 }
    }

    /// xs × ys
    pub fn grid(field: &Field, xs: &[Elem], ys: &[Elem]) -> Result<Self> {
        PointSet::new(field, xs.iter().flat_map(|&x| ys.iter().map(move |&y| Point(x, y))))
    }

    /// All of F_q².
    pub fn full_plane(field: &Field) -> Self {
        let all: Vec<Elem> = field.elements().collect();
        PointSet::grid(field, &all, &all).expect("elements of the field")
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Points in (x₁, x₂) order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.fibers.iter().flat_map(|(&u, ys)| ys.iter().map(move |&v| Point(u, v)))
    }

    pub fn contains(&self, pt: Point) -> bool {
        self.fibers.get(&pt.0).is_some_and(|ys| ys.binary_search(&pt.1).is_ok())
    }

    /// Nonempty vertical fibers.
    pub fn fibers(&self) -> &BTreeMap<Elem, Vec<Elem>> {
        &self.fibers
    }

    /// E_u (empty when no point lies above u).
    pub fn fiber(&self, u: Elem) -> &[Elem] {
        self.fibers.get(&u).map_or(&[], Vec::as_slice)
    }

    /// Applies a map to every point.
    pub fn map_points(&self, f: impl Fn(Point) -> Point) -> PointSet {
        PointSet::new(&self.field, self.points().map(f)).expect("map stays inside the field")
    }

    fn nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptySet)
        } else {
            Ok(())
        }
    }
}

/// ‖x − y‖_P = (x₂ − y₂) + (x₁ − y₁)².
pub fn parabolic_distance(field: &Field, x: Point, y: Point) -> Result<Elem> {
    if [x.0, x.1, y.0, y.1].iter().any(|&c| !field.contains(c)) {
        return Err(Error::MixedFields);
    }
    Ok(field.add(field.sub(x.1, y.1), field.square(field.sub(x.0, y.0))))
}

/// The counting function t ↦ ν(t) over ordered pairs, with derived moments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceProfile {
    q: u32,
    nu: Vec<u64>,
    support_size: usize,
    second_moment: u128,
    #[serde(skip)]
    first_moment: u64,
}

impl DistanceProfile {
    pub fn from_counts(nu: Vec<u64>) -> Self {
        let support_size = nu.iter().filter(|&&c| c > 0).count();
        let first_moment = nu.iter().sum();
        let second_moment = nu.iter().map(|&c| c as u128 * c as u128).sum();
        DistanceProfile { q: nu.len() as u32, nu, support_size, second_moment, first_moment }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Dense counts indexed by element.
    pub fn nu(&self) -> &[u64] {
        &self.nu
    }

    pub fn count(&self, t: Elem) -> u64 {
        self.nu[t.index()]
    }

    /// Δ_P as a sorted list of elements.
    pub fn support(&self) -> Vec<Elem> {
        (0..self.q).map(Elem).filter(|t| self.nu[t.index()] > 0).collect()
    }

    /// |Δ_P|
    pub fn support_size(&self) -> usize {
        self.support_size
    }

    /// Σ ν(t)
    pub fn first_moment(&self) -> u64 {
        self.first_moment
    }

    /// Σ ν(t)²
    pub fn second_moment(&self) -> u128 {
        self.second_moment
    }
}

/// Counts ν over E × F by iterating fiber pairs: for fibers above u and u′
/// the distance is (y − y′) + d with d = (u − u′)² fixed.
fn pair_counts(field: &Field, left: &PointSet, right: &PointSet) -> Vec<u64> {
    let q = field.size();
    let lf: Vec<(&Elem, &Vec<Elem>)> = left.fibers.iter().collect();
    lf.par_iter()
        .fold(
            || vec![0u64; q],
            |mut nu, &(&u, ys)| {
                for (&u2, ys2) in &right.fibers {
                    let d = field.square(field.sub(u, u2));
                    for &y in ys {
                        let base = field.add(y, d);
                        for &y2 in ys2 {
                            nu[field.sub(base, y2).index()] += 1;
                        }
                    }
                }
                nu
            },
        )
        .reduce(
            || vec![0u64; q],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// ν(t) = |{(x, y) ∈ E² : ‖x − y‖_P = t}|, including x = y.
pub fn distance_profile(e: &PointSet) -> Result<DistanceProfile> {
    e.nonempty()?;
    Ok(DistanceProfile::from_counts(pair_counts(&e.field, e, e)))
}

/// ν_{E,F}(t) = |{(x, y) ∈ E × F : ‖x − y‖_P = t}|.
pub fn bipartite_profile(e: &PointSet, f: &PointSet) -> Result<DistanceProfile> {
    if e.field != f.field {
        return Err(Error::MixedFields);
    }
    e.nonempty()?;
    f.nonempty()?;
    Ok(DistanceProfile::from_counts(pair_counts(&e.field, e, f)))
}

/// (x₁, x₂) ↦ (x₁, x₂ + x₁²)
pub fn shear_a(e: &PointSet) -> PointSet {
    let f = e.field.clone();
    e.map_points(|Point(u, v)| Point(u, f.add(v, f.square(u))))
}

/// (y₁, y₂) ↦ (y₁, y₂ − y₁²)
pub fn shear_b(e: &PointSet) -> PointSet {
    let f = e.field.clone();
    e.map_points(|Point(u, v)| Point(u, f.sub(v, f.square(u))))
}

/// Counts of the bilinear form a₂ − b₂ − 2a₁b₁ over A × B. For A, B the
/// shear images of E, F this equals ν_{E,F}.
pub fn shear_form_counts(a: &PointSet, b: &PointSet) -> Result<Vec<u64>> {
    if a.field != b.field {
        return Err(Error::MixedFields);
    }
    let field = &a.field;
    let minus_two = field.from_int(-2);
    let q = field.size();
    let mut counts = vec![0u64; q];
    for (&a1, a2s) in &a.fibers {
        for (&b1, b2s) in &b.fibers {
            let w = field.mul(minus_two, field.mul(a1, b1));
            for &a2 in a2s {
                let base = field.add(a2, w);
                for &b2 in b2s {
                    counts[field.sub(base, b2).index()] += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// K_E, the size of the largest vertical fiber.
pub fn max_fiber(e: &PointSet) -> Result<usize> {
    e.nonempty()?;
    Ok(e.fibers.values().map(Vec::len).max().unwrap_or(0))
}

/// u ↦ E_u for the nonempty fibers.
pub fn fiber_sets(e: &PointSet) -> BTreeMap<Elem, Vec<Elem>> {
    e.fibers.clone()
}

/// The line v = slope·u + intercept.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    pub slope: Elem,
    pub intercept: Elem,
}

impl Line {
    pub fn contains(&self, field: &Field, pt: Point) -> bool {
        field.add(field.mul(self.slope, pt.0), self.intercept) == pt.1
    }
}

/// The points P_t = {(x₁, x₂ + x₁²)} and lines
/// L_t = {v = 2y₁u + (y₂ − y₁² + t)} for x, y ∈ E, so that
/// I(P_t, L_t) = ν(t).
pub fn incidence_model(e: &PointSet, t: Elem) -> Result<(Vec<Point>, Vec<Line>)> {
    e.nonempty()?;
    let f = &e.field;
    if !f.contains(t) {
        return Err(Error::MixedFields);
    }
    let two = f.from_int(2);
    let points = e.points().map(|Point(x1, x2)| Point(x1, f.add(x2, f.square(x1)))).collect();
    let lines = e
        .points()
        .map(|Point(y1, y2)| Line {
            slope: f.mul(two, y1),
            intercept: f.add(f.sub(y2, f.square(y1)), t),
        })
        .collect();
    Ok((points, lines))
}

/// I(P, L) = |{(p, ℓ) ∈ P × L : p ∈ ℓ}|; repeated inputs count once.
pub fn incidence_count(field: &Field, points: &[Point], lines: &[Line]) -> Result<u64> {
    let bad = |e: Elem| !field.contains(e);
    if points.iter().any(|p| bad(p.0) || bad(p.1)) || lines.iter().any(|l| bad(l.slope) || bad(l.intercept)) {
        return Err(Error::MixedFields);
    }
    let pset: HashSet<Point> = points.iter().copied().collect();
    let mut xs: Vec<Elem> = pset.iter().map(|p| p.0).collect();
    xs.sort_unstable();
    xs.dedup();
    let lset: HashSet<Line> = lines.iter().copied().collect();
    let mut count = 0u64;
    for line in &lset {
        for &u in &xs {
            let v = field.add(field.mul(line.slope, u), line.intercept);
            if pset.contains(&Point(u, v)) {
                count += 1;
            }
        }
    }
    Ok(count)
}
