//! Additive energy of subsets of F_q and the fiber alignment energy of
//! planar sets.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::geometry::{max_fiber, PointSet};

/// E₊(P, Q) together with the bound |P||Q|·min(|P|, |Q|).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnergyReport {
    pub value: u64,
    pub trivial_bound: u64,
    pub sizes: [u64; 2],
}

impl EnergyReport {
    /// The weaker bound (|P||Q|)^{3/2}, checked in squared form.
    pub fn within_power_bound(&self) -> bool {
        let prod = self.sizes[0] as u128 * self.sizes[1] as u128;
        (self.trivial_bound as u128).pow(2) <= prod.pow(3)
    }
}

/// Reusable representation-function buffer.
struct Scratch {
    r: Vec<u64>,
    touched: Vec<usize>,
}

impl Scratch {
    fn new(q: usize) -> Self {
        Scratch { r: vec![0; q], touched: Vec::new() }
    }

    /// Σ_w r_{P+Q}(w)² for sets given as deduplicated slices.
    fn energy(&mut self, field: &Field, p: &[Elem], q: &[Elem]) -> u64 {
        for &x in p {
            for &y in q {
                let w = field.add(x, y).index();
                if self.r[w] == 0 {
                    self.touched.push(w);
                }
                self.r[w] += 1;
            }
        }
        let mut total = 0u64;
        for &w in &self.touched {
            total += self.r[w] * self.r[w];
            self.r[w] = 0;
        }
        self.touched.clear();
        total
    }
}

fn as_set(field: &Field, xs: &[Elem]) -> Result<Vec<Elem>> {
    if xs.iter().any(|&x| !field.contains(x)) {
        return Err(Error::MixedFields);
    }
    let mut v = xs.to_vec();
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

/// E₊(P, Q) = |{(x, x′, y, y′) ∈ P² × Q² : x + y = x′ + y′}|, computed as
/// Σ_w r_{P+Q}(w)². Inputs are treated as sets.
pub fn additive_energy(field: &Field, p: &[Elem], q: &[Elem]) -> Result<EnergyReport> {
    let p = as_set(field, p)?;
    let q = as_set(field, q)?;
    let value = Scratch::new(field.size()).energy(field, &p, &q);
    let (np, nq) = (p.len() as u64, q.len() as u64);
    Ok(EnergyReport { value, trivial_bound: np * nq * np.min(nq), sizes: [np, nq] })
}

/// Σ_{u,u′} E₊(E_u, E_u′) over ordered fiber pairs; empty fibers add nothing.
pub fn fiber_energy(e: &PointSet) -> Result<u64> {
    if e.is_empty() {
        return Err(Error::EmptySet);
    }
    let field = e.field();
    let fibers: Vec<&Vec<Elem>> = e.fibers().values().collect();
    Ok(fibers
        .par_iter()
        .map_init(
            || Scratch::new(field.size()),
            |scratch, a| fibers.iter().map(|b| scratch.energy(field, a, b)).sum::<u64>(),
        )
        .sum())
}

/// Checks E₊(E_u, E_u′) ≤ |E_u||E_u′|·min ≤ (|E_u||E_u′|)^{3/2} on every
/// ordered pair of nonempty fibers; returns (pairs checked, violations).
pub fn fiber_pair_trivial_bounds(e: &PointSet) -> Result<(u64, u64)> {
    if e.is_empty() {
        return Err(Error::EmptySet);
    }
    let field = e.field();
    let fibers: Vec<&Vec<Elem>> = e.fibers().values().collect();
    let violations = fibers
        .par_iter()
        .map_init(
            || Scratch::new(field.size()),
            |scratch, a| {
                fibers
                    .iter()
                    .filter(|b| {
                        let (na, nb) = (a.len() as u64, b.len() as u64);
                        let rep = EnergyReport {
                            value: scratch.energy(field, a, b),
                            trivial_bound: na * nb * na.min(nb),
                            sizes: [na, nb],
                        };
                        rep.value > rep.trivial_bound || !rep.within_power_bound()
                    })
                    .count() as u64
            },
        )
        .sum();
    Ok(((fibers.len() * fibers.len()) as u64, violations))
}

/// K_E·|E|², an upper bound for [`fiber_energy`].
pub fn fiber_energy_bound(e: &PointSet) -> Result<u64> {
    let k = max_fiber(e)? as u64;
    let n = e.len() as u64;
    Ok(k * n * n)
}
