//! Closed-form bounds on distance sets and distance-count moments, in exact
//! rational arithmetic.
//!
//! Bounds that involve an irrational square root are represented by small
//! structs whose comparisons are carried out in squared form, so a
//! soundness check never depends on floating-point rounding.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{domain, Result};
use crate::field::prime_power;

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact integer square root when `x` is a perfect square.
pub fn perfect_square_root(x: u64) -> Option<u64> {
    let r = x.sqrt();
    (r * r == x).then_some(r)
}

fn check_q(q: u64) -> Result<()> {
    match prime_power(q) {
        Some((p, _)) if p != 2 => Ok(()),
        _ => Err(domain(format!("q = {q} is not an odd prime power"))),
    }
}

fn check_size_and_fiber(q: u64, n: u64, k: u64, label: &str) -> Result<()> {
    if n == 0 || n as u128 > (q as u128).pow(2) {
        return Err(domain(format!("|{label}| = {n} outside [1, q²] for q = {q}")));
    }
    if k == 0 || k > n.min(q) {
        return Err(domain(format!("K_{label} = {k} outside [1, min(|{label}|, q)]")));
    }
    Ok(())
}

/// |Δ_P(E)| ≥ q·n² / (n² + q²K).
pub fn main_lower_bound(q: u64, n: u64, k: u64) -> Result<BigRational> {
    check_q(q)?;
    check_size_and_fiber(q, n, k, "E")?;
    let n2 = big(n) * big(n);
    Ok(ratio(big(q) * &n2, &n2 + big(q) * big(q) * big(k)))
}

/// Least m with m^{2−α} ≥ q², i.e. ⌈q^{2/(2−α)}⌉, for rational 0 ≤ α < 1.
///
/// With α = a/b in lowest terms this is the least m with m^{2b−a} ≥ q^{2b}.
pub fn corollary_threshold(q: u64, alpha: Rational64) -> Result<BigUint> {
    if alpha < Rational64::zero() || alpha >= Rational64::one() {
        return Err(domain(format!("α = {alpha} outside [0, 1)")));
    }
    let (a, b) = (*alpha.numer() as u32, *alpha.denom() as u32);
    let target = BigUint::from(q).pow(2 * b);
    Ok(ceil_root(&target, 2 * b - a))
}

/// ⌊x^{1/k}⌋ exactly.
pub fn floor_root(x: &BigUint, k: u32) -> BigUint {
    x.nth_root(k)
}

/// ⌈x^{1/k}⌉ exactly.
pub fn ceil_root(x: &BigUint, k: u32) -> BigUint {
    let r = x.nth_root(k);
    if r.pow(k) == *x {
        r
    } else {
        r + 1u32
    }
}

/// |Δ_P(E)| ≥ q·n⁴ / (n⁴ + q²·E_fib(E)).
pub fn fiber_energy_lower_bound(q: u64, n: u64, efib: u64) -> Result<BigRational> {
    check_q(q)?;
    if n == 0 {
        return Err(domain("|E| must be positive"));
    }
    if efib < n {
        return Err(domain(format!("E_fib = {efib} is below the diagonal contribution {n}")));
    }
    let n4 = big(n).pow(4);
    Ok(ratio(big(q) * &n4, &n4 + big(q) * big(q) * big(efib)))
}

/// Σ_t ν(t)² ≤ n⁴/q + q·n²·K.
pub fn second_moment_upper_bound(q: u64, n: u64, k: u64) -> Result<BigRational> {
    check_q(q)?;
    check_size_and_fiber(q, n, k, "E")?;
    let n2 = big(n) * big(n);
    Ok(ratio(&n2 * &n2, big(q)) + BigRational::from_integer(big(q) * n2 * big(k)))
}

/// Σ_t ν(t)² ≤ n⁴/q + q·E_fib(E), the fiber-energy form of the estimate.
pub fn fiber_second_moment_bound(q: u64, n: u64, efib: u64) -> Result<BigRational> {
    check_q(q)?;
    let n4 = big(n).pow(4);
    Ok(ratio(n4, big(q)) + BigRational::from_integer(big(q) * big(efib)))
}

/// Parameters shared by the two-set bounds, which involve √(K_E·K_F).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BipartiteInputs {
    pub q: u64,
    pub n_e: u64,
    pub n_f: u64,
    pub k_e: u64,
    pub k_f: u64,
}

impl BipartiteInputs {
    pub fn new(q: u64, n_e: u64, n_f: u64, k_e: u64, k_f: u64) -> Result<Self> {
        check_q(q)?;
        check_size_and_fiber(q, n_e, k_e, "E")?;
        check_size_and_fiber(q, n_f, k_f, "F")?;
        Ok(BipartiteInputs { q, n_e, n_f, k_e, k_f })
    }

    fn x(&self) -> BigInt {
        big(self.n_e) * big(self.n_f)
    }

    fn kk(&self) -> BigInt {
        big(self.k_e) * big(self.k_f)
    }

    fn sqrt_kk(&self) -> Option<u64> {
        perfect_square_root(self.k_e * self.k_f)
    }
}

/// |Δ_P(E, F)| ≥ q·X / (X + q²·√(K_E K_F)) with X = |E||F|.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BipartiteLowerBound(pub BipartiteInputs);

impl BipartiteLowerBound {
    /// Exact value when K_E·K_F is a perfect square.
    pub fn exact(&self) -> Option<BigRational> {
        let i = &self.0;
        let s = i.sqrt_kk()?;
        let x = i.x();
        Some(ratio(big(i.q) * &x, &x + big(i.q) * big(i.q) * big(s)))
    }

    pub fn approx(&self) -> f64 {
        let i = &self.0;
        let x = i.n_e as f64 * i.n_f as f64;
        let q = i.q as f64;
        q * x / (x + q * q * ((i.k_e * i.k_f) as f64).sqrt())
    }

    /// observed ≥ bound, decided by D·q²·√(K_E K_F) ≥ X(q − D) squared.
    pub fn satisfied_by(&self, observed: u64) -> bool {
        let i = &self.0;
        if observed >= i.q {
            return true;
        }
        let d = big(observed);
        let q = big(i.q);
        let lhs = &d * &d * q.pow(4) * i.kk();
        let rhs = i.x().pow(2) * (&q - &d).pow(2);
        lhs >= rhs
    }
}

pub fn bipartite_lower_bound(q: u64, n_e: u64, n_f: u64, k_e: u64, k_f: u64) -> Result<BipartiteLowerBound> {
    Ok(BipartiteLowerBound(BipartiteInputs::new(q, n_e, n_f, k_e, k_f)?))
}

/// Σ_t ν_{E,F}(t)² ≤ X²/q + q·X·√(K_E K_F) with X = |E||F|.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BipartiteSecondMomentBound(pub BipartiteInputs);

impl BipartiteSecondMomentBound {
    pub fn exact(&self) -> Option<BigRational> {
        let i = &self.0;
        let s = i.sqrt_kk()?;
        let x = i.x();
        Some(ratio(x.pow(2), big(i.q)) + BigRational::from_integer(big(i.q) * x * big(s)))
    }

    pub fn approx(&self) -> f64 {
        let i = &self.0;
        let x = i.n_e as f64 * i.n_f as f64;
        let q = i.q as f64;
        x * x / q + q * x * ((i.k_e * i.k_f) as f64).sqrt()
    }

    /// observed ≤ bound, decided by (q·obs − X²)² ≤ q⁴X²K_EK_F when the
    /// left side is positive.
    pub fn satisfied_by(&self, observed: u128) -> bool {
        let i = &self.0;
        let q = big(i.q);
        let x = i.x();
        let lhs = &q * BigInt::from(observed) - x.pow(2);
        if !lhs.is_positive() {
            return true;
        }
        lhs.pow(2) <= q.pow(4) * x.pow(2) * i.kk()
    }
}

pub fn bipartite_second_moment_bound(
    q: u64,
    n_e: u64,
    n_f: u64,
    k_e: u64,
    k_f: u64,
) -> Result<BipartiteSecondMomentBound> {
    Ok(BipartiteSecondMomentBound(BipartiteInputs::new(q, n_e, n_f, k_e, k_f)?))
}

/// |I(P, L) − |P||L|/q| ≤ √(q|P||L|), as (qI − |P||L|)² ≤ q³|P||L|.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VinhBound {
    pub q: u64,
    pub n_points: u64,
    pub n_lines: u64,
}

impl VinhBound {
    pub fn holds_for(&self, incidences: u64) -> bool {
        let q = big(self.q);
        let pl = big(self.n_points) * big(self.n_lines);
        let dev = &q * big(incidences) - &pl;
        dev.pow(2) <= q.pow(3) * pl
    }
}

pub fn vinh_deviation_bound(q: u64, n_points: u64, n_lines: u64) -> VinhBound {
    VinhBound { q, n_points, n_lines }
}

/// ν(t) ≥ n²/q − √q·n, the pointwise estimate behind the q^{3/2} threshold.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointwiseCountBound {
    pub q: u64,
    pub n: u64,
}

impl PointwiseCountBound {
    /// n > q^{3/2}, i.e. n² > q³: the bound is positive and every t occurs.
    pub fn predicts_full_distance_set(&self) -> bool {
        (self.n as u128).pow(2) > (self.q as u128).pow(3)
    }

    /// n²/q − √q·n, available when q is a perfect square.
    pub fn exact_value(&self) -> Option<BigRational> {
        let r = perfect_square_root(self.q)?;
        let n = big(self.n);
        Some(ratio(&n * &n, big(self.q)) - BigRational::from_integer(big(r) * n))
    }

    /// ν ≥ n²/q − √q·n, decided by q³n² ≥ (n² − qν)² when n² > qν.
    pub fn holds_for(&self, nu: u64) -> bool {
        let q = big(self.q);
        let n = big(self.n);
        let r = &n * &n - &q * big(nu);
        if !r.is_positive() {
            return true;
        }
        q.pow(3) * &n * &n >= r.pow(2)
    }
}

pub fn pointwise_nu_lower(q: u64, n: u64) -> Result<PointwiseCountBound> {
    check_q(q)?;
    if n == 0 {
        return Err(domain("|E| must be positive"));
    }
    Ok(PointwiseCountBound { q, n })
}

/// Which way an observed value must compare with the bound.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// observed ≥ bound
    Lower,
    /// observed ≤ bound
    Upper,
}

/// A bound evaluated on concrete inputs, optionally compared with an
/// observation. `bound_num`/`bound_den` are decimal strings of the reduced
/// fraction and are absent when the bound is irrational.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub direction: Direction,
    pub inputs: BTreeMap<String, u64>,
    pub bound_num: Option<String>,
    pub bound_den: Option<String>,
    pub bound_approx: f64,
    pub observed: Option<u128>,
    pub satisfied: Option<bool>,
}

fn inputs(pairs: &[(&str, u64)]) -> BTreeMap<String, u64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

impl BoundReport {
    pub fn rational(
        name: &str,
        direction: Direction,
        input_pairs: &[(&str, u64)],
        bound: &BigRational,
        observed: Option<u128>,
    ) -> Self {
        let satisfied = observed.map(|o| {
            let o = BigRational::from_integer(BigInt::from(o));
            match direction {
                Direction::Lower => o >= *bound,
                Direction::Upper => o <= *bound,
            }
        });
        BoundReport {
            name: name.to_string(),
            direction,
            inputs: inputs(input_pairs),
            bound_num: Some(bound.numer().to_string()),
            bound_den: Some(bound.denom().to_string()),
            bound_approx: to_f64(bound),
            observed,
            satisfied,
        }
    }

    pub fn bipartite_lower(b: &BipartiteLowerBound, observed: Option<u64>) -> Self {
        let i = &b.0;
        let exact = b.exact();
        BoundReport {
            name: "bipartite_lower_bound".into(),
            direction: Direction::Lower,
            inputs: inputs(&[("q", i.q), ("n_e", i.n_e), ("n_f", i.n_f), ("k_e", i.k_e), ("k_f", i.k_f)]),
            bound_num: exact.as_ref().map(|r| r.numer().to_string()),
            bound_den: exact.as_ref().map(|r| r.denom().to_string()),
            bound_approx: b.approx(),
            observed: observed.map(u128::from),
            satisfied: observed.map(|o| b.satisfied_by(o)),
        }
    }

    pub fn bipartite_second_moment(b: &BipartiteSecondMomentBound, observed: Option<u128>) -> Self {
        let i = &b.0;
        let exact = b.exact();
        BoundReport {
            name: "bipartite_second_moment_bound".into(),
            direction: Direction::Upper,
            inputs: inputs(&[("q", i.q), ("n_e", i.n_e), ("n_f", i.n_f), ("k_e", i.k_e), ("k_f", i.k_f)]),
            bound_num: exact.as_ref().map(|r| r.numer().to_string()),
            bound_den: exact.as_ref().map(|r| r.denom().to_string()),
            bound_approx: b.approx(),
            observed,
            satisfied: observed.map(|o| b.satisfied_by(o)),
        }
    }
}

/// Reports for one set: the main lower bound, the fiber-energy lower bound,
/// and both second-moment estimates, each compared with the observation.
pub fn single_set_reports(
    q: u64,
    n: u64,
    k: u64,
    efib: u64,
    delta_size: u64,
    second_moment: u128,
) -> Result<Vec<BoundReport>> {
    let main = main_lower_bound(q, n, k)?;
    let fib = fiber_energy_lower_bound(q, n, efib)?;
    let sm = second_moment_upper_bound(q, n, k)?;
    let fsm = fiber_second_moment_bound(q, n, efib)?;
    Ok(vec![
        BoundReport::rational(
            "main_lower_bound",
            Direction::Lower,
            &[("q", q), ("n", n), ("k", k)],
            &main,
            Some(delta_size as u128),
        ),
        BoundReport::rational(
            "fiber_energy_lower_bound",
            Direction::Lower,
            &[("q", q), ("n", n), ("efib", efib)],
            &fib,
            Some(delta_size as u128),
        ),
        BoundReport::rational(
            "second_moment_upper_bound",
            Direction::Upper,
            &[("q", q), ("n", n), ("k", k)],
            &sm,
            Some(second_moment),
        ),
        BoundReport::rational(
            "fiber_second_moment_bound",
            Direction::Upper,
            &[("q", q), ("n", n), ("efib", efib)],
            &fsm,
            Some(second_moment),
        ),
    ])
}
