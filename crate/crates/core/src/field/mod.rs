//! Finite fields F_{p^n} in the polynomial basis.
//!
//! An element is the residue `c0 + c1·θ + … + c_{n-1}·θ^{n-1}` of the modulus
//! variable θ. Elements are addressed by a canonical index: the coefficient
//! vector `[c0, …, c_{n-1}]` read as a base-p numeral with `c0` most
//! significant. Index order is therefore the lexicographic order of
//! coefficient vectors, and that order is used by every dense table and
//! serialized array in the crate.
//!
//! Fields up to [`TABLE_MAX_ORDER`] elements carry precomputed addition and
//! multiplication tables; larger fields fall back to polynomial arithmetic.

mod linalg;
mod poly;
mod subspace;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use subspace::{subfield_elements, subspace_containing, Subspace};


/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 24;
/// Largest field order for which arithmetic tables are built.
pub const TABLE_MAX_ORDER: u32 = 2401;

/// Canonical index of a field element (see the module docs for the ordering).
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Writes `q` as `p^n` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut n = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        n += 1;
    }
    (rest == 1).then_some((p, n))
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

struct Inner {
    p: u32,
    n: usize,
    q: u32,
    modulus: Vec<u32>,
    /// weights[i] = p^(n-1-i), the index weight of coefficient i
    weights: Vec<u32>,
    /// Tr(e_i) for the unit coefficient vectors
    trace_basis: Vec<u32>,
    tables: Option<Tables>,
}

/// A finite field of odd characteristic. Cheap to clone; immutable.
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({self})")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}/{}", self.inner.p, self.inner.n, format_coeffs(&self.inner.modulus))
    }
}

pub(crate) fn format_coeffs(c: &[u32]) -> String {
    let parts: Vec<String> = c.iter().map(u32::to_string).collect();
    format!("[{}]", parts.join(","))
}

pub(crate) fn parse_coeffs(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    let body = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [c0,...], got {s:?}")))?;
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|e| Error::Parse(format!("bad coefficient {t:?}: {e}")))
        })
        .collect()
}

impl FromStr for Field {
    type Err = Error;

    /// Parses the `p^n/[c0,c1,...,1]` form produced by `Display`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, modulus) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("expected p^n/[...], got {s:?}")))?;
        let (p, n) = head
            .split_once('^')
            .ok_or_else(|| Error::Parse(format!("expected p^n, got {head:?}")))?;
        let p: u64 = p.trim().parse().map_err(|e| Error::Parse(format!("bad characteristic: {e}")))?;
        let n: usize = n.trim().parse().map_err(|e| Error::Parse(format!("bad degree: {e}")))?;
        Field::new(p, n, Some(parse_coeffs(modulus)?))
    }
}

impl Field {
    /// Builds F_{p^n}. Without an explicit modulus the lexicographically
    /// smallest monic irreducible of degree n is used (coefficients compared
    /// constant term first).
    pub fn new(p: u64, n: usize, modulus: Option<Vec<u32>>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if n == 0 {
            return Err(domain("extension degree must be at least 1"));
        }
        let q = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if q > MAX_ORDER as u128 {
            return Err(Error::FieldTooLarge(q));
        }
        let p = p as u32;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != n + 1 || m[n] != 1 {
                    return Err(Error::InvalidModulus(format!(
                        "{} is not monic of degree {n}",
                        format_coeffs(&m)
                    )));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidModulus(format!(
                        "{} has coefficients outside [0, {p})",
                        format_coeffs(&m)
                    )));
                }
                if !poly::is_irreducible(&m, p) {
                    return Err(Error::ReduciblePolynomial(format_coeffs(&m)));
                }
                m
            }
            None => smallest_irreducible(p, n),
        };
        Ok(Self::build(p, n, q as u32, modulus))
    }

    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Field> {
        Field::new(p, 1, None)
    }

    /// F_q with the default modulus, for a prime power q.
    pub fn with_order(q: u64) -> Result<Field> {
        match prime_power(q) {
            Some((p, n)) => Field::new(p, n, None),
            None => Err(Error::NotPrime(q)),
        }
    }

    fn build(p: u32, n: usize, q: u32, modulus: Vec<u32>) -> Field {
        let weights: Vec<u32> = (0..n).map(|i| p.pow((n - 1 - i) as u32)).collect();
        let trace_basis = (0..n)
            .map(|i| {
                let mut e = vec![0u32; n];
                e[i] = 1;
                let mut acc = vec![0u32; n];
                let mut conj = e;
                for _ in 0..n {
                    for (a, c) in acc.iter_mut().zip(&conj) {
                        *a = (*a + *c) % p;
                    }
                    conj = poly::pow_mod(&conj, p as u64, &modulus, p);
                }
                debug_assert!(acc[1..].iter().all(|&c| c == 0));
                acc[0]
            })
            .collect();
        let mut inner = Inner { p, n, q, modulus, weights, trace_basis, tables: None };
        if q <= TABLE_MAX_ORDER {
            inner.tables = Some(build_tables(&inner));
        }
        Field { inner: Arc::new(inner) }
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.inner.n
    }

    /// Number of elements q = p^n.
    #[inline]
    pub fn order(&self) -> u32 {
        self.inner.q
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.inner.q as usize
    }

    /// Modulus coefficients, constant term first, including the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn has_tables(&self) -> bool {
        self.inner.tables.is_some()
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.inner.q).map(Elem)
    }

    #[inline]
    pub fn contains(&self, x: Elem) -> bool {
        x.0 < self.inner.q
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem(self.inner.weights[0])
    }

    /// Embeds the integer `k` (reduced mod p) into the prime subfield.
    pub fn from_int(&self, k: i64) -> Elem {
        let p = self.inner.p as i64;
        Elem(k.rem_euclid(p) as u32 * self.inner.weights[0])
    }

    pub fn coeffs(&self, x: Elem) -> Vec<u32> {
        decode(&self.inner, x.0)
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Result<Elem> {
        if c.len() != self.inner.n || c.iter().any(|&v| v >= self.inner.p) {
            return Err(Error::MixedFields);
        }
        Ok(Elem(encode(&self.inner, c)))
    }

    /// `[c0,...,c_{n-1}]`
    pub fn format_elem(&self, x: Elem) -> String {
        format_coeffs(&self.coeffs(x))
    }

    pub fn parse_elem(&self, s: &str) -> Result<Elem> {
        self.from_coeffs(&parse_coeffs(s)?)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.inner.tables {
            Some(t) => Elem(t.add[a.index() * self.size() + b.index()]),
            None => Elem(digit_add(&self.inner, a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        match &self.inner.tables {
            Some(t) => Elem(t.neg[a.index()]),
            None => Elem(digit_neg(&self.inner, a.0)),
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.inner.tables {
            Some(t) => Elem(t.mul[a.index() * self.size() + b.index()]),
            None => Elem(poly_mul(&self.inner, a.0, b.0)),
        }
    }

    #[inline]
    pub fn square(&self, a: Elem) -> Elem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut acc = self.one();
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == Elem::ZERO {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.inner.tables {
            Some(t) => Elem(t.inv[a.index()]),
            None => self.pow(a, self.inner.q as u64 - 2),
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// x^(p^i) for 0 <= i < n, by repeated p-th powering.
    pub fn frobenius(&self, x: Elem, i: usize) -> Result<Elem> {
        if i >= self.inner.n {
            return Err(domain(format!(
                "frobenius power {i} outside [0, {})",
                self.inner.n
            )));
        }
        Ok(self.frobenius_iter(x, i))
    }

    /// x^(p^i) for any i >= 0.
    pub(crate) fn frobenius_iter(&self, x: Elem, i: usize) -> Elem {
        let mut y = x;
        for _ in 0..i {
            y = self.pow(y, self.inner.p as u64);
        }
        y
    }

    /// Absolute trace Σ x^(p^i) as a field element.
    pub fn trace(&self, x: Elem) -> Elem {
        let mut acc = Elem::ZERO;
        let mut conj = x;
        for _ in 0..self.inner.n {
            acc = self.add(acc, conj);
            conj = self.pow(conj, self.inner.p as u64);
        }
        acc
    }

    /// Absolute trace as a residue in [0, p), via the trace functional on
    /// the coefficient basis.
    pub fn trace_to_prime(&self, x: Elem) -> u32 {
        let inner = &*self.inner;
        let p = inner.p as u64;
        decode(inner, x.0)
            .iter()
            .zip(&inner.trace_basis)
            .fold(0u64, |acc, (&c, &t)| (acc + c as u64 * t as u64) % p) as u32
    }

    /// Residue of a prime-subfield element, `None` otherwise.
    pub fn prime_residue(&self, x: Elem) -> Option<u32> {
        let w = self.inner.weights[0];
        x.0.is_multiple_of(w).then_some(x.0 / w)
    }

    /// A field element bound to this field, for the checked API.
    pub fn element(&self, x: Elem) -> Result<FieldElement> {
        FieldElement::new(self, x)
    }
}

fn decode(inner: &Inner, mut idx: u32) -> Vec<u32> {
    let mut c = vec![0u32; inner.n];
    for slot in c.iter_mut().rev() {
        *slot = idx % inner.p;
        idx /= inner.p;
    }
    c
}

fn encode(inner: &Inner, c: &[u32]) -> u32 {
    c.iter().fold(0u32, |acc, &v| acc * inner.p + v)
}

fn digit_add(inner: &Inner, a: u32, b: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0;
    for &w in inner.weights.iter().rev() {
        let s = (a % inner.p + b % inner.p) % inner.p;
        out += s * w;
        a /= inner.p;
        b /= inner.p;
    }
    out
}

fn digit_neg(inner: &Inner, a: u32) -> u32 {
    let mut a = a;
    let mut out = 0;
    for &w in inner.weights.iter().rev() {
        let d = a % inner.p;
        out += ((inner.p - d) % inner.p) * w;
        a /= inner.p;
    }
    out
}

fn poly_mul(inner: &Inner, a: u32, b: u32) -> u32 {
    let prod = poly::mul_mod(&decode(inner, a), &decode(inner, b), &inner.modulus, inner.p);
    encode(inner, &prod)
}

fn build_tables(inner: &Inner) -> Tables {
    let q = inner.q as usize;
    let digits: Vec<Vec<u32>> = (0..inner.q).map(|i| decode(inner, i)).collect();
    let mut add = vec![0u32; q * q];
    let mut mul = vec![0u32; q * q];
    for a in 0..q {
        for b in 0..q {
            let s: Vec<u32> = digits[a]
                .iter()
                .zip(&digits[b])
                .map(|(x, y)| (x + y) % inner.p)
                .collect();
            add[a * q + b] = encode(inner, &s);
            if b >= a {
                let m = encode(inner, &poly::mul_mod(&digits[a], &digits[b], &inner.modulus, inner.p));
                mul[a * q + b] = m;
                mul[b * q + a] = m;
            }
        }
    }
    let neg: Vec<u32> = (0..inner.q).map(|a| digit_neg(inner, a)).collect();
    let one = inner.weights[0];
    let mut inv = vec![0u32; q];
    for a in 1..q {
        if inv[a] != 0 {
            continue;
        }
        let b = (1..q).find(|&b| mul[a * q + b] == one).expect("nonzero elements are invertible");
        inv[a] = b as u32;
        inv[b] = a as u32;
    }
    Tables { add, mul, neg, inv }
}

fn smallest_irreducible(p: u32, n: usize) -> Vec<u32> {
    // Counter over [c0..c_{n-1}] with c0 most significant.
    let mut c = vec![0u32; n];
    loop {
        let mut f = c.clone();
        f.push(1);
        if poly::is_irreducible(&f, p) {
            return f;
        }
        let mut i = n;
        loop {
            i -= 1;
            c[i] += 1;
            if c[i] < p {
                break;
            }
            c[i] = 0;
            assert!(i > 0, "irreducible polynomials of every degree exist");
        }
    }
}

/// Arithmetic operations of the checked element API.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An element tagged with its field; operations check field agreement.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    elem: Elem,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_elem(self.elem))
    }
}

impl FieldElement {
    pub fn new(field: &Field, elem: Elem) -> Result<Self> {
        if !field.contains(elem) {
            return Err(Error::MixedFields);
        }
        Ok(FieldElement { field: field.clone(), elem })
    }

    pub fn from_coeffs(field: &Field, c: &[u32]) -> Result<Self> {
        Ok(FieldElement { field: field.clone(), elem: field.from_coeffs(c)? })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn elem(&self) -> Elem {
        self.elem
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.elem)
    }

    pub fn is_zero(&self) -> bool {
        self.elem == Elem::ZERO
    }

    fn same(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    fn wrap(&self, elem: Elem) -> Self {
        FieldElement { field: self.field.clone(), elem }
    }

    pub fn apply(&self, op: ArithOp, other: &Self) -> Result<Self> {
        self.same(other)?;
        let f = &self.field;
        let e = match op {
            ArithOp::Add => f.add(self.elem, other.elem),
            ArithOp::Sub => f.sub(self.elem, other.elem),
            ArithOp::Mul => f.mul(self.elem, other.elem),
            ArithOp::Div => f.div(self.elem, other.elem)?,
        };
        Ok(self.wrap(e))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.apply(ArithOp::Add, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.apply(ArithOp::Sub, other)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.apply(ArithOp::Mul, other)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.apply(ArithOp::Div, other)
    }

    pub fn neg(&self) -> Self {
        self.wrap(self.field.neg(self.elem))
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(self.wrap(self.field.inv(self.elem)?))
    }

    pub fn pow(&self, e: u64) -> Self {
        self.wrap(self.field.pow(self.elem, e))
    }

    pub fn frobenius(&self, i: usize) -> Result<Self> {
        Ok(self.wrap(self.field.frobenius(self.elem, i)?))
    }

    pub fn trace_to_prime(&self) -> u32 {
        self.field.trace_to_prime(self.elem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> Field {
        Field::new(3, 2, None).unwrap()
    }

    #[test]
    fn prime_field_modulus_is_x() {
        let f = Field::new(3, 1, None).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.to_string(), "3^1/[0,1]");
        assert_eq!(f.trace_to_prime(f.from_int(2)), 2);
    }

    #[test]
    fn f9_default_modulus() {
        // oracle: the monic quadratics over F_3 without roots, in coefficient order
        let mut irreducible = Vec::new();
        for c0 in 0..3u32 {
            for c1 in 0..3u32 {
                if (0..3u32).all(|x| (c0 + c1 * x + x * x) % 3 != 0) {
                    irreducible.push(vec![c0, c1, 1]);
                }
            }
        }
        assert_eq!(irreducible[0], vec![1, 0, 1]);
        assert_eq!(f9().modulus(), &irreducible[0][..]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Field::new(4, 1, None).unwrap_err(), Error::NotPrime(4));
        assert_eq!(Field::new(2, 3, None).unwrap_err(), Error::EvenCharacteristic);
        assert!(matches!(
            Field::new(3, 2, Some(vec![2, 0, 1])),
            Err(Error::ReduciblePolynomial(_))
        ));
        assert!(matches!(Field::new(3, 2, Some(vec![1, 0, 2])), Err(Error::InvalidModulus(_))));
        assert!(matches!(Field::new(3, 0, None), Err(Error::DomainError(_))));
    }

    #[test]
    fn theta_squared_is_minus_one() {
        let f = f9();
        let theta = f.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f.coeffs(f.mul(theta, theta)), vec![2, 0]);
        assert_eq!(f.coeffs(f.pow(theta, 8)), vec![1, 0]);
        assert_eq!(f.coeffs(f.frobenius(theta, 1).unwrap()), vec![0, 2]);
        assert_eq!(f.trace_to_prime(theta), 0);
        assert_eq!(f.trace_to_prime(f.one()), 2);
        assert_eq!(f.trace_to_prime(Elem::ZERO), 0);
    }

    #[test]
    fn inverse_in_f5() {
        let f = Field::prime(5).unwrap();
        assert_eq!(f.inv(f.from_int(2)).unwrap(), f.from_int(3));
        assert_eq!(f.inv(Elem::ZERO).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = FieldElement::new(&f9(), Elem(1)).unwrap();
        let b = FieldElement::new(&Field::prime(3).unwrap(), Elem(1)).unwrap();
        assert_eq!(a.add(&b).unwrap_err(), Error::MixedFields);
        assert_eq!(FieldElement::new(&f9(), Elem(9)).unwrap_err(), Error::MixedFields);
    }

    #[test]
    fn serialization_round_trip() {
        let f = Field::new(5, 3, None).unwrap();
        let g: Field = f.to_string().parse().unwrap();
        assert_eq!(f, g);
        let x = f.from_coeffs(&[1, 4, 2]).unwrap();
        assert_eq!(f.format_elem(x), "[1,4,2]");
        assert_eq!(f.parse_elem("[1, 4, 2]").unwrap(), x);
    }

    #[test]
    fn table_and_polynomial_paths_agree() {
        let f = Field::new(3, 3, None).unwrap();
        let inner = &*f.inner;
        for a in 0..27 {
            for b in 0..27 {
                assert_eq!(f.mul(Elem(a), Elem(b)).0, poly_mul(inner, a, b));
                assert_eq!(f.add(Elem(a), Elem(b)).0, digit_add(inner, a, b));
            }
        }
    }

    #[test]
    fn prime_power_decomposition() {
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(13), Some((13, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
