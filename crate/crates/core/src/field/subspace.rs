//! F_p-linear subspaces of F_{p^n}, subfields, and greedy extension.

use super::linalg::{null_space, rank};
use super::{Elem, Field};
use crate::error::{Error, Result};

/// An F_p-subspace of a field, given by a linearly independent basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    field: Field,
    basis: Vec<Elem>,
}

impl Subspace {
    pub fn new(field: &Field, basis: Vec<Elem>) -> Result<Self> {
        if basis.iter().any(|&b| !field.contains(b)) {
            return Err(Error::MixedFields);
        }
        let rows: Vec<Vec<u32>> = basis.iter().map(|&b| field.coeffs(b)).collect();
        if rank(&rows, field.characteristic()) != basis.len() {
            return Err(Error::LinearlyDependent);
        }
        Ok(Subspace { field: field.clone(), basis })
    }

    pub fn zero(field: &Field) -> Self {
        Subspace { field: field.clone(), basis: Vec::new() }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn basis(&self) -> &[Elem] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// p^d
    pub fn size(&self) -> u64 {
        (self.field.characteristic() as u64).pow(self.dimension() as u32)
    }

    pub fn contains(&self, x: Elem) -> bool {
        if !self.field.contains(x) {
            return false;
        }
        let mut rows: Vec<Vec<u32>> = self.basis.iter().map(|&b| self.field.coeffs(b)).collect();
        rows.push(self.field.coeffs(x));
        rank(&rows, self.field.characteristic()) == self.basis.len()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|&b| self.contains(b))
    }

    /// Every element Σ a_i·b_i, with the coefficient tuples (a_1, …, a_d)
    /// visited in lexicographic order (a_1 most significant).
    pub fn elements(&self) -> Vec<Elem> {
        let f = &self.field;
        let p = f.characteristic();
        let d = self.dimension();
        let mut out = Vec::with_capacity(self.size() as usize);
        let mut coeffs = vec![0u32; d];
        loop {
            let x = coeffs
                .iter()
                .zip(&self.basis)
                .fold(Elem::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(f.from_int(a as i64), b)));
            out.push(x);
            let mut i = d;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                coeffs[i] += 1;
                if coeffs[i] < p {
                    break;
                }
                coeffs[i] = 0;
            }
        }
    }

    /// Dense membership mask indexed by element.
    pub fn membership(&self) -> Vec<bool> {
        let mut mask = vec![false; self.field.size()];
        for x in self.elements() {
            mask[x.index()] = true;
        }
        mask
    }
}

/// The subfield of order p^m, as the kernel of x ↦ x^(p^m) − x. The basis is
/// returned in reduced row echelon form over the coefficient coordinates, so
/// it starts with 1.
pub fn subfield_elements(field: &Field, m: usize) -> Result<Subspace> {
    let n = field.degree();
    if m == 0 || !n.is_multiple_of(m) {
        return Err(Error::NonDivisorDegree { m, n });
    }
    let p = field.characteristic();
    let images: Vec<Vec<u32>> = (0..n)
        .map(|j| {
            let mut e = vec![0u32; n];
            e[j] = 1;
            let x = field.from_coeffs(&e).expect("unit vector");
            field.coeffs(field.sub(field.frobenius_iter(x, m), x))
        })
        .collect();
    // matrix rows are output coordinates, columns the input unit vectors
    let matrix: Vec<Vec<u32>> = (0..n).map(|i| images.iter().map(|col| col[i]).collect()).collect();
    let basis = null_space(&matrix, n, p)
        .into_iter()
        .map(|v| field.from_coeffs(&v).expect("kernel vector"))
        .collect();
    Subspace::new(field, basis)
}

/// Extends `inner` to dimension `d` by appending the unit vectors
/// 1, θ, θ², … (in that order) that are independent of the span so far.
pub fn subspace_containing(inner: &Subspace, d: usize) -> Result<Subspace> {
    let field = inner.field();
    let n = field.degree();
    if d < inner.dimension() || d > n {
        return Err(Error::DimensionOutOfRange { d, min: inner.dimension(), max: n });
    }
    let p = field.characteristic();
    let mut basis = inner.basis.clone();
    let mut rows: Vec<Vec<u32>> = basis.iter().map(|&b| field.coeffs(b)).collect();
    for j in 0..n {
        if basis.len() == d {
            break;
        }
        let mut e = vec![0u32; n];
        e[j] = 1;
        rows.push(e.clone());
        if rank(&rows, p) == rows.len() {
            basis.push(field.from_coeffs(&e)?);
        } else {
            rows.pop();
        }
    }
    Subspace::new(field, basis)
}
