//! Additive characters, Fourier transforms on F_q, and the character-sum
//! quantities behind the second-moment estimate for ν.
//!
//! χ(x) = exp(2πi·Tr(x)/p) with Tr the absolute trace. Character values are
//! `f64` complex numbers; every sum is taken in canonical element order so
//! results are reproducible bit for bit on one platform.
//!
//! The bilinear form used throughout is a₂ − b₂ − 2a₁b₁, the form that the
//! shear maps turn the parabolic distance into.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::energy::fiber_energy;
use crate::error::{Error, Result};
use crate::field::{Elem, Field, FieldElement};
use crate::geometry::{bipartite_profile, max_fiber, shear_a, shear_b, shear_form_counts, PointSet};

/// Numerical tolerances for character-sum checks.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Unit-modulus and orthogonality checks (scaled by q where summed).
    pub unit: f64,
    /// Relative tolerance for aggregated sums.
    pub relative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { unit: 1e-9, relative: 1e-6 }
    }
}

/// e^{2πik/p}
pub fn root_of_unity(p: u32, k: u32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % p) as f64 / p as f64)
}

/// χ(x) for a single element.
pub fn character(x: &FieldElement) -> Complex64 {
    root_of_unity(x.field().characteristic(), x.trace_to_prime())
}

/// Precomputed character table of a field.
#[derive(Clone, Debug)]
pub struct Characters {
    field: Field,
    table: Vec<Complex64>,
}

impl Characters {
    pub fn new(field: &Field) -> Self {
        let p = field.characteristic();
        let roots: Vec<Complex64> = (0..p).map(|k| root_of_unity(p, k)).collect();
        let table = field.elements().map(|x| roots[field.trace_to_prime(x) as usize]).collect();
        Characters { field: field.clone(), table }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn chi(&self, x: Elem) -> Complex64 {
        self.table[x.index()]
    }

    /// max_α |Σ_t χ(αt) − q·[α = 0]|
    pub fn orthogonality_deviation(&self) -> f64 {
        let f = &self.field;
        let q = f.size() as f64;
        f.elements()
            .map(|alpha| {
                let s: Complex64 = f.elements().map(|t| self.chi(f.mul(alpha, t))).sum();
                let expected = if alpha == Elem::ZERO { q } else { 0.0 };
                (s - Complex64::new(expected, 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest | |χ(x)| − 1 | over the field.
    pub fn unit_modulus_deviation(&self) -> f64 {
        self.table.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// ĥ(ξ) = Σ_y h(y)·χ(ξy) for a dense function h indexed by element.
pub fn fourier_transform(chars: &Characters, h: &[Complex64]) -> Result<Vec<Complex64>> {
    let f = &chars.field;
    if h.len() != f.size() {
        return Err(Error::DomainError(format!(
            "function has {} values, field has {} elements",
            h.len(),
            f.size()
        )));
    }
    Ok(f.elements()
        .map(|xi| f.elements().map(|y| h[y.index()] * chars.chi(f.mul(xi, y))).sum())
        .collect())
}

/// |Σ|ĥ|² − qΣ|h|²| / (qΣ|h|²), or 0 for h ≡ 0.
pub fn plancherel_relative_error(chars: &Characters, h: &[Complex64]) -> Result<f64> {
    let hat = fourier_transform(chars, h)?;
    let lhs: f64 = hat.iter().map(Complex64::norm_sqr).sum();
    let rhs = chars.field.size() as f64 * h.iter().map(Complex64::norm_sqr).sum::<f64>();
    Ok(if rhs == 0.0 { lhs.abs() } else { (lhs - rhs).abs() / rhs })
}

/// S(s), U_s and V_s for a pair of point sets A, B.
///
/// S(s) = Σ_{a∈A, b∈B} χ(s(a₂ − b₂ − 2a₁b₁)), f_s(x) = Σ_{u∈A_x} χ(su),
/// g_s(y) = Σ_{v∈B_y} χ(−sv), U_s = Σ_x |f_s(x)|², V_s = Σ_y |g_s(y)|².
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub q: u32,
    pub sizes: [usize; 2],
    /// S(s) indexed by s, each entry serialized as [re, im]
    pub s_values: Vec<Complex64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Σ_{s≠0} |S(s)|²
    pub sum_s_sq_nonzero: f64,
    /// Σ_s U_s²
    pub sum_u_sq: f64,
    /// Σ_s V_s²
    pub sum_v_sq: f64,
    /// max_{s≠0} |S(s) − Σ_x f_s(x)·ĝ_s(−2sx)| / (|A||B|)
    pub factorization_deviation: f64,
}

impl SpectralReport {
    pub fn factorization_holds(&self, tol: &Tolerances) -> bool {
        self.factorization_deviation <= tol.relative
    }
}

pub fn spectral_report(chars: &Characters, a: &PointSet, b: &PointSet) -> Result<SpectralReport> {
    let f = &chars.field;
    if a.field() != f || b.field() != f {
        return Err(Error::MixedFields);
    }
    let counts = shear_form_counts(a, b)?;
    let nonzero: Vec<(Elem, u64)> =
        counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(t, &c)| (Elem(t as u32), c)).collect();
    let minus_two = f.from_int(-2);
    let scale = (a.len() * b.len()).max(1) as f64;

    let per_s: Vec<(Complex64, f64, f64, f64)> = f
        .elements()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&s| {
            let direct: Complex64 =
                nonzero.iter().map(|&(t, c)| chars.chi(f.mul(s, t)) * c as f64).sum();
            let minus_s = f.neg(s);
            let fs: Vec<(Elem, Complex64)> = a
                .fibers()
                .iter()
                .map(|(&x, us)| (x, us.iter().map(|&u| chars.chi(f.mul(s, u))).sum()))
                .collect();
            let gs: Vec<(Elem, Complex64)> = b
                .fibers()
                .iter()
                .map(|(&y, vs)| (y, vs.iter().map(|&v| chars.chi(f.mul(minus_s, v))).sum()))
                .collect();
            let u_s: f64 = fs.iter().map(|(_, z)| z.norm_sqr()).sum();
            let v_s: f64 = gs.iter().map(|(_, z)| z.norm_sqr()).sum();
            let deviation = if s == Elem::ZERO {
                0.0
            } else {
                let factored: Complex64 = fs
                    .iter()
                    .map(|&(x, fx)| {
                        let xi = f.mul(minus_two, f.mul(s, x));
                        let g_hat: Complex64 = gs.iter().map(|&(y, gy)| gy * chars.chi(f.mul(xi, y))).sum();
                        fx * g_hat
                    })
                    .sum();
                (direct - factored).norm() / scale
            };
            (direct, u_s, v_s, deviation)
        })
        .collect();

    let s_values: Vec<Complex64> = per_s.iter().map(|r| r.0).collect();
    let u: Vec<f64> = per_s.iter().map(|r| r.1).collect();
    let v: Vec<f64> = per_s.iter().map(|r| r.2).collect();
    let factorization_deviation = per_s.iter().map(|r| r.3).fold(0.0, f64::max);
    Ok(SpectralReport {
        q: f.order(),
        sizes: [a.len(), b.len()],
        sum_s_sq_nonzero: s_values.iter().skip(1).map(Complex64::norm_sqr).sum(),
        sum_u_sq: u.iter().map(|x| x * x).sum(),
        sum_v_sq: v.iter().map(|x| x * x).sum(),
        s_values,
        u,
        v,
        factorization_deviation,
    })
}

/// Σ_t ν_{E,F}(t)² against |E|²|F|²/q + (1/q)·Σ_{s≠0}|S(s)|², with S taken
/// over the shear images A = shear_a(E), B = shear_b(F).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    /// Σ ν², exact
    pub lhs: u128,
    /// |E|²|F|²/q
    pub main_term: f64,
    /// (1/q)·Σ_{s≠0}|S(s)|²
    pub spectral_term: f64,
    pub relative_error: f64,
}

impl IdentityCheck {
    pub fn rhs(&self) -> f64 {
        self.main_term + self.spectral_term
    }

    pub fn holds(&self, tol: &Tolerances) -> bool {
        self.relative_error <= tol.relative
    }
}

pub fn second_moment_identity_check(chars: &Characters, e: &PointSet, f: &PointSet) -> Result<IdentityCheck> {
    let profile = bipartite_profile(e, f)?;
    let report = spectral_report(chars, &shear_a(e), &shear_b(f))?;
    Ok(identity_from(&profile.second_moment(), e.len(), f.len(), &report))
}

fn identity_from(lhs: &u128, ne: usize, nf: usize, report: &SpectralReport) -> IdentityCheck {
    let q = report.q as f64;
    let x = ne as f64 * nf as f64;
    let main_term = x * x / q;
    let spectral_term = report.sum_s_sq_nonzero / q;
    let lhs_f = *lhs as f64;
    let relative_error = (lhs_f - main_term - spectral_term).abs() / lhs_f.max(1.0);
    IdentityCheck { lhs: *lhs, main_term, spectral_term, relative_error }
}

/// The chain of estimates bounding Σ_{s≠0}|S(s)|².
///
/// Inequalities are checked with slack `relative` times the natural scale of
/// each side; the energy identities are compared relative to the exact
/// integer side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityAudit {
    /// max_{s≠0} (|S(s)|² − q·U_s·V_s) / (|A||B|)²; ≤ 0 up to rounding
    pub pointwise_excess: f64,
    /// the s attaining `pointwise_excess` (0 when no s ≠ 0 has positive excess)
    pub worst_s: u32,
    pub sum_s_sq_nonzero: f64,
    /// q·(Σ U_s²)^{1/2}·(Σ V_s²)^{1/2}
    pub cauchy_schwarz_rhs: f64,
    pub sum_u_sq: f64,
    pub sum_v_sq: f64,
    /// Σ_{x,x′} E₊(A_x, A_x′), exact
    pub fiber_energy_a: u64,
    /// Σ_{y,y′} E₊(B_y, B_y′), exact
    pub fiber_energy_b: u64,
    /// q·K_E·|E|²
    pub u_bound: u64,
    /// q·K_F·|F|²
    pub v_bound: u64,
    pub q: u32,
}

impl InequalityAudit {
    /// |S(s)|² ≤ q·U_s·V_s for every s ≠ 0
    pub fn pointwise_ok(&self, tol: &Tolerances) -> bool {
        self.pointwise_excess <= tol.relative
    }

    /// Σ_{s≠0}|S(s)|² ≤ q(ΣU_s²)^{1/2}(ΣV_s²)^{1/2}
    pub fn cauchy_schwarz_ok(&self, tol: &Tolerances) -> bool {
        self.sum_s_sq_nonzero <= self.cauchy_schwarz_rhs * (1.0 + tol.relative) + tol.relative
    }

    fn rel_dev(measured: f64, exact: u64) -> f64 {
        (measured - exact as f64).abs() / (exact as f64).max(1.0)
    }

    /// ΣU_s² = q·Σ E₊(A_x, A_x′), relative deviation
    pub fn u_energy_deviation(&self) -> f64 {
        Self::rel_dev(self.sum_u_sq, self.q as u64 * self.fiber_energy_a)
    }

    pub fn v_energy_deviation(&self) -> f64 {
        Self::rel_dev(self.sum_v_sq, self.q as u64 * self.fiber_energy_b)
    }

    pub fn energy_identities_ok(&self, tol: &Tolerances) -> bool {
        self.u_energy_deviation() <= tol.relative && self.v_energy_deviation() <= tol.relative
    }

    /// ΣU_s² ≤ qK_E|E|² and ΣV_s² ≤ qK_F|F|²
    pub fn fiber_bounds_ok(&self, tol: &Tolerances) -> bool {
        self.sum_u_sq <= self.u_bound as f64 * (1.0 + tol.relative)
            && self.sum_v_sq <= self.v_bound as f64 * (1.0 + tol.relative)
    }

    pub fn passed(&self, tol: &Tolerances) -> bool {
        self.pointwise_ok(tol) && self.cauchy_schwarz_ok(tol) && self.energy_identities_ok(tol) && self.fiber_bounds_ok(tol)
    }
}

pub fn spectral_inequality_audit(chars: &Characters, e: &PointSet, f: &PointSet) -> Result<InequalityAudit> {
    Ok(spectral_checks(chars, e, f)?.1)
}

/// The identity check and the inequality audit from a single spectral report.
pub fn spectral_checks(chars: &Characters, e: &PointSet, f: &PointSet) -> Result<(IdentityCheck, InequalityAudit)> {
    let profile = bipartite_profile(e, f)?;
    let a = shear_a(e);
    let b = shear_b(f);
    let report = spectral_report(chars, &a, &b)?;
    let identity = identity_from(&profile.second_moment(), e.len(), f.len(), &report);
    let q = report.q as f64;
    let scale = (e.len() as f64 * f.len() as f64).max(1.0).powi(2);
    let (worst_s, pointwise_excess) = (1..report.q as usize)
        .map(|s| (s as u32, (report.s_values[s].norm_sqr() - q * report.u[s] * report.v[s]) / scale))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    let ne = e.len() as u64;
    let nf = f.len() as u64;
    let audit = InequalityAudit {
        pointwise_excess,
        worst_s,
        sum_s_sq_nonzero: report.sum_s_sq_nonzero,
        cauchy_schwarz_rhs: q * report.sum_u_sq.sqrt() * report.sum_v_sq.sqrt(),
        sum_u_sq: report.sum_u_sq,
        sum_v_sq: report.sum_v_sq,
        fiber_energy_a: fiber_energy(&a)?,
        fiber_energy_b: fiber_energy(&b)?,
        u_bound: report.q as u64 * max_fiber(e)? as u64 * ne * ne,
        v_bound: report.q as u64 * max_fiber(f)? as u64 * nf * nf,
        q: report.q,
    };
    Ok((identity, audit))
}
