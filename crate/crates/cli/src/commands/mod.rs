mod analyze;
mod audit;
mod construct;
mod sweep;
mod verify;

pub use analyze::analyze;
pub use audit::audit_fourier;
pub use construct::construct;
pub use sweep::sweep;
pub use verify::verify;

use num_rational::Rational64;
use parafalc_core::constructions::{
    grid_construction, sharpness_grid, sharpness_subspace, subspace_construction, ConstructionResult,
};
use parafalc_core::fourier::Tolerances;
use parafalc_core::geometry::PointSet;
use parafalc_core::io::format_point;
use serde::Serialize;

use crate::args::{Common, Frac, Kind};
use crate::error::{config, Result};

pub(crate) fn tolerances(c: &Common) -> Tolerances {
    let d = Tolerances::default();
    Tolerances { unit: c.tol_unit.unwrap_or(d.unit), relative: c.tol_relative.unwrap_or(d.relative) }
}

/// Construction parameters after checking that the kind has what it needs.
#[derive(Copy, Clone, Debug)]
pub(crate) struct ConstructionSpec {
    pub kind: Kind,
    pub p: u64,
    pub eps: Rational64,
    pub k: Option<u64>,
    pub m: Option<u64>,
}

impl ConstructionSpec {
    pub fn new(kind: Kind, p: Option<u64>, eps: Option<Frac>, k: Option<u64>, m: Option<u64>) -> Result<Self> {
        let p = p.ok_or_else(|| config("constructions need --field p with p an odd prime"))?;
        let eps = eps.ok_or_else(|| config("constructions need --eps A/B"))?.0;
        let needs_m = matches!(kind, Kind::Subspace | Kind::SharpnessSubspace);
        if needs_m && m.is_none() {
            return Err(config("this construction needs --m"));
        }
        if kind == Kind::SharpnessSubspace && k.is_none() {
            return Err(config("sharpness-subspace needs --k"));
        }
        Ok(ConstructionSpec { kind, p, eps, k, m })
    }

    /// Field order of the construction, computed before anything is built.
    pub fn order(&self) -> Option<u64> {
        match self.kind {
            Kind::Grid | Kind::SharpnessGrid => Some(self.p),
            Kind::Subspace => self.p.checked_pow(2 * self.m? as u32),
            Kind::SharpnessSubspace => self.p.checked_pow((self.k? * self.m?) as u32),
        }
    }

    pub fn build(&self) -> Result<ConstructionResult> {
        let r = match self.kind {
            Kind::Grid => grid_construction(self.p, self.eps),
            Kind::SharpnessGrid => sharpness_grid(self.p, self.eps),
            Kind::Subspace => subspace_construction(self.p, self.m.unwrap_or(0), self.eps),
            Kind::SharpnessSubspace => {
                sharpness_subspace(self.p, self.k.unwrap_or(0), self.m.unwrap_or(0), self.eps)
            }
        };
        Ok(r?)
    }
}

/// A point set in file form, as embedded in JSON reports.
#[derive(Serialize)]
pub(crate) struct PointSetJson {
    pub header: String,
    pub points: Vec<String>,
}

pub(crate) fn point_set_json(e: &PointSet) -> PointSetJson {
    let f = e.field();
    PointSetJson { header: f.to_string(), points: e.points().map(|pt| format_point(f, pt)).collect() }
}

pub(crate) fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}
