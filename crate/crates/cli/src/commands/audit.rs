use num_complex::Complex64;
use parafalc_core::constructions::{derive_seed, random_set, rng_from_seed};
use parafalc_core::field::{prime_power, Field};
use parafalc_core::fourier::{spectral_checks, plancherel_relative_error, Characters, Tolerances};
use parafalc_core::geometry::PointSet;
use parafalc_core::io::parse_point_set;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::tolerances;
use crate::args::AuditArgs;
use crate::envelope::Envelope;
use crate::error::{config, Result};
use crate::record::{read_file, Phases, RunRecord, Tallies, Table};

/// Random sets are drawn with at most this many points.
pub const MAX_AUDIT_SET: u64 = 2000;

#[derive(Clone, Debug, Default, Serialize)]
pub struct FieldAudit {
    pub q: u64,
    pub field: String,
    pub orthogonality_deviation: f64,
    pub unit_modulus_deviation: f64,
    pub plancherel_max_error: f64,
    pub max_identity_error: f64,
    pub max_pointwise_excess: f64,
    pub max_energy_deviation: f64,
    pub sets: u64,
    pub tallies: Tallies,
}

fn audit_pair(
    chars: &Characters,
    tol: &Tolerances,
    e: &PointSet,
    f: &PointSet,
    what: &str,
    out: &mut FieldAudit,
) -> Result<()> {
    let (id, audit) = spectral_checks(chars, e, f)?;
    let ctx = |s: &str| format!("q={} {what} {s}", out.q);
    out.tallies.record("second_moment_identity", id.holds(tol), || ctx(&format!("relative error {:e}", id.relative_error)));
    out.tallies.record("pointwise_inequality", audit.pointwise_ok(tol), || {
        ctx(&format!("s={} excess {:e}", audit.worst_s, audit.pointwise_excess))
    });
    out.tallies.record("cauchy_schwarz", audit.cauchy_schwarz_ok(tol), || {
        ctx(&format!("{} > {}", audit.sum_s_sq_nonzero, audit.cauchy_schwarz_rhs))
    });
    out.tallies.record("energy_identity", audit.energy_identities_ok(tol), || {
        ctx(&format!("deviations {:e}, {:e}", audit.u_energy_deviation(), audit.v_energy_deviation()))
    });
    out.tallies.record("fiber_energy_bound", audit.fiber_bounds_ok(tol), || {
        ctx(&format!("{} vs {}, {} vs {}", audit.sum_u_sq, audit.u_bound, audit.sum_v_sq, audit.v_bound))
    });
    out.max_identity_error = out.max_identity_error.max(id.relative_error);
    out.max_pointwise_excess = out.max_pointwise_excess.max(audit.pointwise_excess);
    out.max_energy_deviation =
        out.max_energy_deviation.max(audit.u_energy_deviation()).max(audit.v_energy_deviation());
    out.sets += 1;
    Ok(())
}

fn audit_field(field: &Field, index: u64, args: &AuditArgs, input: Option<&PointSet>) -> Result<FieldAudit> {
    let tol = tolerances(&args.common);
    let q = field.order() as u64;
    let chars = Characters::new(field);
    let mut out = FieldAudit { q, field: field.to_string(), ..FieldAudit::default() };

    out.orthogonality_deviation = chars.orthogonality_deviation();
    out.unit_modulus_deviation = chars.unit_modulus_deviation();
    let orth = out.orthogonality_deviation;
    out.tallies.record("orthogonality", orth < q as f64 * tol.unit, || format!("q={q} deviation {orth:e}"));
    let unit = out.unit_modulus_deviation;
    out.tallies.record("unit_modulus", unit < tol.unit, || format!("q={q} deviation {unit:e}"));

    let base = derive_seed(args.common.seed, index);
    for trial in 0..args.trials {
        let seed = derive_seed(base, trial);
        let mut rng = rng_from_seed(seed);
        let h: Vec<Complex64> =
            (0..q).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let err = plancherel_relative_error(&chars, &h)?;
        out.plancherel_max_error = out.plancherel_max_error.max(err);
        out.tallies.record("plancherel", err < tol.unit, || format!("q={q} seed={seed} error {err:e}"));
    }

    match input {
        Some(e) => audit_pair(&chars, &tol, e, e, "input set", &mut out)?,
        None => {
            for i in 0..args.sets {
                let seed = derive_seed(base, (1 << 32) | i);
                let mut rng = rng_from_seed(seed);
                let top = (q * q).min(MAX_AUDIT_SET);
                let e = random_set(field, rng.gen_range(1..=top), rng.gen())?;
                let f = random_set(field, rng.gen_range(1..=top), rng.gen())?;
                audit_pair(&chars, &tol, &e, &e, &format!("seed={seed} (E,E)"), &mut out)?;
                audit_pair(&chars, &tol, &e, &f, &format!("seed={seed} (E,F)"), &mut out)?;
            }
        }
    }
    Ok(out)
}

pub fn audit_fourier(args: &AuditArgs, env: &Envelope) -> Result<RunRecord> {
    let mut phases = Phases::default();
    let input = match &args.input {
        Some(path) => Some(parse_point_set(&read_file(path)?)?),
        None => None,
    };
    let fields: Vec<Field> = match (&input, &args.q, &args.common.field) {
        (Some(e), _, _) => vec![e.field().clone()],
        (None, Some(list), _) => list
            .0
            .iter()
            .map(|&q| match prime_power(q) {
                Some((p, _)) if p != 2 => Ok(Field::with_order(q)?),
                _ => Err(config(format!("q = {q} is not an odd prime power"))),
            })
            .collect::<Result<_>>()?,
        (None, None, Some(spec)) => vec![spec.build()?],
        (None, None, None) => return Err(config("audit-fourier needs --q LIST, --field or --input")),
    };
    for f in &fields {
        let q = f.order() as u64;
        env.check_fourier(q, (q as f64).powi(3) * (args.sets.max(1) * 2) as f64, args.common.allow_large)?;
    }
    phases.mark("setup");

    let audits: Vec<FieldAudit> = fields
        .par_iter()
        .enumerate()
        .map(|(i, f)| audit_field(f, i as u64, args, input.as_ref()))
        .collect::<Result<_>>()?;
    phases.mark("audit");

    let mut total = Tallies::default();
    let mut table = Table::new(&[
        "q",
        "field",
        "orthogonality_deviation",
        "unit_modulus_deviation",
        "plancherel_max_error",
        "sets",
        "max_identity_error",
        "max_pointwise_excess",
        "max_energy_deviation",
        "violations",
    ]);
    for a in &audits {
        total.merge(&a.tallies);
        table.push(vec![
            a.q.to_string(),
            a.field.clone(),
            a.orthogonality_deviation.to_string(),
            a.unit_modulus_deviation.to_string(),
            a.plancherel_max_error.to_string(),
            a.sets.to_string(),
            a.max_identity_error.to_string(),
            a.max_pointwise_excess.to_string(),
            a.max_energy_deviation.to_string(),
            a.tallies.violations().to_string(),
        ]);
    }

    let mut record = RunRecord::new("audit-fourier", serde_json::to_value(args)?);
    record.result = json!({
        "tolerances": tolerances(&args.common),
        "fields": audits,
        "checks": total.counts,
    });
    record.summary = total.summary();
    record.table = table;
    record.timings_ms = phases.finish();
    Ok(record)
}
