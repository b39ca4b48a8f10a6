use serde_json::json;

use super::{opt, point_set_json, ConstructionSpec};
use crate::args::ConstructArgs;
use crate::envelope::Envelope;
use crate::error::{config, Result};
use crate::record::{write_file, Phases, RunRecord, Summary, Table};
use parafalc_core::io::write_point_set;

pub fn construct(args: &ConstructArgs, env: &Envelope) -> Result<RunRecord> {
    let mut phases = Phases::default();
    let field = args.common.field.as_ref().ok_or_else(|| config("construct needs --field p"))?;
    let p = field.prime().ok_or_else(|| config(format!("--field {}: constructions take a prime p", field.text)))?;
    let spec = ConstructionSpec::new(args.kind, Some(p), args.eps, args.k, args.m)?;
    let q = spec.order().ok_or_else(|| config("field order overflows"))?;
    if args.check {
        env.check_exhaustive(q, (q as f64).powi(3), args.common.allow_large)?;
    }
    let c = spec.build()?;
    phases.mark("construct");

    let mut record = RunRecord::new("construct", serde_json::to_value(args)?);
    if let Some(path) = &args.points_out {
        write_file(path, &write_point_set(&c.set))?;
    }
    let check = if args.check { Some(c.verify()?) } else { None };
    phases.mark("verify");

    let mut table = Table::new(&[
        "kind",
        "field",
        "applicable",
        "predicted_size",
        "predicted_max_fiber",
        "predicted_delta_size",
        "predicted_delta_upper",
        "observed_size",
        "observed_max_fiber",
        "observed_delta_size",
        "passed",
    ]);
    let obs = check.as_ref().map(|c| &c.observed);
    table.push(vec![
        c.kind.name().into(),
        c.field.clone(),
        c.applicable.to_string(),
        c.predicted.size.to_string(),
        c.predicted.max_fiber.to_string(),
        opt(c.predicted.delta_size),
        opt(c.predicted.delta_upper),
        opt(obs.map(|o| o.size)),
        opt(obs.map(|o| o.max_fiber)),
        opt(obs.map(|o| o.delta_size)),
        opt(check.as_ref().map(|c| c.passed)),
    ]);
    record.table = table;
    record.summary = match &check {
        Some(ch) => {
            let failed: Vec<String> = ch
                .checks
                .iter()
                .filter(|x| !x.passed)
                .map(|x| format!("{}: expected {}, observed {}", x.name, x.expected, x.observed))
                .chain(
                    ch.bounds
                        .iter()
                        .filter(|b| b.satisfied == Some(false))
                        .map(|b| format!("{}: not satisfied", b.name)),
                )
                .collect();
            Summary {
                passed: ch.passed,
                checks: (ch.checks.len() + ch.bounds.len()) as u64,
                violations: failed.len() as u64,
                failures: failed,
            }
        }
        None => Summary { passed: true, ..Summary::default() },
    };
    record.result = json!({
        "construction": c,
        "point_set": point_set_json(&c.set),
        "check": check,
    });
    record.timings_ms = phases.finish();
    Ok(record)
}
