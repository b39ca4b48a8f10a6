use parafalc_core::bounds::{single_set_reports, pointwise_nu_lower};
use parafalc_core::constructions::{random_set, random_set_with_fiber_cap};
use parafalc_core::energy::{fiber_energy, fiber_energy_bound};
use parafalc_core::geometry::{distance_profile, max_fiber, PointSet};
use parafalc_core::io::parse_point_set;
use serde_json::json;

use super::{point_set_json, ConstructionSpec};
use crate::args::AnalyzeArgs;
use crate::envelope::Envelope;
use crate::error::{config, Result};
use crate::record::{read_file, Phases, RunRecord, Tallies, Table};

fn load(args: &AnalyzeArgs) -> Result<(PointSet, serde_json::Value)> {
    if let Some(path) = &args.input {
        let set = parse_point_set(&read_file(path)?)?;
        return Ok((set, json!({ "file": path.display().to_string() })));
    }
    let field = args.common.field.as_ref().ok_or_else(|| config("analyze needs --input, --construction or --field"))?;
    if let Some(kind) = args.construction {
        let p = field.prime().ok_or_else(|| config(format!("--field {}: constructions take a prime p", field.text)))?;
        let c = ConstructionSpec::new(kind, Some(p), args.eps, args.k, args.m)?.build()?;
        let source = json!({ "construction": c });
        return Ok((c.set, source));
    }
    let size = args.size.ok_or_else(|| config("a random set needs --size"))?;
    let f = field.build()?;
    let seed = args.common.seed;
    let set = match args.fiber_cap {
        Some(cap) => random_set_with_fiber_cap(&f, size, cap, seed)?,
        None => random_set(&f, size, seed)?,
    };
    Ok((set, json!({ "random": { "size": size, "fiber_cap": args.fiber_cap, "seed": seed } })))
}

pub fn analyze(args: &AnalyzeArgs, env: &Envelope) -> Result<RunRecord> {
    let mut phases = Phases::default();
    if let Some(field) = &args.common.field {
        let q = field.order().ok_or_else(|| config(format!("--field {}: not a field order", field.text)))?;
        env.check_exhaustive(q, args.size.map_or(0.0, |n| (n as f64).powi(2)), args.common.allow_large)?;
    }
    let (e, source) = load(args)?;
    let f = e.field().clone();
    let q = f.order() as u64;
    env.check_exhaustive(q, (e.len() as f64).powi(2), args.common.allow_large)?;
    phases.mark("load");

    let profile = distance_profile(&e)?;
    let n = e.len() as u64;
    let k = max_fiber(&e)? as u64;
    let efib = fiber_energy(&e)?;
    phases.mark("profile");

    let bounds = single_set_reports(q, n, k, efib, profile.support_size() as u64, profile.second_moment())?;
    let pointwise = pointwise_nu_lower(q, n)?;
    let predicts_full = pointwise.predicts_full_distance_set();
    let mut tallies = Tallies::default();
    for b in &bounds {
        tallies.record(&b.name, b.satisfied != Some(false), || format!("observed {:?}", b.observed));
    }
    tallies.record("first_moment", profile.first_moment() == n * n, || {
        format!("sum of counts {} != n^2 = {}", profile.first_moment(), n * n)
    });
    let nu_ok = f.elements().all(|t| pointwise.holds_for(profile.count(t)));
    tallies.record("pointwise_nu_lower", nu_ok, || "some count below n^2/q - sqrt(q) n".into());
    if predicts_full {
        tallies.record("full_distance_set", profile.support_size() as u64 == q, || {
            format!("|delta| = {} < q = {q}", profile.support_size())
        });
    }
    phases.mark("bounds");

    let mut table = Table::new(&["t", "t_index", "nu"]);
    for t in f.elements() {
        table.push(vec![f.format_elem(t), t.index().to_string(), profile.count(t).to_string()]);
    }

    let mut record = RunRecord::new("analyze", serde_json::to_value(args)?);
    record.result = json!({
        "field": f.to_string(),
        "source": source,
        "size": n,
        "max_fiber": k,
        "fiber_energy": efib,
        "fiber_energy_bound": fiber_energy_bound(&e)?,
        "profile": profile,
        "delta_size": profile.support_size(),
        "delta_over_q": profile.support_size() as f64 / q as f64,
        "bounds": bounds,
        "full_distance": {
            "predicted": predicts_full,
            "pointwise_bound": pointwise.exact_value().map(|v| v.to_string()),
        },
        "point_set": point_set_json(&e),
    });
    record.summary = tallies.summary();
    record.table = table;
    record.timings_ms = phases.finish();
    Ok(record)
}
