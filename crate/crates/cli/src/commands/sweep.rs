use parafalc_core::bounds::{fiber_energy_lower_bound, main_lower_bound, to_f64};
use parafalc_core::constructions::{derive_seed, random_set, random_set_with_fiber_cap, ConstructionCheck};
use parafalc_core::energy::fiber_energy;
use parafalc_core::field::{prime_power, Field};
use parafalc_core::geometry::{distance_profile, max_fiber, PointSet};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{opt, ConstructionSpec};
use crate::args::{Frac, SweepArgs};
use crate::envelope::Envelope;
use crate::error::{config, HarnessError, Result};
use crate::record::{Phases, RunRecord, Summary, Table};

#[derive(Clone, Debug, Default, Serialize)]
pub struct Row {
    pub index: u64,
    pub label: String,
    pub q: u64,
    pub seed: Option<u64>,
    pub status: String,
    pub n: Option<u64>,
    pub max_fiber: Option<u64>,
    pub fiber_energy: Option<u64>,
    pub delta_size: Option<u64>,
    pub bound_main: Option<String>,
    pub bound_main_approx: Option<f64>,
    pub bound_fib: Option<String>,
    pub bound_fib_approx: Option<f64>,
    pub delta_over_q: Option<f64>,
    /// |Δ|·(1 + q²K/n²)/q, i.e. observed over the main bound
    pub tightness: Option<f64>,
    pub main_ok: Option<bool>,
    pub fib_ok: Option<bool>,
    pub applicable: Option<bool>,
    pub predicted_delta: Option<u64>,
    pub prediction_ok: Option<bool>,
}

impl Row {
    fn passed(&self) -> bool {
        self.main_ok != Some(false) && self.fib_ok != Some(false) && self.prediction_ok != Some(false)
    }
}

fn fill(row: &mut Row, e: &PointSet) -> Result<()> {
    let q = row.q;
    let n = e.len() as u64;
    let k = max_fiber(e)? as u64;
    let efib = fiber_energy(e)?;
    let delta = distance_profile(e)?.support_size() as u64;
    let main = main_lower_bound(q, n, k)?;
    let fib = fiber_energy_lower_bound(q, n, efib)?;
    let obs = BigRational::from_integer(delta.into());
    row.n = Some(n);
    row.max_fiber = Some(k);
    row.fiber_energy = Some(efib);
    row.delta_size = Some(delta);
    row.bound_main_approx = Some(to_f64(&main));
    row.bound_fib_approx = Some(to_f64(&fib));
    row.delta_over_q = Some(delta as f64 / q as f64);
    row.tightness = (&obs / &main).to_f64();
    row.main_ok = Some(obs >= main);
    row.fib_ok = Some(obs >= fib);
    row.bound_main = Some(main.to_string());
    row.bound_fib = Some(fib.to_string());
    Ok(())
}

fn random_rows(args: &SweepArgs, env: &Envelope) -> Result<Vec<Row>> {
    let qs = args.q.as_ref().map(|l| l.0.clone()).unwrap_or_default();
    let sizes = args.size.as_ref().ok_or_else(|| config("random sweeps need --size LIST"))?.0.clone();
    let caps: Vec<Option<u64>> = match &args.fiber_cap {
        Some(l) => l.0.iter().map(|&k| Some(k)).collect(),
        None => vec![None],
    };
    let mut fields = Vec::new();
    for &q in &qs {
        match prime_power(q) {
            Some((p, _)) if p != 2 => {}
            _ => return Err(config(format!("q = {q} is not an odd prime power"))),
        }
        let largest = sizes.iter().copied().max().unwrap_or(0).min(q * q) as f64;
        env.check_exhaustive(q, largest * largest, args.common.allow_large)?;
        fields.push(Field::with_order(q)?);
    }
    let mut points = Vec::new();
    for (fi, &q) in qs.iter().enumerate() {
        for &n in &sizes {
            for &cap in &caps {
                for trial in 0..args.trials {
                    points.push((fi, q, n, cap, trial));
                }
            }
        }
    }
    points
        .par_iter()
        .enumerate()
        .map(|(index, &(fi, q, n, cap, trial))| {
            let seed = derive_seed(args.common.seed, index as u64);
            let label = match cap {
                Some(k) => format!("n={n} K={k} trial={trial}"),
                None => format!("n={n} trial={trial}"),
            };
            let mut row = Row { index: index as u64, label, q, seed: Some(seed), ..Row::default() };
            let set = match cap {
                Some(k) => random_set_with_fiber_cap(&fields[fi], n, k, seed),
                None => random_set(&fields[fi], n, seed),
            };
            match set {
                Ok(e) => {
                    fill(&mut row, &e)?;
                    row.status = "ok".into();
                }
                Err(err) => row.status = format!("infeasible: {err}"),
            }
            Ok(row)
        })
        .collect()
}

fn construction_rows(args: &SweepArgs, env: &Envelope) -> Result<Vec<Row>> {
    let kind = args.construction.expect("construction sweep");
    let ps: Vec<u64> = match (&args.p, &args.common.field) {
        (Some(l), _) => l.0.clone(),
        (None, Some(f)) => vec![f.prime().ok_or_else(|| config(format!("--field {}: need a prime", f.text)))?],
        (None, None) => return Err(config("construction sweeps need --p LIST or --field p")),
    };
    let epss: Vec<Frac> = args.eps.as_ref().ok_or_else(|| config("construction sweeps need --eps LIST"))?.0.clone();
    let ks: Vec<Option<u64>> = args.k.as_ref().map_or(vec![None], |l| l.0.iter().map(|&v| Some(v)).collect());
    let ms: Vec<Option<u64>> = args.m.as_ref().map_or(vec![None], |l| l.0.iter().map(|&v| Some(v)).collect());
    let mut specs = Vec::new();
    for &p in &ps {
        for &eps in &epss {
            for &k in &ks {
                for &m in &ms {
                    specs.push(ConstructionSpec::new(kind, Some(p), Some(eps), k, m)?);
                }
            }
        }
    }
    let rows: Vec<Result<Row>> = specs
        .par_iter()
        .enumerate()
        .map(|(index, spec)| {
            let label = format!(
                "p={} eps={}{}{}",
                spec.p,
                Frac(spec.eps),
                spec.k.map(|k| format!(" k={k}")).unwrap_or_default(),
                spec.m.map(|m| format!(" m={m}")).unwrap_or_default()
            );
            let q = spec.order().unwrap_or(0);
            let mut row = Row { index: index as u64, label, q, ..Row::default() };
            if let Err(e) = env.check_exhaustive(q, (q as f64).powi(3), args.common.allow_large) {
                row.status = format!("skipped: {e}");
                return Ok(row);
            }
            let c = match spec.build() {
                Ok(c) => c,
                Err(HarnessError::Core(e)) => {
                    row.status = format!("rejected: {e}");
                    return Ok(row);
                }
                Err(e) => return Err(e),
            };
            fill(&mut row, &c.set)?;
            let check: ConstructionCheck = c.verify()?;
            row.applicable = Some(c.applicable);
            row.predicted_delta = c.predicted.delta_size.filter(|_| c.applicable);
            row.prediction_ok = Some(check.passed);
            row.status = if c.applicable { "ok".into() } else { format!("inapplicable: {}", c.reason) };
            Ok(row)
        })
        .collect();
    rows.into_iter().collect()
}

pub fn sweep(args: &SweepArgs, env: &Envelope) -> Result<RunRecord> {
    let mut phases = Phases::default();
    let rows = match args.construction {
        Some(_) => construction_rows(args, env)?,
        None => random_rows(args, env)?,
    };
    phases.mark("rows");

    let mut table = Table::new(&[
        "index",
        "label",
        "q",
        "seed",
        "status",
        "n",
        "K",
        "Efib",
        "delta_size",
        "bound_main",
        "bound_main_approx",
        "bound_fib",
        "bound_fib_approx",
        "delta_over_q",
        "tightness",
        "main_ok",
        "fib_ok",
        "applicable",
        "predicted_delta",
        "prediction_ok",
    ]);
    for r in &rows {
        table.push(vec![
            r.index.to_string(),
            r.label.clone(),
            r.q.to_string(),
            opt(r.seed),
            r.status.clone(),
            opt(r.n),
            opt(r.max_fiber),
            opt(r.fiber_energy),
            opt(r.delta_size),
            opt(r.bound_main.clone()),
            opt(r.bound_main_approx),
            opt(r.bound_fib.clone()),
            opt(r.bound_fib_approx),
            opt(r.delta_over_q),
            opt(r.tightness),
            opt(r.main_ok),
            opt(r.fib_ok),
            opt(r.applicable),
            opt(r.predicted_delta),
            opt(r.prediction_ok),
        ]);
    }
    let failures: Vec<String> = rows.iter().filter(|r| !r.passed()).map(|r| format!("row {}: {}", r.index, r.label)).collect();
    let mut record = RunRecord::new("sweep", serde_json::to_value(args)?);
    record.summary = Summary {
        passed: failures.is_empty(),
        checks: rows.iter().filter(|r| r.n.is_some()).count() as u64,
        violations: failures.len() as u64,
        failures,
    };
    record.result = json!({ "rows": rows });
    record.table = table;
    record.timings_ms = phases.finish();
    Ok(record)
}
