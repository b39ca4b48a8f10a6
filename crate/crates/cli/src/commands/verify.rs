use parafalc_core::bounds::{
    bipartite_lower_bound, bipartite_second_moment_bound, fiber_energy_lower_bound, main_lower_bound,
    single_set_reports, pointwise_nu_lower, vinh_deviation_bound,
};
use parafalc_core::constructions::{derive_seed, random_set, random_set_with_fiber_cap, rng_from_seed};
use parafalc_core::energy::{fiber_energy, fiber_pair_trivial_bounds};
use parafalc_core::field::{prime_power, Field};
use parafalc_core::geometry::{
    bipartite_profile, distance_profile, incidence_count, incidence_model, max_fiber, shear_a, shear_b,
    shear_form_counts, PointSet,
};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::args::VerifyArgs;
use crate::envelope::Envelope;
use crate::error::{config, Result};
use crate::record::{Phases, RunRecord, Tallies, Table};

/// One random trial: the sets drawn and every check made on them.
#[derive(Clone, Debug, Serialize)]
pub struct TrialOutcome {
    pub q: u64,
    pub trial: u64,
    pub seed: u64,
    pub n: u64,
    pub max_fiber: u64,
    pub fiber_energy: u64,
    pub delta_size: u64,
    pub main_num: String,
    pub main_den: String,
    pub fib_num: String,
    pub fib_den: String,
    pub tallies: Tallies,
}

fn fiber_sizes(e: &PointSet) -> Vec<(u32, usize)> {
    e.fibers().iter().map(|(u, ys)| (u.0, ys.len())).collect()
}

/// Draws E (and a partner F) for one trial and runs all checks.
pub fn run_trial(field: &Field, trial: u64, seed: u64, size: Option<u64>, cap: Option<u64>) -> Result<TrialOutcome> {
    let q = field.order() as u64;
    let mut rng = rng_from_seed(seed);
    let capped = cap.is_some() || (size.is_none() && trial % 2 == 1);
    let e = if capped {
        let k = cap.unwrap_or_else(|| rng.gen_range(1..=q));
        let n = size.unwrap_or_else(|| rng.gen_range(k.max(2)..=k * q));
        random_set_with_fiber_cap(field, n, k, rng.gen())?
    } else {
        let n = size.unwrap_or_else(|| rng.gen_range(2..=q * q));
        random_set(field, n, rng.gen())?
    };
    let g = random_set(field, rng.gen_range(1..=q * q), rng.gen())?;

    let ctx = |what: &str| format!("q={q} trial={trial} seed={seed} {what}");
    let mut t = Tallies::default();
    let n = e.len() as u64;
    let k = max_fiber(&e)? as u64;
    let efib = fiber_energy(&e)?;
    let profile = distance_profile(&e)?;
    let delta = profile.support_size() as u64;

    t.record("first_moment", profile.first_moment() == n * n, || ctx("sum of counts != n^2"));
    for b in single_set_reports(q, n, k, efib, delta, profile.second_moment())? {
        t.record(&b.name, b.satisfied == Some(true), || ctx(&format!("observed {:?}", b.observed)));
    }

    let (ng, kg) = (g.len() as u64, max_fiber(&g)? as u64);
    let bip = bipartite_profile(&e, &g)?;
    let lower = bipartite_lower_bound(q, n, ng, k, kg)?;
    t.record("bipartite_lower_bound", lower.satisfied_by(bip.support_size() as u64), || {
        ctx(&format!("|delta(E,F)| = {}", bip.support_size()))
    });
    let upper = bipartite_second_moment_bound(q, n, ng, k, kg)?;
    t.record("bipartite_second_moment_bound", upper.satisfied_by(bip.second_moment()), || {
        ctx(&format!("sum nu^2 = {}", bip.second_moment()))
    });

    let same = shear_form_counts(&shear_a(&e), &shear_b(&e))? == profile.nu();
    t.record("shear_identity", same, || ctx("shear form counts differ from nu(E)"));
    let cross = shear_form_counts(&shear_a(&e), &shear_b(&g))? == bip.nu();
    t.record("shear_identity", cross, || ctx("shear form counts differ from nu(E,F)"));
    let sizes = fiber_sizes(&e);
    let kept = fiber_sizes(&shear_a(&e)) == sizes && fiber_sizes(&shear_b(&e)) == sizes;
    t.record("shear_fibers", kept, || ctx("shear changed a fiber size"));
    t.record("shear_inverse", shear_b(&shear_a(&e)) == e, || ctx("shear maps not inverse"));

    let (pairs, bad) = fiber_pair_trivial_bounds(&e)?;
    t.record_many("fiber_pair_energy", pairs, bad, || ctx(&format!("{bad} fiber pairs above the trivial bound")));

    let vinh = vinh_deviation_bound(q, n, n);
    let pointwise = pointwise_nu_lower(q, n)?;
    for s in field.elements() {
        let (pts, lines) = incidence_model(&e, s)?;
        let i = incidence_count(field, &pts, &lines)?;
        t.record("incidence_equals_nu", i == profile.count(s), || ctx(&format!("I(P_t, L_t) != nu(t) at t={}", s.0)));
        t.record("vinh_incidence", vinh.holds_for(i), || ctx(&format!("t={} I={i}", s.0)));
        t.record("pointwise_nu_lower", pointwise.holds_for(profile.count(s)), || {
            ctx(&format!("nu({}) = {}", s.0, profile.count(s)))
        });
    }
    if pointwise.predicts_full_distance_set() {
        t.record("full_distance_set", delta == q, || ctx(&format!("|delta| = {delta} with n = {n}")));
    }

    let main = main_lower_bound(q, n, k)?;
    let fib = fiber_energy_lower_bound(q, n, efib)?;
    Ok(TrialOutcome {
        q,
        trial,
        seed,
        n,
        max_fiber: k,
        fiber_energy: efib,
        delta_size: delta,
        main_num: main.numer().to_string(),
        main_den: main.denom().to_string(),
        fib_num: fib.numer().to_string(),
        fib_den: fib.denom().to_string(),
        tallies: t,
    })
}

pub fn verify(args: &VerifyArgs, env: &Envelope) -> Result<RunRecord> {
    let mut phases = Phases::default();
    let qs: Vec<u64> = match (&args.q, &args.common.field) {
        (Some(list), _) => list.0.clone(),
        (None, Some(f)) => vec![f.order().ok_or_else(|| config(format!("--field {}: not a field order", f.text)))?],
        (None, None) => return Err(config("verify needs --q LIST or --field")),
    };
    let mut fields = Vec::new();
    for &q in &qs {
        match prime_power(q) {
            Some((p, _)) if p != 2 => {}
            _ => return Err(config(format!("q = {q} is not an odd prime power"))),
        }
        env.check_exhaustive(q, (q as f64).powi(4) * args.trials as f64, args.common.allow_large)?;
        if let Some(n) = args.size {
            if n < 1 || n > q * q {
                return Err(config(format!("--size {n} outside [1, q^2] for q = {q}")));
            }
        }
        if let Some(cap) = args.fiber_cap {
            let n_ok = args.size.is_none_or(|n| cap <= n && n <= cap * q);
            if cap < 1 || cap > q || !n_ok {
                return Err(config(format!("--fiber-cap {cap} infeasible for q = {q}")));
            }
        }
        let field = match (&args.common.field, args.q.is_none()) {
            (Some(spec), true) => spec.build()?,
            _ => Field::with_order(q)?,
        };
        fields.push(field);
    }
    phases.mark("setup");

    let points: Vec<(usize, u64)> =
        (0..fields.len()).flat_map(|i| (0..args.trials).map(move |t| (i, t))).collect();
    let outcomes: Vec<TrialOutcome> = points
        .par_iter()
        .map(|&(i, trial)| {
            let seed = derive_seed(args.common.seed, ((i as u64) << 32) | trial);
            run_trial(&fields[i], trial, seed, args.size, args.fiber_cap)
        })
        .collect::<Result<_>>()?;
    phases.mark("trials");

    let mut total = Tallies::default();
    let mut per_q = Vec::new();
    for (i, &q) in qs.iter().enumerate() {
        let mut tq = Tallies::default();
        let chunk = &outcomes[i * args.trials as usize..(i + 1) * args.trials as usize];
        for o in chunk {
            tq.merge(&o.tallies);
        }
        per_q.push(json!({
            "q": q,
            "field": fields[i].to_string(),
            "trials": args.trials,
            "checks": tq.counts,
            "violations": tq.violations(),
        }));
        total.merge(&tq);
    }

    let mut table = Table::new(&[
        "q",
        "trial",
        "seed",
        "n",
        "K",
        "Efib",
        "delta_size",
        "bound_main_num",
        "bound_main_den",
        "bound_fib_num",
        "bound_fib_den",
        "main_ok",
        "fib_ok",
        "second_moment_ok",
        "violations",
    ]);
    let ok = |o: &TrialOutcome, name: &str| o.tallies.counts.get(name).is_none_or(|t| t.violations == 0).to_string();
    for o in &outcomes {
        table.push(vec![
            o.q.to_string(),
            o.trial.to_string(),
            o.seed.to_string(),
            o.n.to_string(),
            o.max_fiber.to_string(),
            o.fiber_energy.to_string(),
            o.delta_size.to_string(),
            o.main_num.clone(),
            o.main_den.clone(),
            o.fib_num.clone(),
            o.fib_den.clone(),
            ok(o, "main_lower_bound"),
            ok(o, "fiber_energy_lower_bound"),
            ok(o, "second_moment_upper_bound"),
            o.tallies.violations().to_string(),
        ]);
    }

    let mut record = RunRecord::new("verify", serde_json::to_value(args)?);
    record.result = json!({ "per_q": per_q, "checks": total.counts });
    record.summary = total.summary();
    record.table = table;
    record.timings_ms = phases.finish();
    Ok(record)
}
