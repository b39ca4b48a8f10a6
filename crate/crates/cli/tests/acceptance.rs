//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any failed.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use parafalc::record::{strip_timings, RunRecord};
use parafalc::run_args;
use parafalc_core::bounds::VinhBound;
use parafalc_core::constructions::{derive_seed, random_set, rng_from_seed, sharpness_subspace, subspace_construction};
use parafalc_core::energy::fiber_energy;
use parafalc_core::field::{prime_power, Elem, Field};
use parafalc_core::fourier::{spectral_report, Characters};
use parafalc_core::geometry::{distance_profile, incidence_count, shear_a, shear_b, Line, Point, PointSet};
use rand::Rng;
use serde_json::Value;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn run(args: &[&str]) -> RunRecord {
    run_args(args).unwrap_or_else(|e| panic!("parafalc {}: {e}", args.join(" ")))
}

fn json(r: &RunRecord) -> Value {
    serde_json::from_str(&r.to_json().unwrap()).unwrap()
}

fn int(v: &Value) -> u64 {
    v.as_u64().unwrap_or_else(|| panic!("expected an integer, got {v}"))
}

/// Residue of a prime-field element.
fn residue(f: &Field, x: Elem) -> u64 {
    f.coeffs(x)[0] as u64
}

/// Schoolbook polynomial product reduced by the field's monic modulus.
struct PolyField {
    p: u64,
    modulus: Vec<u64>,
}

impl PolyField {
    fn new(f: &Field) -> Self {
        PolyField { p: f.characteristic() as u64, modulus: f.modulus().iter().map(|&c| c as u64).collect() }
    }

    fn n(&self) -> usize {
        self.modulus.len() - 1
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + self.p - y) % self.p).collect()
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = self.n();
        let mut prod = vec![0u64; 2 * n];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        for d in (n..2 * n).rev() {
            let c = prod[d];
            if c != 0 {
                for (k, m) in self.modulus.iter().enumerate().take(n) {
                    prod[d - n + k] = (prod[d - n + k] + (self.p - c) * m) % self.p;
                }
                prod[d] = 0;
            }
        }
        prod.truncate(n);
        prod
    }
}

fn coeffs(f: &Field, x: Elem) -> Vec<u64> {
    let mut c: Vec<u64> = f.coeffs(x).into_iter().map(u64::from).collect();
    c.resize(f.degree(), 0);
    c
}

/// All parabolic distances of E by direct enumeration in polynomial arithmetic.
fn naive_distance_set(e: &PointSet) -> BTreeSet<Vec<u64>> {
    let f = e.field();
    let pf = PolyField::new(f);
    let pts: Vec<(Vec<u64>, Vec<u64>)> = e.points().map(|Point(a, b)| (coeffs(f, a), coeffs(f, b))).collect();
    let mut out = BTreeSet::new();
    for x in &pts {
        for y in &pts {
            let d1 = pf.sub(&x.0, &y.0);
            out.insert(pf.add(&pf.sub(&x.1, &y.1), &pf.mul(&d1, &d1)));
        }
    }
    out
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn criterion1() -> Outcome {
    let (r, dt) = timed(|| run(&["construct", "grid", "--field", "101", "--eps", "1/2", "--check"]));
    let j = json(&r);
    let c = &j["result"]["construction"];
    let (m, n) = (c["predicted"]["grid_m"].clone(), c["predicted"]["grid_n"].clone());
    let size = int(&j["result"]["check"]["observed"]["size"]);
    let delta = int(&j["result"]["check"]["observed"]["delta_size"]);

    let e = parafalc_core::constructions::grid_construction(101, num_rational::Rational64::new(1, 2)).unwrap();
    let f = e.set.field().clone();
    let pts: Vec<(u64, u64)> = e.set.points().map(|Point(a, b)| (residue(&f, a), residue(&f, b))).collect();
    let mut seen = BTreeSet::new();
    for &(x1, x2) in &pts {
        for &(y1, y2) in &pts {
            let d1 = (x1 + 101 - y1) % 101;
            seen.insert((x2 + 101 - y2 + d1 * d1) % 101);
        }
    }
    let formula = (3 - 1) * (3 - 1) + 2 * 31 - 1;
    let ok = r.summary.passed
        && m == 3
        && n == 31
        && size == 93
        && pts.len() == 93
        && delta == 65
        && seen.len() as u64 == 65
        && formula == 65
        && dt < Duration::from_secs(1);
    outcome(
        ok,
        format!("|E| = {size}, |delta| = {delta} (enumerated {}), M = {m}, N = {n}, {:.0} ms", seen.len(), dt.as_secs_f64() * 1e3),
    )
}

fn criterion2() -> Outcome {
    let (r, dt) = timed(|| {
        run(&["construct", "sharpness-subspace", "--field", "3", "--k", "2", "--m", "2", "--eps", "1/2", "--check"])
    });
    let j = json(&r);
    let obs = &j["result"]["check"]["observed"];
    let (size, k, delta) = (int(&obs["size"]), int(&obs["max_fiber"]), int(&obs["delta_size"]));

    let c = sharpness_subspace(3, 2, 2, num_rational::Rational64::new(1, 2)).unwrap();
    let f = c.set.field().clone();
    let q = f.order() as u64;
    let v = &c.target.as_ref().expect("target subspace").subspace;
    let naive = naive_distance_set(&c.set);
    let target: BTreeSet<Vec<u64>> = v.elements().into_iter().map(|x| coeffs(&f, x)).collect();
    // |E|·q^eps = q·√K with q^eps = 9 and √K = 3
    let relation = size * 9 == q * 3 && k == 9;
    let ok = r.summary.passed
        && q == 81
        && size == 27
        && k == 9
        && delta == 9
        && v.size() == 9
        && naive == target
        && relation
        && dt < Duration::from_secs(1);
    outcome(
        ok,
        format!("q = {q}, |E| = {size}, K = {k}, |delta| = {delta}, delta = V: {}, {:.0} ms", naive == target, dt.as_secs_f64() * 1e3),
    )
}

fn criterion3() -> Outcome {
    let r = run(&["construct", "subspace", "--field", "3", "--m", "1", "--eps", "1/2", "--check"]);
    let c = subspace_construction(3, 1, num_rational::Rational64::new(1, 2)).unwrap();
    let f = c.set.field().clone();
    let v = &c.target.as_ref().expect("target subspace").subspace;
    let profile = distance_profile(&c.set).unwrap();
    let contained = profile.support().iter().all(|&t| v.contains(t));
    let naive = naive_distance_set(&c.set);
    let prime_subfield: BTreeSet<Vec<u64>> = (0..3).map(|k| coeffs(&f, f.from_int(k))).collect();
    let ok = r.summary.passed && contained && naive == prime_subfield;
    outcome(ok, format!("q = {}, |delta| = {}, delta in V: {contained}, delta = F_3: {}", f.order(), naive.len(), naive == prime_subfield))
}

fn check_tally(j: &Value, name: &str) -> (u64, u64) {
    let t = &j["result"]["checks"][name];
    (t["checked"].as_u64().unwrap_or(0), t["violations"].as_u64().unwrap_or(u64::MAX))
}

const SWEEP_ARGS: [&str; 7] = ["verify", "--q", "3,5,7,9,11,13", "--trials", "200", "--seed", "2024"];

fn criterion4(verify: &Value, dt: Duration) -> Outcome {
    let names = [
        "main_lower_bound",
        "fiber_energy_lower_bound",
        "second_moment_upper_bound",
        "fiber_second_moment_bound",
        "bipartite_lower_bound",
        "bipartite_second_moment_bound",
        "fiber_pair_energy",
        "first_moment",
    ];
    let mut ok = dt < Duration::from_secs(300);
    let mut parts = Vec::new();
    for name in names {
        let (checked, bad) = check_tally(verify, name);
        ok &= checked > 0 && bad == 0;
        parts.push(format!("{name} {bad}/{checked}"));
    }
    let trials: u64 = verify["result"]["per_q"].as_array().unwrap().iter().map(|x| int(&x["trials"])).sum();
    ok &= trials == 1200;
    outcome(ok, format!("{trials} trials in {:.1} s; {}", dt.as_secs_f64(), parts.join(", ")))
}

fn criterion5() -> Outcome {
    let mut full_checked = 0u64;
    let mut exceptions = 0u64;
    let mut pointwise_checked = 0u64;
    let mut pointwise_bad = 0u64;
    for q in [3u64, 5, 7, 9] {
        let f = Field::with_order(q).unwrap();
        let lo = (1..=q * q).find(|n| n * n > q * q * q).unwrap();
        for i in 0..200u64 {
            let seed = derive_seed(5, (q << 32) | i);
            let mut rng = rng_from_seed(seed);
            let n = rng.gen_range(lo..=q * q);
            let e = random_set(&f, n, rng.gen()).unwrap();
            let profile = distance_profile(&e).unwrap();
            full_checked += 1;
            if profile.support_size() as u64 != q {
                exceptions += 1;
            }
            let bound = parafalc_core::bounds::pointwise_nu_lower(q, n).unwrap();
            let exact = bound.exact_value();
            for t in f.elements() {
                let nu = profile.count(t);
                pointwise_checked += 1;
                let mut ok = bound.holds_for(nu);
                if let Some(v) = &exact {
                    ok &= num_rational::BigRational::from_integer(nu.into()) >= *v;
                }
                if !ok {
                    pointwise_bad += 1;
                }
            }
        }
    }
    let verify = run(&["verify", "--q", "3,5,7,9", "--trials", "200", "--seed", "5"]);
    let j = json(&verify);
    let (vc, vb) = check_tally(&j, "full_distance_set");
    let (pc, pb) = check_tally(&j, "pointwise_nu_lower");
    let ok = exceptions == 0 && pointwise_bad == 0 && vb == 0 && pb == 0 && vc > 0 && full_checked > 0;
    outcome(
        ok,
        format!(
            "dense sets {exceptions}/{full_checked} exceptions, pointwise {pointwise_bad}/{pointwise_checked}; verify run: full {vb}/{vc}, pointwise {pb}/{pc}"
        ),
    )
}

fn criterion6(verify: &Value) -> Outcome {
    let mut pairs = 0u64;
    let mut bad = 0u64;
    for q in [3u64, 5, 7, 9, 11, 13] {
        let f = Field::with_order(q).unwrap();
        for i in 0..100u64 {
            let mut rng = rng_from_seed(derive_seed(6, (q << 32) | i));
            let np = rng.gen_range(1..=q * q);
            let points: Vec<Point> = random_set(&f, np, rng.gen()).unwrap().points().collect();
            let nl = rng.gen_range(1..=q * q);
            let lines: Vec<Line> = random_set(&f, nl, rng.gen())
                .unwrap()
                .points()
                .map(|Point(m, b)| Line { slope: m, intercept: b })
                .collect();
            let i_count = incidence_count(&f, &points, &lines).unwrap();
            let naive = points
                .iter()
                .map(|pt| lines.iter().filter(|l| f.add(f.mul(l.slope, pt.0), l.intercept) == pt.1).count() as u64)
                .sum::<u64>();
            let vinh = VinhBound { q, n_points: np, n_lines: nl };
            pairs += 1;
            if i_count != naive || !vinh.holds_for(i_count) {
                bad += 1;
            }
        }
    }
    let (mc, mb) = check_tally(verify, "vinh_incidence");
    let (ec, eb) = check_tally(verify, "incidence_equals_nu");
    let ok = pairs >= 500 && bad == 0 && mc > 0 && mb == 0 && ec == mc && eb == 0;
    outcome(ok, format!("random pairs {bad}/{pairs} failures; incidence-model pairs Vinh {mb}/{mc}, I = nu {eb}/{ec}"))
}

const AUDIT_ARGS: [&str; 9] = ["audit-fourier", "--q", "3,5,9,25,27,81", "--trials", "100", "--sets", "50", "--seed", "7"];

fn criterion7(audit: &Value) -> Outcome {
    let mut ok = audit["summary"]["passed"] == true;
    let mut parts = Vec::new();
    for fa in audit["result"]["fields"].as_array().unwrap() {
        let q = int(&fa["q"]) as f64;
        let orth = fa["orthogonality_deviation"].as_f64().unwrap();
        let planch = fa["plancherel_max_error"].as_f64().unwrap();
        let ident = fa["max_identity_error"].as_f64().unwrap();
        ok &= orth < q * 1e-9 && planch < 1e-9 && ident <= 1e-6 && int(&fa["sets"]) == 100;
        parts.push(format!("q={q}: {orth:.1e}/{planch:.1e}/{ident:.1e}"));
    }
    let (pc, pb) = check_tally(audit, "plancherel");
    ok &= pc == 600 && pb == 0;

    let f = Field::prime(3).unwrap();
    let e = PointSet::new(&f, [Point(f.zero(), f.zero()), Point(f.zero(), f.one())]).unwrap();
    let chars = Characters::new(&f);
    let report = spectral_report(&chars, &shear_a(&e), &shear_b(&e)).unwrap();
    let two_point = report.sum_s_sq_nonzero;
    ok &= (two_point - 2.0).abs() < 1e-9;
    outcome(ok, format!("orth/plancherel/identity {}; two-point sum {two_point}", parts.join(", ")))
}

fn criterion8(audit: &Value) -> Outcome {
    let (checked, bad) = check_tally(audit, "energy_identity");
    let worst = audit["result"]["fields"]
        .as_array()
        .unwrap()
        .iter()
        .map(|fa| fa["max_energy_deviation"].as_f64().unwrap())
        .fold(0.0, f64::max);

    // one instance recomputed here with the energy module directly
    let f = Field::with_order(9).unwrap();
    let e = random_set(&f, 40, 8).unwrap();
    let chars = Characters::new(&f);
    let report = spectral_report(&chars, &shear_a(&e), &shear_b(&e)).unwrap();
    let exact = 9.0 * fiber_energy(&shear_a(&e)).unwrap() as f64;
    let local = (report.sum_u_sq - exact).abs() / exact;
    let ok = checked == 600 && bad == 0 && worst <= 1e-6 && local <= 1e-6;
    outcome(ok, format!("{bad}/{checked} instances off, max relative deviation {worst:.1e}"))
}

fn criterion9() -> Outcome {
    let mut pairs = 0u64;
    let mut bad = 0u64;
    let mut sets = 0u64;
    for q in (3u64..=25).filter(|&q| matches!(prime_power(q), Some((p, _)) if p != 2)) {
        let f = Field::with_order(q).unwrap();
        let minus_two = f.neg(f.from_int(2));
        for i in 0..50u64 {
            let mut rng = rng_from_seed(derive_seed(9, (q << 32) | i));
            let n = rng.gen_range(1..=q * q);
            let e = random_set(&f, n, rng.gen()).unwrap();
            let a: Vec<Point> = e
                .points()
                .map(|x| shear_a(&PointSet::new(&f, [x]).unwrap()).points().next().unwrap())
                .collect();
            let b: Vec<Point> = e
                .points()
                .map(|x| shear_b(&PointSet::new(&f, [x]).unwrap()).points().next().unwrap())
                .collect();
            let pts: Vec<Point> = e.points().collect();
            for (x, ax) in pts.iter().zip(&a) {
                for (y, by) in pts.iter().zip(&b) {
                    let form = f.add(f.sub(ax.1, by.1), f.mul(minus_two, f.mul(ax.0, by.0)));
                    let d1 = f.sub(x.0, y.0);
                    let dist = f.add(f.sub(x.1, y.1), f.mul(d1, d1));
                    pairs += 1;
                    if form != dist {
                        bad += 1;
                    }
                }
            }
            let sizes = |s: &PointSet| s.fibers().iter().map(|(u, ys)| (*u, ys.len())).collect::<Vec<_>>();
            let (sa, sb) = (shear_a(&e), shear_b(&e));
            if sizes(&sa) != sizes(&e) || sizes(&sb) != sizes(&e) || shear_b(&sa) != e || shear_a(&sb) != e {
                bad += 1;
            }
            sets += 1;
        }
    }
    outcome(bad == 0, format!("{sets} sets, {pairs} pairs, {bad} failures"))
}

fn criterion10(first: &[(String, String)]) -> Outcome {
    let mut diffs = Vec::new();
    for (cmd, text) in first {
        let args: Vec<&str> = cmd.split(' ').collect();
        for jobs in ["1", "3"] {
            let mut with_jobs = args.clone();
            with_jobs.extend(["--jobs", jobs]);
            let again = strip_timings(&run(&with_jobs).to_json().unwrap()).unwrap();
            if &again != text {
                diffs.push(format!("{cmd} --jobs {jobs}"));
            }
        }
    }
    outcome(diffs.is_empty(), format!("{} commands rerun twice; differing: {:?}", first.len(), diffs))
}

fn main() {
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    results.push((1, criterion1()));
    results.push((2, criterion2()));
    results.push((3, criterion3()));

    let (verify_rec, dt) = timed(|| run(&SWEEP_ARGS));
    let verify = json(&verify_rec);
    results.push((4, criterion4(&verify, dt)));
    results.push((5, criterion5()));
    results.push((6, criterion6(&verify)));

    let audit_rec = run(&AUDIT_ARGS);
    let audit = json(&audit_rec);
    results.push((7, criterion7(&audit)));
    results.push((8, criterion8(&audit)));
    results.push((9, criterion9()));

    let commands = [
        "construct grid --field 101 --eps 1/2 --check",
        "construct sharpness-subspace --field 3 --k 2 --m 2 --eps 1/2 --check",
        "construct subspace --field 3 --m 1 --eps 1/2 --check",
        "verify --q 3,5,7,9,11,13 --trials 200 --seed 2024",
        "verify --q 3,5,7,9 --trials 200 --seed 5",
        "audit-fourier --q 3,5,9,25,27,81 --trials 100 --sets 50 --seed 7",
        "sweep --q 5,9 --size 3,20 --fiber-cap 1,5 --trials 2 --seed 3",
    ];
    let first: Vec<(String, String)> = commands
        .iter()
        .map(|c| {
            let args: Vec<&str> = c.split(' ').collect();
            (c.to_string(), strip_timings(&run(&args).to_json().unwrap()).unwrap())
        })
        .collect();
    results.push((10, criterion10(&first)));

    let mut failed = 0;
    for (n, o) in &results {
        println!("criterion {n:>2}: {} ({})", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
