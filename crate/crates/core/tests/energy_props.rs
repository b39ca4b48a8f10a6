use parafalc_core::constructions::{random_set, random_set_with_fiber_cap};
use parafalc_core::energy::{additive_energy, fiber_energy, fiber_energy_bound};
use parafalc_core::field::{Elem, Field};
use parafalc_core::geometry::{max_fiber, shear_a, shear_b};
use proptest::prelude::*;

/// Quadruple count |{(x, x′, y, y′) : x + y = x′ + y′}| by direct enumeration.
fn naive_energy(f: &Field, p: &[Elem], q: &[Elem]) -> u64 {
    let mut count = 0;
    for &x in p {
        for &x2 in p {
            for &y in q {
                for &y2 in q {
                    if f.add(x, y) == f.add(x2, y2) {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

fn field_and_sets() -> impl Strategy<Value = (Field, Vec<Elem>, Vec<Elem>, Elem)> {
    prop::sample::select(vec![3u64, 5, 7, 9, 13, 25, 27]).prop_flat_map(|q| {
        let f = Field::with_order(q).unwrap();
        let set = prop::collection::btree_set((0..q as u32).prop_map(Elem), 0..12)
            .prop_map(|s| s.into_iter().collect::<Vec<_>>());
        (Just(f), set.clone(), set, (0..q as u32).prop_map(Elem))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn energy_invariants((f, p, q, c) in field_and_sets()) {
        let rep = additive_energy(&f, &p, &q).unwrap();
        prop_assert_eq!(rep.value, naive_energy(&f, &p, &q));
        prop_assert_eq!(rep.value, additive_energy(&f, &q, &p).unwrap().value);
        prop_assert!(rep.value <= rep.trivial_bound);
        prop_assert!(rep.within_power_bound());
        prop_assert!(rep.value >= p.len() as u64 * q.len() as u64);
        let shifted: Vec<Elem> = p.iter().map(|&x| f.add(x, c)).collect();
        prop_assert_eq!(additive_energy(&f, &shifted, &q).unwrap().value, rep.value);
        // repeated entries do not change the set
        let doubled: Vec<Elem> = p.iter().chain(p.iter()).copied().collect();
        prop_assert_eq!(additive_energy(&f, &doubled, &q).unwrap().value, rep.value);
    }
}

#[test]
fn fiber_energy_bounds_and_shear_invariance() {
    for q in [3u64, 5, 7, 9, 11, 13] {
        let f = Field::with_order(q).unwrap();
        for seed in 0..40 {
            let cap = 1 + seed % q;
            let n = cap + (seed * 7) % (cap * q - cap + 1);
            let e = random_set_with_fiber_cap(&f, n, cap, seed).unwrap();
            let efib = fiber_energy(&e).unwrap();
            let k = max_fiber(&e).unwrap() as u64;
            assert_eq!(fiber_energy_bound(&e).unwrap(), k * n * n);
            assert!(efib <= k * n * n, "q = {q}: {efib} > {k}·{n}²");
            let diag: u64 = e.fibers().values().map(|ys| (ys.len() as u64).pow(2)).sum();
            assert!(efib >= diag && diag >= n);
            assert_eq!(fiber_energy(&shear_a(&e)).unwrap(), efib);
            assert_eq!(fiber_energy(&shear_b(&e)).unwrap(), efib);
        }
    }
}

#[test]
fn fiber_energy_matches_pairwise_sum() {
    let f = Field::with_order(9).unwrap();
    for seed in 0..10 {
        let e = random_set(&f, 30, seed).unwrap();
        let fibers: Vec<&Vec<Elem>> = e.fibers().values().collect();
        let mut total = 0;
        for a in &fibers {
            for b in &fibers {
                total += naive_energy(&f, a, b);
            }
        }
        assert_eq!(fiber_energy(&e).unwrap(), total);
    }
}
