use num_complex::Complex64;
use parafalc_core::constructions::{derive_seed, random_set, rng_from_seed};
use parafalc_core::energy::fiber_energy;
use parafalc_core::fourier::*;
use parafalc_core::field::Field;
use parafalc_core::geometry::{shear_a, shear_b, Point, PointSet};
use rand::Rng;

const ORDERS: [u64; 8] = [3, 5, 7, 9, 25, 27, 49, 81];

#[test]
fn orthogonality_and_unit_modulus() {
    for q in ORDERS {
        let f = Field::with_order(q).unwrap();
        let c = Characters::new(&f);
        assert!(c.orthogonality_deviation() < q as f64 * 1e-9, "q = {q}");
        assert!(c.unit_modulus_deviation() < 1e-12);
        assert_eq!(c.chi(f.zero()), Complex64::new(1.0, 0.0));
    }
}

#[test]
fn character_is_additive() {
    for q in [9u64, 27, 25] {
        let f = Field::with_order(q).unwrap();
        let c = Characters::new(&f);
        for a in f.elements() {
            assert_eq!(c.chi(a), character(&f.element(a).unwrap()));
            for b in f.elements() {
                assert!((c.chi(f.add(a, b)) - c.chi(a) * c.chi(b)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn plancherel_on_random_functions() {
    for q in [3u64, 5, 9, 25, 27, 81] {
        let f = Field::with_order(q).unwrap();
        let c = Characters::new(&f);
        let mut rng = rng_from_seed(q);
        for _ in 0..100 {
            let h: Vec<Complex64> =
                (0..q).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            assert!(plancherel_relative_error(&c, &h).unwrap() < 1e-9);
        }
        assert!(fourier_transform(&c, &[Complex64::new(1.0, 0.0)]).is_err());
    }
}

#[test]
fn spectral_values_match_direct_character_sums() {
    for q in [5u64, 9] {
        let f = Field::with_order(q).unwrap();
        let c = Characters::new(&f);
        let two = f.from_int(2);
        for seed in 0..5 {
            let a = random_set(&f, 12, seed).unwrap();
            let b = random_set(&f, 9, seed + 100).unwrap();
            let rep = spectral_report(&c, &a, &b).unwrap();
            assert!(rep.factorization_holds(&Tolerances::default()));
            assert!((rep.s_values[0].re - 108.0).abs() < 1e-9);
            for s in f.elements() {
                let mut direct = Complex64::new(0.0, 0.0);
                for Point(a1, a2) in a.points() {
                    for Point(b1, b2) in b.points() {
                        let form = f.sub(f.sub(a2, b2), f.mul(two, f.mul(a1, b1)));
                        direct += c.chi(f.mul(s, form));
                    }
                }
                assert!((direct - rep.s_values[s.index()]).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn second_moment_identity_and_audit_on_random_sets() {
    let tol = Tolerances::default();
    for q in [3u64, 5, 9, 25, 27, 81] {
        let f = Field::with_order(q).unwrap();
        let c = Characters::new(&f);
        for trial in 0..20u64 {
            let mut rng = rng_from_seed(derive_seed(q, trial));
            let max = (q * q).min(400);
            let e = random_set(&f, rng.gen_range(1..=max), rng.gen()).unwrap();
            let g = random_set(&f, rng.gen_range(1..=max), rng.gen()).unwrap();
            let id = second_moment_identity_check(&c, &e, &e).unwrap();
            assert!(id.holds(&tol), "q = {q}: {id:?}");
            let id = second_moment_identity_check(&c, &e, &g).unwrap();
            assert!(id.holds(&tol), "q = {q}: {id:?}");
            let audit = spectral_inequality_audit(&c, &e, &g).unwrap();
            assert!(audit.passed(&tol), "q = {q}: {audit:?}");
            assert_eq!(audit.fiber_energy_a, fiber_energy(&shear_a(&e)).unwrap());
            assert_eq!(audit.fiber_energy_b, fiber_energy(&shear_b(&g)).unwrap());
            assert_eq!(audit.fiber_energy_a, fiber_energy(&e).unwrap());
        }
    }
}

#[test]
fn two_point_instance() {
    let f = Field::prime(3).unwrap();
    let c = Characters::new(&f);
    let e = PointSet::new(&f, [Point(f.from_int(0), f.from_int(0)), Point(f.from_int(0), f.from_int(1))]).unwrap();
    let id = second_moment_identity_check(&c, &e, &e).unwrap();
    assert_eq!(id.lhs, 6);
    assert!((id.spectral_term * 3.0 - 2.0).abs() < 1e-9);
    assert!((id.rhs() - 6.0).abs() < 1e-9);
}
