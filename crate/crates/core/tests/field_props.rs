use parafalc_core::field::{subfield_elements, Elem, Field};
use proptest::prelude::*;

/// Schoolbook product of coefficient vectors reduced by a monic modulus.
fn oracle_mul(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let n = modulus.len() - 1;
    let p = p as u64;
    let mut prod = vec![0u64; 2 * n];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
        }
    }
    for k in (n..2 * n).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for i in 0..n {
            prod[k - n + i] = (prod[k - n + i] + (p - c) * modulus[i] as u64) % p;
        }
    }
    prod[..n].iter().map(|&c| c as u32).collect()
}

const ORDERS: [u64; 11] = [3, 9, 25, 27, 49, 81, 121, 125, 243, 343, 13];

fn field_and_three() -> impl Strategy<Value = (Field, Elem, Elem, Elem)> {
    prop::sample::select(ORDERS.to_vec()).prop_flat_map(|q| {
        let f = Field::with_order(q).unwrap();
        let e = (0..q as u32).prop_map(Elem);
        (Just(f), e.clone(), e.clone(), e)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn field_axioms((f, a, b, c) in field_and_three()) {
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
        prop_assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
        prop_assert_eq!(f.mul(a, f.one()), a);
        if a != f.zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            prop_assert_eq!(f.div(f.mul(b, a), a).unwrap(), b);
        }
    }

    #[test]
    fn product_matches_schoolbook((f, a, b, _c) in field_and_three()) {
        let got = f.coeffs(f.mul(a, b));
        let want = oracle_mul(&f.coeffs(a), &f.coeffs(b), f.modulus(), f.characteristic());
        prop_assert_eq!(got, want);
    }

    #[test]
    fn fermat((f, a, _b, _c) in field_and_three()) {
        prop_assert_eq!(f.pow(a, f.order() as u64), a);
    }
}

#[test]
fn prime_fields_match_integer_arithmetic() {
    for p in [3u64, 5, 7, 11, 13, 101] {
        let f = Field::prime(p).unwrap();
        let p = p as i64;
        for a in 0..p {
            for b in 0..p {
                let (x, y) = (f.from_int(a), f.from_int(b));
                assert_eq!(f.add(x, y), f.from_int((a + b) % p));
                assert_eq!(f.sub(x, y), f.from_int((a - b).rem_euclid(p)));
                assert_eq!(f.mul(x, y), f.from_int(a * b % p));
                assert_eq!(x.index() as i64, a);
            }
        }
    }
}

#[test]
fn table_and_polynomial_paths_agree_above_threshold() {
    // 3^8 = 6561 exceeds the table limit
    let f = Field::new(3, 8, None).unwrap();
    assert!(!f.has_tables());
    for i in (0..6561u32).step_by(97) {
        for j in (0..6561u32).step_by(131) {
            let (a, b) = (Elem(i), Elem(j));
            let want = oracle_mul(&f.coeffs(a), &f.coeffs(b), f.modulus(), 3);
            assert_eq!(f.coeffs(f.mul(a, b)), want);
            if i != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
        }
    }
}

#[test]
fn frobenius_is_an_automorphism() {
    for q in [9u64, 25, 27, 49, 81] {
        let f = Field::with_order(q).unwrap();
        let p = f.characteristic() as u64;
        let n = f.degree();
        let mut image: Vec<Elem> = f.elements().map(|x| f.frobenius(x, 1).unwrap()).collect();
        for x in f.elements() {
            assert_eq!(f.frobenius(x, 1).unwrap(), f.pow(x, p));
            assert_eq!(f.frobenius(x, 0).unwrap(), x);
            for y in f.elements().step_by(5) {
                let fx = f.frobenius(x, 1).unwrap();
                let fy = f.frobenius(y, 1).unwrap();
                assert_eq!(f.frobenius(f.add(x, y), 1).unwrap(), f.add(fx, fy));
                assert_eq!(f.frobenius(f.mul(x, y), 1).unwrap(), f.mul(fx, fy));
            }
        }
        image.sort();
        assert_eq!(image, f.elements().collect::<Vec<_>>());
        assert!(f.frobenius(f.one(), n).is_err());
    }
}

#[test]
fn trace_is_linear_and_balanced() {
    for q in [3u64, 9, 25, 27, 81, 125, 243] {
        let f = Field::with_order(q).unwrap();
        let p = f.characteristic();
        let mut hits = vec![0u64; p as usize];
        for x in f.elements() {
            let t = f.trace_to_prime(x);
            assert_eq!(f.trace(x), f.from_int(t as i64));
            hits[t as usize] += 1;
            for y in f.elements().step_by(7) {
                assert_eq!(f.trace_to_prime(f.add(x, y)), (t + f.trace_to_prime(y)) % p);
            }
            for c in 0..p {
                assert_eq!(f.trace_to_prime(f.mul(f.from_int(c as i64), x)), c * t % p);
            }
        }
        assert!(hits.iter().all(|&h| h == q / p as u64), "q = {q}: {hits:?}");
    }
}

#[test]
fn subfields_are_fixed_points_and_closed() {
    for (q, ms) in [(81u64, vec![1usize, 2, 4]), (729, vec![1, 2, 3, 6]), (625, vec![1, 2, 4])] {
        let f = Field::with_order(q).unwrap();
        let p = f.characteristic() as u64;
        for m in ms {
            let h = subfield_elements(&f, m).unwrap();
            let mut elems = h.elements();
            elems.sort();
            let fixed: Vec<Elem> = f.elements().filter(|&x| f.pow(x, p.pow(m as u32)) == x).collect();
            assert_eq!(elems, fixed, "q = {q}, m = {m}");
            let mask = h.membership();
            for &x in &elems {
                for &y in elems.iter().step_by(3) {
                    assert!(mask[f.add(x, y).index()]);
                    assert!(mask[f.mul(x, y).index()]);
                }
            }
        }
    }
}
