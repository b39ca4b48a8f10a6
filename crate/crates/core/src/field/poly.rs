//! Dense polynomials over F_p, stored constant term first.

fn mulm(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

fn subm(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + (p - b)
    }
}

pub(crate) fn inv_mod_p(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    // Fermat: a^(p-2)
    let mut base = a % p;
    let mut e = p - 2;
    let mut acc = 1u32;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulm(acc, base, p);
        }
        base = mulm(base, base, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub(crate) fn degree(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

/// Product of two residues `a`, `b` (length n) modulo the monic `modulus` (length n + 1).
pub(crate) fn mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let n = modulus.len() - 1;
    let pp = p as u64;
    let mut prod = vec![0u64; 2 * n.max(1) - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai as u64 * bj as u64) % pp;
        }
    }
    for k in (n..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for j in 0..n {
            let t = c * modulus[j] as u64 % pp;
            prod[k - n + j] = (prod[k - n + j] + pp - t) % pp;
        }
    }
    prod.truncate(n);
    prod.resize(n, 0);
    prod.into_iter().map(|c| c as u32).collect()
}

pub(crate) fn pow_mod(a: &[u32], mut e: u64, modulus: &[u32], p: u32) -> Vec<u32> {
    let n = modulus.len() - 1;
    let mut acc = vec![0u32; n];
    acc[0] = 1;
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &base, modulus, p);
        }
        base = mul_mod(&base, &base, modulus, p);
        e >>= 1;
    }
    acc
}

/// Remainder of `a` by a nonzero `b`; the result is trimmed.
pub(crate) fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = inv_mod_p(b[db], p);
    let mut r = a.to_vec();
    trim(&mut r);
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = mulm(r[dr], lead_inv, p);
        let shift = dr - db;
        for (j, &bj) in b.iter().enumerate().take(db + 1) {
            r[shift + j] = subm(r[shift + j], mulm(c, bj, p), p);
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test: `f` (monic, degree n) is irreducible iff x^(p^n) = x mod f and
/// gcd(x^(p^(n/l)) - x, f) = 1 for every prime l dividing n.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    let mut x = vec![0u32; n];
    x[1] = 1;
    let frob_power = |k: usize| -> Vec<u32> {
        let mut acc = x.clone();
        for _ in 0..k {
            acc = pow_mod(&acc, p as u64, f, p);
        }
        acc
    };
    if frob_power(n) != x {
        return false;
    }
    for l in prime_factors(n) {
        let mut h = frob_power(n / l);
        h[1] = subm(h[1], 1, p);
        let g = gcd(f, &h, p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_mod_matches_hand_reduction() {
        // (2 + 3x)(1 + x) = 2 + 5x + 3x^2 with x^2 = 3 over F_17 -> 11 + 5x
        let m = [14, 0, 1];
        assert_eq!(mul_mod(&[2, 3], &[1, 1], &m, 17), vec![11, 5]);
    }

    #[test]
    fn rabin_rejects_product_of_coprime_degree_factors() {
        // (x^2 + 1)(x^3 + 2x + 1)(x) over F_3 has factors of degrees 2, 3, 1; it
        // divides x^(3^6) - x but is reducible.
        let a = [1u32, 0, 1];
        let b = [1u32, 2, 0, 1];
        let mut ab = vec![0u32; 6];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                ab[i + j] = (ab[i + j] + ai * bj) % 3;
            }
        }
        let mut f = vec![0u32];
        f.extend(ab);
        assert_eq!(f.len(), 7);
        assert!(!is_irreducible(&f, 3));
        assert!(is_irreducible(&b, 3));
        assert!(is_irreducible(&a, 3));
    }

    #[test]
    fn gcd_of_coprime_is_constant() {
        let g = gcd(&[1, 0, 1], &[0, 1], 3);
        assert_eq!(degree(&g), Some(0));
    }
}
