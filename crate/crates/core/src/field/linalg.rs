//! Gaussian elimination over F_p on row vectors.

use super::poly::inv_mod_p;

/// Reduces `rows` to reduced row echelon form in place, dropping zero rows.
/// Returns the pivot column of each remaining row.
pub(crate) fn rref(rows: &mut Vec<Vec<u32>>, p: u32) -> Vec<usize> {
    let pp = p as u64;
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(found) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = inv_mod_p(rows[r][c], p) as u64;
        for v in rows[r].iter_mut() {
            *v = (*v as u64 * inv % pp) as u32;
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c] == 0 {
                continue;
            }
            let f = rows[i][c] as u64;
            let pivot = rows[r].clone();
            for (x, &y) in rows[i].iter_mut().zip(&pivot).take(cols) {
                let t = f * y as u64 % pp;
                *x = ((*x as u64 + pp - t) % pp) as u32;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub(crate) fn rank(rows: &[Vec<u32>], p: u32) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, p).len()
}

/// Basis of {c : M c = 0} where `matrix` has `cols` columns, returned in
/// reduced row echelon form.
pub(crate) fn null_space(matrix: &[Vec<u32>], cols: usize, p: u32) -> Vec<Vec<u32>> {
    let mut m = matrix.to_vec();
    let pivots = rref(&mut m, p);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u32; cols];
        v[free] = 1;
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = (p - row[free]) % p;
        }
        basis.push(v);
    }
    rref(&mut basis, p);
    basis
}
