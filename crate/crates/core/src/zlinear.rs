//! Integer solvability of `A x = b` by unimodular column reduction.

use crate::error::{Error, Result};

fn overflow() -> Error {
    Error::Precondition("integer overflow during elimination".into())
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    // returns (g, s, t) with s a + t b = g >= 0
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Replaces columns `p, c` of every row in `rows` by
/// `(s col_p + t col_c, u col_p + v col_c)`.
fn combine(rows: &mut [Vec<i128>], p: usize, c: usize, s: i128, t: i128, u: i128, v: i128) -> Result<()> {
    for row in rows.iter_mut() {
        let (x, y) = (row[p], row[c]);
        if x == 0 && y == 0 {
            continue;
        }
        let np = s.checked_mul(x).and_then(|a| t.checked_mul(y).and_then(|b| a.checked_add(b)));
        let nc = u.checked_mul(x).and_then(|a| v.checked_mul(y).and_then(|b| a.checked_add(b)));
        row[p] = np.ok_or_else(overflow)?;
        row[c] = nc.ok_or_else(overflow)?;
    }
    Ok(())
}

/// An integer solution of `a x = b`, or `None` when none exists.
pub fn solve_integer_system(a: &[Vec<i128>], b: &[i128], vars: usize) -> Result<Option<Vec<i128>>> {
    if a.len() != b.len() || a.iter().any(|row| row.len() != vars) {
        return Err(Error::Dimension("system shape".into()));
    }
    let mut rows: Vec<Vec<i128>> = a.to_vec();
    // columns of `basis` track the unimodular transform applied to the unknowns
    let mut basis: Vec<Vec<i128>> =
        (0..vars).map(|i| (0..vars).map(|j| i128::from(i == j)).collect()).collect();
    let mut pivots: Vec<Option<usize>> = vec![None; rows.len()];
    let mut p = 0;
    for i in 0..rows.len() {
        if p == vars {
            break;
        }
        for c in p + 1..vars {
            let (x, y) = (rows[i][p], rows[i][c]);
            if y == 0 {
                continue;
            }
            let (g, s, t) = ext_gcd(x, y);
            let (u, v) = (-y / g, x / g);
            combine(&mut rows, p, c, s, t, u, v)?;
            combine(&mut basis, p, c, s, t, u, v)?;
        }
        if rows[i][p] != 0 {
            pivots[i] = Some(p);
            p += 1;
        }
    }
    let mut z = vec![0i128; vars];
    for (i, row) in rows.iter().enumerate() {
        let mut residual = b[i];
        for (c, &coef) in row.iter().enumerate().take(p) {
            if pivots[i] == Some(c) {
                continue;
            }
            residual = coef
                .checked_mul(z[c])
                .and_then(|x| residual.checked_sub(x))
                .ok_or_else(overflow)?;
        }
        match pivots[i] {
            Some(c) => {
                if residual % row[c] != 0 {
                    return Ok(None);
                }
                z[c] = residual / row[c];
            }
            None => {
                if residual != 0 {
                    return Ok(None);
                }
            }
        }
    }
    let x = (0..vars)
        .map(|i| {
            basis[i].iter().zip(&z).try_fold(0i128, |acc, (&u, &zc)| {
                u.checked_mul(zc).and_then(|t| acc.checked_add(t))
            })
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(overflow)?;
    Ok(Some(x))
}
