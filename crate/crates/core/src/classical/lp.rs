//! Dense simplex over exact rationals for small packing LPs.

use num_rational::Rational64;
use num_traits::{One, Zero};

/// Solves `max c.x` subject to `A x <= b`, `x >= 0`, with `b >= 0` so the slack basis is
/// feasible. Bland's rule guarantees termination. Returns `None` if unbounded.
pub(crate) fn maximize(
    c: &[Rational64],
    a: &[Vec<Rational64>],
    b: &[Rational64],
) -> Option<(Rational64, Vec<Rational64>)> {
    let n = c.len();
    let rows = a.len();
    debug_assert!(b.iter().all(|v| *v >= Rational64::zero()));
    let width = n + rows + 1;

    let mut tab: Vec<Vec<Rational64>> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, rhs))| {
            let mut t = vec![Rational64::zero(); width];
            t[..n].copy_from_slice(row);
            t[n + i] = Rational64::one();
            t[width - 1] = *rhs;
            t
        })
        .collect();
    let mut obj = vec![Rational64::zero(); width];
    for (o, cj) in obj.iter_mut().zip(c) {
        *o = -*cj;
    }
    let mut basis: Vec<usize> = (n..n + rows).collect();

    while let Some(enter) = (0..width - 1).find(|&j| obj[j] < Rational64::zero()) {
        let mut leave: Option<(usize, Rational64)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[enter] > Rational64::zero() {
                let ratio = row[width - 1] / row[enter];
                let better = match leave {
                    None => true,
                    Some((li, lr)) => ratio < lr || (ratio == lr && basis[i] < basis[li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (pivot_row, _) = leave?;
        pivot(&mut tab, &mut obj, pivot_row, enter);
        basis[pivot_row] = enter;
    }

    let mut x = vec![Rational64::zero(); n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = tab[i][width - 1];
        }
    }
    Some((obj[width - 1], x))
}

fn pivot(tab: &mut [Vec<Rational64>], obj: &mut [Rational64], r: usize, col: usize) {
    let p = tab[r][col];
    for v in tab[r].iter_mut() {
        *v /= p;
    }
    let pivot_row = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i != r && !row[col].is_zero() {
            let k = row[col];
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= k * pv;
            }
        }
    }
    if !obj[col].is_zero() {
        let k = obj[col];
        for (v, pv) in obj.iter_mut().zip(&pivot_row) {
            *v -= k * pv;
        }
    }
}
