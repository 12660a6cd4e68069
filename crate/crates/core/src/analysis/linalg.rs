//! Dense Gaussian elimination over a [`Scalar`] field.

use crate::scalar::Scalar;

/// Solves `A X = B` for square `A`; `None` if `A` is singular.
pub fn solve_multi<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<Vec<T>>) -> Option<Vec<Vec<T>>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_negligible())
            .max_by(|&x, &y| {
                a[x][col]
                    .abs()
                    .partial_cmp(&a[y][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = T::one() / a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone() * inv.clone();
            for c in col..n {
                let delta = factor.clone() * a[col][c].clone();
                a[r][c] = a[r][c].clone() - delta;
            }
            for c in 0..b[r].len() {
                let delta = factor.clone() * b[col][c].clone();
                b[r][c] = b[r][c].clone() - delta;
            }
        }
    }
    Some(
        b.into_iter()
            .zip(a)
            .enumerate()
            .map(|(i, (row, arow))| row.into_iter().map(|x| x / arow[i].clone()).collect())
            .collect(),
    )
}

pub fn solve<T: Scalar>(a: Vec<Vec<T>>, b: Vec<T>) -> Option<Vec<T>> {
    let b = b.into_iter().map(|x| vec![x]).collect();
    solve_multi(a, b).map(|x| x.into_iter().map(|mut r| r.remove(0)).collect())
}
