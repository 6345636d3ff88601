//! Exact Gaussian elimination over rationals.

use crate::rational::Q;
use num_traits::Zero;

/// Solves `A x = b` exactly, where `A` has one row per equation (possibly
/// more rows than unknowns). Returns `None` when the system is inconsistent
/// or does not determine a unique solution.
pub fn solve_unique(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let rows = a.len();
    assert_eq!(rows, b.len(), "matrix/rhs size mismatch");
    let cols = a.first().map_or(0, Vec::len);
    debug_assert!(a.iter().all(|r| r.len() == cols));

    let mut pivot_row_of_col = vec![usize::MAX; cols];
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        b.swap(rank, pivot);
        let inv = a[rank][col].recip();
        for value in a[rank].iter_mut().skip(col) {
            *value *= &inv;
        }
        b[rank] *= &inv;
        for row in 0..rows {
            if row != rank && !a[row][col].is_zero() {
                let factor = std::mem::replace(&mut a[row][col], Q::zero());
                for c in (col + 1)..cols {
                    let delta = &factor * &a[rank][c];
                    a[row][c] -= delta;
                }
                let delta = &factor * &b[rank];
                b[row] -= delta;
            }
        }
        pivot_row_of_col[col] = rank;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    // Inconsistent if any zero row has nonzero rhs.
    if b.iter().enumerate().any(|(r, v)| r >= rank && !v.is_zero()) {
        return None;
    }
    // Unique only at full column rank.
    if pivot_row_of_col.iter().any(|&r| r == usize::MAX) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (col, &row) in pivot_row_of_col.iter().enumerate() {
        x[col] = b[row].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn solves_2x2() {
        // x + y = 3, x - y = 1  =>  x = 2, y = 1
        let a = vec![vec![qi(1), qi(1)], vec![qi(1), qi(-1)]];
        let x = solve_unique(a, vec![qi(3), qi(1)]).unwrap();
        assert_eq!(x, vec![qi(2), qi(1)]);
    }

    #[test]
    fn consistent_overdetermined() {
        // x = 1/2 stated twice plus x + y = 1
        let a = vec![vec![qi(1), qi(0)], vec![qi(1), qi(0)], vec![qi(1), qi(1)]];
        let x = solve_unique(a, vec![q(1, 2), q(1, 2), qi(1)]).unwrap();
        assert_eq!(x, vec![q(1, 2), q(1, 2)]);
    }

    #[test]
    fn detects_inconsistency() {
        let a = vec![vec![qi(1)], vec![qi(1)]];
        assert!(solve_unique(a, vec![qi(0), qi(1)]).is_none());
    }

    #[test]
    fn detects_underdetermined() {
        let a = vec![vec![qi(1), qi(1)]];
        assert!(solve_unique(a, vec![qi(1)]).is_none());
    }
}
