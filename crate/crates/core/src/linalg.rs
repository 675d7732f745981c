//! Exact rational linear algebra, just enough for multiplier extraction and
//! independence ranks.

use crate::expr::{int, Coeff};
use num_traits::Zero;

/// Rank of a dense rational matrix by Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<Coeff>>) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0;
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(r) = (pivot_row..nrows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let pivot = rows[pivot_row][col].clone();
        for r in 0..nrows {
            if r != pivot_row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone() / pivot.clone();
                for c in col..ncols {
                    let delta = factor.clone() * rows[pivot_row][c].clone();
                    rows[r][c] = rows[r][c].clone() - delta;
                }
            }
        }
        rank += 1;
        pivot_row += 1;
        if pivot_row == nrows {
            break;
        }
    }
    rank
}

/// Solve A·x = b exactly. Returns one solution if the system is consistent
/// (free variables are set to zero), `None` otherwise.
pub fn solve(a: &[Vec<Coeff>], b: &[Coeff]) -> Option<Vec<Coeff>> {
    let nrows = a.len();
    let ncols = if nrows > 0 { a[0].len() } else { 0 };
    let mut m: Vec<Vec<Coeff>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(r) = (pivot_row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, r);
        let pivot = m[pivot_row][col].clone();
        for c in col..=ncols {
            m[pivot_row][c] = m[pivot_row][c].clone() / pivot.clone();
        }
        for r in 0..nrows {
            if r != pivot_row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=ncols {
                    let delta = factor.clone() * m[pivot_row][c].clone();
                    m[r][c] = m[r][c].clone() - delta;
                }
            }
        }
        pivots.push((pivot_row, col));
        pivot_row += 1;
        if pivot_row == nrows {
            break;
        }
    }

    // inconsistent if a zero row has nonzero rhs
    for r in pivot_row..nrows {
        if !m[r][ncols].is_zero() {
            return None;
        }
    }

    let mut x = vec![int(0); ncols];
    for (r, c) in pivots {
        x[c] = m[r][ncols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    #[test]
    fn rank_of_identity_block() {
        let rows = vec![
            vec![int(1), int(0), int(2)],
            vec![int(0), int(1), int(3)],
            vec![int(1), int(1), int(5)],
        ];
        assert_eq!(rank(rows), 2);
    }

    #[test]
    fn solve_small_system() {
        // x + y = 3, x - y = 1  ->  x = 2, y = 1
        let a = vec![vec![int(1), int(1)], vec![int(1), int(-1)]];
        let b = vec![int(3), int(1)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(x, vec![int(2), int(1)]);
    }

    #[test]
    fn solve_detects_inconsistency() {
        let a = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        let b = vec![int(1), int(3)];
        assert!(solve(&a, &b).is_none());
        let b2 = vec![rat(1, 2), int(1)];
        assert!(solve(&a, &b2).is_some());
    }
}
