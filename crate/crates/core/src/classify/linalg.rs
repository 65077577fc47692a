//! Exact Gaussian elimination over the rationals.

use num_traits::Zero;

use crate::poly::Rat;

/// One solution of `matrix * x = rhs`, with free variables set to zero, or
/// `None` when the system is inconsistent.
pub(crate) fn solve(mut matrix: Vec<Vec<Rat>>, mut rhs: Vec<Rat>) -> Option<Vec<Rat>> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !matrix[i][c].is_zero()) else {
            continue;
        };
        matrix.swap(r, pr);
        rhs.swap(r, pr);
        let inv = matrix[r][c].recip();
        for v in matrix[r].iter_mut() {
            *v *= &inv;
        }
        rhs[r] *= &inv;
        for i in 0..rows {
            if i != r && !matrix[i][c].is_zero() {
                let factor = matrix[i][c].clone();
                let (pivot_row, pivot_rhs) = (matrix[r].clone(), rhs[r].clone());
                for (v, p) in matrix[i].iter_mut().zip(&pivot_row) {
                    *v -= &factor * p;
                }
                rhs[i] -= &factor * &pivot_rhs;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rhs[r..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rhs[i].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect()
    }

    #[test]
    fn square_and_underdetermined() {
        let x = solve(m(&[&[2, 1], &[1, 3]]), vec![rat(5), rat(10)]).unwrap();
        assert_eq!(x, vec![rat(1), rat(3)]);
        let x = solve(m(&[&[1, 1, 0]]), vec![rat(4)]).unwrap();
        assert_eq!(x, vec![rat(4), rat(0), rat(0)]);
    }

    #[test]
    fn inconsistent() {
        assert_eq!(solve(m(&[&[1, 1], &[2, 2]]), vec![rat(1), rat(3)]), None);
        assert_eq!(solve(m(&[&[0], &[0]]), vec![rat(0), rat(1)]), None);
    }
}
