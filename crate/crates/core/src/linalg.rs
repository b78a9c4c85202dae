//! Exact Gaussian elimination over the rationals.

use crate::graded::Scalar;

/// Row-reduces `matrix` in place and returns the pivot columns.
fn row_reduce(matrix: &mut [Vec<Scalar>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == matrix.len() {
            break;
        }
        let Some(p) = (row..matrix.len()).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(row, p);
        let inv = matrix[row][col].recip().expect("pivot is non-zero");
        for x in matrix[row].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = matrix[row].clone();
        for (r, other) in matrix.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for (x, p) in other.iter_mut().zip(&pivot_row) {
                *x -= &(&factor * p);
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// A basis of `{ v : matrix v = 0 }`, one vector per free column.
pub fn nullspace(mut matrix: Vec<Vec<Scalar>>, ncols: usize) -> Vec<Vec<Scalar>> {
    matrix.retain(|r| r.iter().any(|x| !x.is_zero()));
    let pivots = row_reduce(&mut matrix, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Scalar::zero(); ncols];
            v[f] = Scalar::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -&matrix[r][f];
            }
            v
        })
        .collect()
}

pub fn rank(mut matrix: Vec<Vec<Scalar>>, ncols: usize) -> usize {
    row_reduce(&mut matrix, ncols).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
            .collect()
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let ker = nullspace(a.clone(), 3);
        assert_eq!(ker.len(), 1);
        for row in &a {
            let dot: Scalar = row.iter().zip(&ker[0]).map(|(x, y)| x * y).sum();
            assert!(dot.is_zero());
        }
        assert_eq!(rank(a, 3), 2);
    }

    #[test]
    fn full_rank_has_trivial_kernel() {
        assert!(nullspace(m(&[&[1, 0], &[0, 1]]), 2).is_empty());
        assert_eq!(nullspace(Vec::new(), 2).len(), 2);
    }
}
