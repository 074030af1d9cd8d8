//! Small dense matrix kernels shared by the geometry and projection code.
//!
//! Everything here operates on row-major `Vec<Vec<f64>>` matrices of side at
//! most `n - 1`, so plain loops beat any clever representation.

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
/// Returns `None` when a pivot drops below `tol` (the matrix is not
/// numerically positive definite).
pub(crate) fn cholesky(a: &[Vec<f64>], tol: f64) -> Option<Vec<Vec<f64>>> {
    let k = a.len();
    let mut l = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let mut sum = a[i][j];
            for p in 0..j {
                sum -= l[i][p] * l[j][p];
            }
            if i == j {
                if sum <= tol {
                    return None;
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Some(l)
}

/// Solve `L Lᵀ x = b` given the Cholesky factor `L`.
pub(crate) fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let k = l.len();
    let mut y = vec![0.0; k];
    for i in 0..k {
        let mut sum = b[i];
        for p in 0..i {
            sum -= l[i][p] * y[p];
        }
        y[i] = sum / l[i][i];
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut sum = y[i];
        for p in i + 1..k {
            sum -= l[p][i] * x[p];
        }
        x[i] = sum / l[i][i];
    }
    x
}

/// Determinant by LU decomposition with partial pivoting. Works for any
/// square matrix (the Cramer columns are not symmetric).
pub(crate) fn determinant(a: &[Vec<f64>]) -> f64 {
    let k = a.len();
    if k == 0 {
        return 1.0;
    }
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut det = 1.0;
    for col in 0..k {
        let mut pivot = col;
        for row in col + 1..k {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..k {
            let factor = m[row][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            for j in col..k {
                m[row][j] -= factor * m[col][j];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cholesky_solves_spd_system() {
        let a = vec![vec![2.0 / 3.0, -1.0 / 3.0], vec![-1.0 / 3.0, 2.0 / 3.0]];
        let l = cholesky(&a, 1e-12).unwrap();
        let x = cholesky_solve(&l, &[0.2, 0.1]);
        assert_abs_diff_eq!(x[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(x[1], 0.4, epsilon = 1e-12);
    }

    #[test]
    fn cholesky_rejects_singular() {
        let a = vec![vec![2.0 / 3.0, -2.0 / 3.0], vec![-2.0 / 3.0, 2.0 / 3.0]];
        assert!(cholesky(&a, 1e-12).is_none());
    }

    #[test]
    fn determinant_values() {
        assert_abs_diff_eq!(determinant(&[]), 1.0);
        let a = vec![vec![2.0 / 3.0, -1.0 / 3.0], vec![-1.0 / 3.0, 2.0 / 3.0]];
        assert_abs_diff_eq!(determinant(&a), 1.0 / 3.0, epsilon = 1e-12);
        let b = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert_abs_diff_eq!(determinant(&b), 0.0, epsilon = 1e-12);
        let c = vec![
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ];
        assert_abs_diff_eq!(determinant(&c), -3.0, epsilon = 1e-12);
    }

}
