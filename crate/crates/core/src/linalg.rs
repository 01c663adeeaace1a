//! Small dense-matrix diagnostics used by the criterion checks.

use nalgebra::{DMatrix, SymmetricEigen};

/// Max `|M[i][j] - M[i+1][j+1]|` with indices taken mod n; zero for a circulant.
pub fn circulant_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] - m[((i + 1) % n, (j + 1) % n)]).abs());
        }
    }
    worst
}

/// Max `|M - M^T|`.
pub fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

/// Max `|M + M^T|`.
pub fn antisymmetry_defect(m: &DMatrix<f64>) -> f64 {
    (m + m.transpose()).amax()
}

/// Determinants of the k x k upper-left blocks, k = 1..=n.
pub fn leading_principal_minors(m: &DMatrix<f64>) -> Vec<f64> {
    (1..=m.nrows())
        .map(|k| m.view((0, 0), (k, k)).clone_owned().determinant())
        .collect()
}

/// Sylvester's test: every leading principal minor strictly positive.
pub fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    leading_principal_minors(m).iter().all(|&d| d > 0.0)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circulant_detection() {
        let c = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 3.0, 1.0, 2.0, 2.0, 3.0, 1.0]);
        assert_eq!(circulant_defect(&c), 0.0);
        let mut d = c.clone();
        d[(1, 2)] = 2.5;
        assert_eq!(circulant_defect(&d), 0.5);
    }

    #[test]
    fn sylvester_agrees_with_cholesky_and_eigenvalues() {
        let pd = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        assert!(is_positive_definite(&pd));
        assert!(pd.clone().cholesky().is_some());
        assert!(min_eigenvalue(&pd) > 0.0);

        // zero diagonal, positive off-diagonal: trace zero, so indefinite
        let hollow = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 2.0, 3.0, 0.0]);
        assert!(!is_positive_definite(&hollow));
        assert!(hollow.clone().cholesky().is_none());
        assert!(min_eigenvalue(&hollow) < 0.0);
        assert_eq!(leading_principal_minors(&hollow)[0], 0.0);
    }

    #[test]
    fn symmetry_defects() {
        let s = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert_eq!(symmetry_defect(&s), 0.0);
        assert_eq!(antisymmetry_defect(&a), 0.0);
        assert_eq!(antisymmetry_defect(&s), 2.0);
    }
}
