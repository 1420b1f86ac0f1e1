//! Small dense symmetric helpers shared by the spectral and SLC code.

use nalgebra::{DMatrix, SymmetricEigen};

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues after scaling `m` to unit max-abs entry. A zero matrix stays zero.
pub fn scaled_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let scale = m.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if scale == 0.0 {
        return vec![0.0; m.nrows()];
    }
    sym_eigenvalues(&(m / scale))
}

/// Count of eigenvalues strictly above `tol` after unit max-abs scaling.
pub fn positive_eigenvalue_count(m: &DMatrix<f64>, tol: f64) -> usize {
    scaled_eigenvalues(m).into_iter().filter(|&x| x > tol).count()
}
