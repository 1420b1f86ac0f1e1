use nalgebra::{DVector, SymmetricEigen};

use crate::error::Result;
use crate::walks::TransitionKernel;

use super::functionals::{dirichlet_symmetric, variance};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGap {
    /// `1 - lambda_2` of the symmetrised kernel.
    pub gap: f64,
    /// `E(f,f) / Var(f)` at the second eigenvector mapped back to `L2(pi)`.
    pub variational_ratio: f64,
    /// Eigenvalues of the kernel, descending.
    pub eigenvalues: Vec<f64>,
    /// Single-state chains have no second eigenvalue; the gap is then 1.
    pub degenerate: bool,
}

/// Spectral gap of a reversible kernel via the symmetric matrix
/// `D^{1/2} P D^{-1/2}`.
pub fn spectral_gap(p: &TransitionKernel) -> Result<SpectralGap> {
    p.require_reversible()?;
    let n = p.len();
    if n < 2 {
        return Ok(SpectralGap { gap: 1.0, variational_ratio: f64::NAN, eigenvalues: vec![1.0; n], degenerate: true });
    }
    let eig = SymmetricEigen::new(p.symmetrized());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let second = order[1];
    let v: DVector<f64> = eig.eigenvectors.column(second).into_owned();
    let f: Vec<f64> = v.iter().zip(p.pi_f64()).map(|(x, pi)| x / pi.sqrt()).collect();
    let ratio = dirichlet_symmetric(p, &f, &f)? / variance(p.pi_f64(), &f);
    Ok(SpectralGap { gap: 1.0 - eigenvalues[1], variational_ratio: ratio, eigenvalues, degenerate: false })
}
