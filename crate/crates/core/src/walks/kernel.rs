use std::fmt;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::rational::{self, Ratio};

use super::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkKind {
    UpDown,
    DownUp,
}

impl fmt::Display for WalkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WalkKind::UpDown => "up-down",
            WalkKind::DownUp => "down-up",
        })
    }
}

impl WalkKind {
    /// The constant `c` with `rho >= 1/c` for this walk at level `k`.
    pub fn mlsi_factor(self, k: usize) -> usize {
        match self {
            WalkKind::DownUp => k,
            WalkKind::UpDown => k + 1,
        }
    }
}

/// A row-stochastic matrix on a finite state space with its stationary
/// distribution, stored exactly.
#[derive(Debug, Clone)]
pub struct TransitionKernel {
    level: Option<usize>,
    walk: Option<WalkKind>,
    states: Vec<SubsetMask>,
    pi: Vec<Ratio>,
    pi_f64: Vec<f64>,
    matrix: SparseMatrix,
    reversible: bool,
}

impl TransitionKernel {
    /// Validates non-negativity, exact row sums and that `pi` is a
    /// distribution. Reversibility is recorded, not required.
    pub fn new(pi: Vec<Ratio>, matrix: SparseMatrix) -> Result<Self> {
        let n = pi.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidKernel(format!(
                "matrix is {}x{} but pi has {n} states",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if pi.iter().any(|p| *p < Ratio::zero()) || !rational::sum(&pi).is_one() {
            return Err(Error::InvalidDistribution("stationary vector is not a distribution".into()));
        }
        for i in 0..n {
            if matrix.row(i).iter().any(|(_, v)| *v < Ratio::zero()) {
                return Err(Error::InvalidKernel(format!("negative entry in row {i}")));
            }
            if !matrix.row_sum(i).is_one() {
                return Err(Error::InvalidKernel(format!("row {i} sums to {}", matrix.row_sum(i))));
            }
        }
        let reversible = (0..n).all(|i| {
            matrix.row(i).iter().all(|(j, p)| &pi[i] * p == &pi[*j] * matrix.get(*j, i))
        });
        let pi_f64 = pi.iter().map(rational::to_f64).collect();
        Ok(TransitionKernel {
            level: None,
            walk: None,
            states: Vec::new(),
            pi,
            pi_f64,
            matrix,
            reversible,
        })
    }

    pub(crate) fn with_labels(mut self, level: usize, walk: WalkKind, states: Vec<SubsetMask>) -> Self {
        self.level = Some(level);
        self.walk = Some(walk);
        self.states = states;
        self
    }

    pub fn level(&self) -> Option<usize> {
        self.level
    }

    pub fn walk(&self) -> Option<WalkKind> {
        self.walk
    }

    /// Subsets labelling the rows; empty for abstract chains.
    pub fn states(&self) -> &[SubsetMask] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn pi(&self) -> &[Ratio] {
        &self.pi
    }

    pub fn pi_f64(&self) -> &[f64] {
        &self.pi_f64
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> Ratio {
        self.matrix.get(i, j)
    }

    pub fn is_reversible(&self) -> bool {
        self.reversible
    }

    pub fn require_reversible(&self) -> Result<()> {
        if self.reversible {
            Ok(())
        } else {
            Err(Error::InvalidKernel("kernel is not reversible w.r.t. its stationary vector".into()))
        }
    }

    /// `pi^T P == pi^T`, exactly.
    pub fn is_stationary(&self) -> bool {
        let n = self.len();
        let mut acc = vec![Ratio::zero(); n];
        for i in 0..n {
            for (j, p) in self.matrix.row(i) {
                acc[*j] += &self.pi[i] * p;
            }
        }
        acc == self.pi
    }

    pub fn is_row_stochastic(&self) -> bool {
        (0..self.len()).all(|i| self.matrix.row_sum(i).is_one())
    }

    /// `P f`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        self.matrix.apply(f)
    }

    /// Distribution after one step from `tau`: `P^T tau`.
    pub fn evolve(&self, tau: &[f64]) -> Vec<f64> {
        self.matrix.apply_transpose(tau)
    }

    pub fn dense(&self) -> DMatrix<f64> {
        self.matrix.to_dense()
    }

    /// `D^{1/2} P D^{-1/2}`, symmetric when the kernel is reversible.
    pub fn symmetrized(&self) -> DMatrix<f64> {
        let n = self.len();
        let sq: Vec<f64> = self.pi_f64.iter().map(|p| p.sqrt()).collect();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for (j, p) in self.matrix.row_f64(i) {
                m[(i, *j)] = sq[i] * p / sq[*j];
            }
        }
        // remove rounding asymmetry
        (&m + m.transpose()) * 0.5
    }

    /// CSV of exact entries: `row,col,p_num,p_den`.
    pub fn to_rational_csv(&self) -> String {
        let mut out = String::from("row,col,p_num,p_den\n");
        for i in 0..self.len() {
            for (j, p) in self.matrix.row(i) {
                let _ = writeln!(out, "{i},{j},{},{}", p.numer(), p.denom());
            }
        }
        out
    }

    /// Dense `f64` CSV, one matrix row per line.
    pub fn to_dense_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.len() {
            let mut row = vec![0.0; self.len()];
            for (j, p) in self.matrix.row_f64(i) {
                row[*j] = *p;
            }
            let line: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn two_state_chain() {
        let m = SparseMatrix::from_rows(2, 2, vec![vec![(0, frac(1, 2)), (1, frac(1, 2))], vec![(0, frac(1, 2)), (1, frac(1, 2))]]);
        let k = TransitionKernel::new(vec![frac(1, 2), frac(1, 2)], m).unwrap();
        assert!(k.is_reversible() && k.is_stationary());
        assert_eq!(k.to_rational_csv(), "row,col,p_num,p_den\n0,0,1,2\n0,1,1,2\n1,0,1,2\n1,1,1,2\n");
        assert_eq!(k.to_dense_csv(), "0.5,0.5\n0.5,0.5\n");
    }

    #[test]
    fn rejects_non_stochastic() {
        let m = SparseMatrix::from_rows(2, 2, vec![vec![(0, int(1))], vec![(0, frac(1, 2))]]);
        assert!(matches!(TransitionKernel::new(vec![frac(1, 2), frac(1, 2)], m), Err(Error::InvalidKernel(_))));
    }

    #[test]
    fn flags_non_reversible() {
        // deterministic 3-cycle: uniform is stationary but detailed balance fails
        let m = SparseMatrix::from_rows(3, 3, vec![vec![(1, int(1))], vec![(2, int(1))], vec![(0, int(1))]]);
        let k = TransitionKernel::new(vec![frac(1, 3); 3], m).unwrap();
        assert!(k.is_stationary());
        assert!(!k.is_reversible());
        assert!(k.require_reversible().is_err());
    }
}
