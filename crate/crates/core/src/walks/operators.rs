use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::matroid::WeightedComplex;
use crate::rational::{int, Ratio};

use super::{SparseMatrix, TransitionKernel, WalkKind};

/// A map from functions on `target` level to functions on `source` level.
/// Rows are indexed by `M(source)`, columns by `M(target)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RectangularOperator {
    pub source: usize,
    pub target: usize,
    pub matrix: SparseMatrix,
}

impl RectangularOperator {
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        self.matrix.apply(f)
    }
}

/// Up operator from `M(k)` to `M(k+1)`: entry `(I, J) = w(J) / w(I)` for `I ⊂ J`.
pub fn up_operator(wc: &WeightedComplex, k: usize) -> Result<RectangularOperator> {
    if k >= wc.rank() {
        return Err(Error::InvalidArgument(format!("up operator needs k <= r-1, got k={k}, r={}", wc.rank())));
    }
    let n = wc.ground_size();
    let rows = wc
        .level(k)
        .iter()
        .zip(wc.level_weights(k))
        .map(|(&set, w)| {
            (0..n)
                .filter(|&e| !set.contains(e))
                .filter_map(|e| wc.index_of(set.with(e)).map(|j| (j, &wc.level_weights(k + 1)[j] / w)))
                .collect()
        })
        .collect();
    Ok(RectangularOperator {
        source: k,
        target: k + 1,
        matrix: SparseMatrix::from_rows(wc.level(k).len(), wc.level(k + 1).len(), rows),
    })
}

/// Down operator from `M(k)` to `M(k-1)`: entry `(J, I) = 1/k` for `I ⊂ J`.
pub fn down_operator(wc: &WeightedComplex, k: usize) -> Result<RectangularOperator> {
    if k == 0 || k > wc.rank() {
        return Err(Error::InvalidArgument(format!("down operator needs 1 <= k <= r, got k={k}")));
    }
    let inv = Ratio::new(1.into(), k.into());
    let rows = wc
        .level(k)
        .iter()
        .map(|&set| {
            set.elements()
                .map(|e| (wc.index_of(set.without(e)).expect("downward closed"), inv.clone()))
                .collect()
        })
        .collect();
    Ok(RectangularOperator {
        source: k,
        target: k - 1,
        matrix: SparseMatrix::from_rows(wc.level(k).len(), wc.level(k - 1).len(), rows),
    })
}

fn stationary(wc: &WeightedComplex, k: usize) -> Vec<Ratio> {
    wc.level_weights(k).iter().map(|w| w / wc.z(k)).collect()
}

/// Up-down walk on `M(k)`, `1 <= k <= r-1`, built entrywise.
pub fn up_down_walk(wc: &WeightedComplex, k: usize) -> Result<TransitionKernel> {
    if k == 0 || k + 1 > wc.rank() {
        return Err(Error::InvalidArgument(format!(
            "up-down walk defined for 1 <= k <= r-1, got k={k}, r={}",
            wc.rank()
        )));
    }
    let n = wc.ground_size();
    let kp1 = int(k as i64 + 1);
    let diag = Ratio::one() / &kp1;
    let rows = crate::par::map_slice(wc.level(k), |&set| {
        let i = wc.index_of(set).unwrap();
        let wi = &wc.level_weights(k)[i];
        let mut row = vec![(i, diag.clone())];
        for e in (0..n).filter(|&e| !set.contains(e)) {
            let up = set.with(e);
            let w_up = wc.weight(up);
            if w_up.is_zero() {
                continue;
            }
            let p = &w_up / (&kp1 * wi);
            for x in set.elements() {
                let j = wc.index_of(up.without(x)).expect("downward closed");
                row.push((j, p.clone()));
            }
        }
        row
    });
    let m = SparseMatrix::from_rows(wc.level(k).len(), wc.level(k).len(), rows);
    Ok(TransitionKernel::new(stationary(wc, k), m)?.with_labels(k, WalkKind::UpDown, wc.level(k).to_vec()))
}

/// Down-up walk on `M(k)`, `2 <= k <= r`, built entrywise. The holding
/// probability comes from its own closed form rather than from complementing
/// the row, so a weight-table error shows up as a non-stochastic row.
pub fn down_up_walk(wc: &WeightedComplex, k: usize) -> Result<TransitionKernel> {
    if k < 2 || k > wc.rank() {
        return Err(Error::InvalidArgument(format!(
            "down-up walk defined for 2 <= k <= r, got k={k}, r={}",
            wc.rank()
        )));
    }
    let n = wc.ground_size();
    let kk = int(k as i64);
    let rows = crate::par::map_slice(wc.level(k), |&set| {
        let i = wc.index_of(set).unwrap();
        let wi = &wc.level_weights(k)[i];
        let mut diag = Ratio::zero();
        let mut row = Vec::new();
        for x in set.elements() {
            let down = set.without(x);
            let w_down = wc.weight(down);
            diag += wi / (&kk * &w_down);
            for e in (0..n).filter(|&e| !set.contains(e)) {
                let other = down.with(e);
                if let Some(j) = wc.index_of(other) {
                    row.push((j, &wc.level_weights(k)[j] / (&kk * &w_down)));
                }
            }
        }
        row.push((i, diag));
        row
    });
    let m = SparseMatrix::from_rows(wc.level(k).len(), wc.level(k).len(), rows);
    Ok(TransitionKernel::new(stationary(wc, k), m)?.with_labels(k, WalkKind::DownUp, wc.level(k).to_vec()))
}

/// The bases-exchange walk, i.e. the down-up walk at the top level.
pub fn bases_exchange(wc: &WeightedComplex) -> Result<TransitionKernel> {
    down_up_walk(wc, wc.rank())
}

pub fn walk(wc: &WeightedComplex, kind: WalkKind, k: usize) -> Result<TransitionKernel> {
    match kind {
        WalkKind::UpDown => up_down_walk(wc, k),
        WalkKind::DownUp => down_up_walk(wc, k),
    }
}

/// `P_up(k) * P_down(k+1)` as a matrix product.
pub fn up_down_by_composition(wc: &WeightedComplex, k: usize) -> Result<SparseMatrix> {
    Ok(up_operator(wc, k)?.matrix.mul(&down_operator(wc, k + 1)?.matrix))
}

/// `P_down(k) * P_up(k-1)` as a matrix product.
pub fn down_up_by_composition(wc: &WeightedComplex, k: usize) -> Result<SparseMatrix> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    Ok(down_operator(wc, k)?.matrix.mul(&up_operator(wc, k - 1)?.matrix))
}

/// `D_{k+1} P_down(k+1) == P_up(k)^T D_k`, exactly.
pub fn adjoint_identity_holds(wc: &WeightedComplex, k: usize) -> Result<bool> {
    let up = up_operator(wc, k)?;
    let down = down_operator(wc, k + 1)?;
    let d_k = stationary(wc, k);
    let d_k1 = stationary(wc, k + 1);
    let ones_k: Vec<Ratio> = vec![Ratio::one(); wc.level(k).len()];
    let ones_k1: Vec<Ratio> = vec![Ratio::one(); wc.level(k + 1).len()];
    let lhs = down.matrix.diag_scale(&d_k1, &ones_k);
    let rhs = up.matrix.transpose().diag_scale(&ones_k1, &d_k);
    Ok(lhs == rhs)
}

/// Right-hand side of the link decomposition of the up-down walk,
/// `(2/(k+1)) * sum_K (I_{S_K} - P_{K,1})` over `K` in `M(k-1)`, where
/// `P_{K,1}` is the lazy walk on the link of `K` extended to `M(k)`.
pub fn up_down_link_decomposition(wc: &WeightedComplex, k: usize) -> Result<SparseMatrix> {
    if k == 0 || k + 1 > wc.rank() {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= r-1, got {k}")));
    }
    let n = wc.ground_size();
    let size = wc.level(k).len();
    let half = Ratio::new(1.into(), 2.into());
    let mut rows: Vec<Vec<(usize, Ratio)>> = vec![Vec::new(); size];
    for &link in wc.level(k - 1) {
        let support: Vec<SubsetMask> =
            (0..n).filter(|&e| !link.contains(e)).map(|e| link.with(e)).filter(|s| wc.index_of(*s).is_some()).collect();
        for &a in &support {
            let i = wc.index_of(a).unwrap();
            let wa = wc.weight(a);
            // (I_S - P_{K,1})(a, a) = 1 - 1/2
            rows[i].push((i, half.clone()));
            for &b in &support {
                if a == b {
                    continue;
                }
                let wab = wc.weight(a.union(b));
                if !wab.is_zero() {
                    let j = wc.index_of(b).unwrap();
                    rows[i].push((j, -(wab / (int(2) * &wa))));
                }
            }
        }
    }
    let scale = int(2) / int(k as i64 + 1);
    Ok(SparseMatrix::from_rows(size, size, rows).scale(&scale))
}
