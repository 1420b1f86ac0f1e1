use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::scaled_eigenvalues;
use crate::mask::SubsetMask;
use crate::matroid::WeightedComplex;
use crate::par;
use crate::rational::{self, factorial, Ratio};

use super::distribution::{theta_family, monomial, BooleanDistribution, GeneratingPolynomial};

/// Eigenvalues above this, after unit max-abs scaling, count as positive.
pub const EIGEN_TOL: f64 = 1e-9;

/// Value, gradient and Hessian of `d_I g` at a point, over the coordinates
/// outside `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialHessian {
    pub base: SubsetMask,
    pub elements: Vec<usize>,
    pub value: Ratio,
    pub gradient: Vec<Ratio>,
    pub entries: Vec<Vec<Ratio>>,
    /// `d_I g` is identically zero or has degree below 2.
    pub degenerate: bool,
}

impl PartialHessian {
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        let m = self.elements.len();
        DMatrix::from_fn(m, m, |i, j| rational::to_f64(&self.entries[i][j]))
    }

    /// `H/p - g g^T / p^2`, the Hessian of `log d_I g`.
    pub fn log_hessian(&self) -> Option<DMatrix<f64>> {
        if self.value <= Ratio::zero() {
            return None;
        }
        let m = self.elements.len();
        let p = &self.value;
        let p2 = p * p;
        Some(DMatrix::from_fn(m, m, |i, j| {
            rational::to_f64(&(&self.entries[i][j] / p - &self.gradient[i] * &self.gradient[j] / &p2))
        }))
    }
}

/// Hessian of `d_I g` at `point` (the all-ones point when `None`).
pub fn partial_derivative_hessian(
    g: &GeneratingPolynomial,
    base: SubsetMask,
    point: Option<&[Ratio]>,
) -> Result<PartialHessian> {
    let n = g.n();
    let ones = vec![Ratio::one(); n];
    let x = match point {
        Some(p) if p.len() != n => {
            return Err(Error::InvalidArgument(format!("point has {} coordinates, need {n}", p.len())));
        }
        Some(p) => p,
        None => &ones[..],
    };
    let d = g.partial(base);
    let elements: Vec<usize> = (0..n).filter(|&e| !base.contains(e)).collect();
    let m = elements.len();
    let mut gradient = vec![Ratio::zero(); m];
    let mut entries = vec![vec![Ratio::zero(); m]; m];
    let pos: Vec<Option<usize>> = {
        let mut v = vec![None; n];
        for (i, &e) in elements.iter().enumerate() {
            v[e] = Some(i);
        }
        v
    };
    let mut value = Ratio::zero();
    let mut max_degree = 0;
    for (s, c) in d.terms() {
        max_degree = max_degree.max(s.len());
        value += c * monomial(*s, x);
        let elems: Vec<usize> = s.elements().collect();
        for (a, &u) in elems.iter().enumerate() {
            let iu = pos[u].expect("terms of d_I g avoid I");
            gradient[iu] += c * monomial(s.without(u), x);
            for &v in &elems[a + 1..] {
                let iv = pos[v].expect("terms of d_I g avoid I");
                let t = c * monomial(s.without(u).without(v), x);
                entries[iu][iv] += &t;
                entries[iv][iu] += t;
            }
        }
    }
    Ok(PartialHessian { base, elements, value, gradient, entries, degenerate: d.is_zero() || max_degree < 2 })
}

/// `W_I = (r - |I| - 2)! Z_r * Hessian(d_I g)(1)` for the basis
/// distribution of `wc`, in exact arithmetic.
pub fn hessian_matches_pair_weights(wc: &WeightedComplex, base: SubsetMask) -> Result<bool> {
    let w = wc.pair_weight_matrix(base)?;
    let g = GeneratingPolynomial::new(&BooleanDistribution::from_complex(wc));
    let h = partial_derivative_hessian(&g, base, None)?;
    let scale = factorial(wc.rank() - base.len() - 2) * wc.z(wc.rank());
    Ok(h.elements == w.elements
        && h.entries.iter().zip(&w.entries).all(|(hr, wr)| hr.iter().zip(wr).all(|(a, b)| a * &scale == *b)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlcEntry {
    pub base: SubsetMask,
    pub positive_eigenvalues: usize,
    /// Largest eigenvalue of the scaled log-Hessian.
    pub log_hessian_max: f64,
    pub one_positive: bool,
    pub log_concave: bool,
}

impl SlcEntry {
    pub fn agree(&self) -> bool {
        self.one_positive == self.log_concave
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlcReport {
    pub degree: usize,
    pub entries: Vec<SlcEntry>,
    pub passed: bool,
    /// Some entry where the two criteria disagree.
    pub numerical_warning: bool,
    pub first_failure: Option<SubsetMask>,
}

/// Strong log-concavity at the all-ones point: for every `I` with `d_I g`
/// non-zero of degree at least 2, the Hessian has at most one positive
/// eigenvalue, and the log-Hessian is negative semi-definite. `d_I g` of
/// degree 0 or 1 is log-concave and is not listed.
pub fn slc_check(mu: &BooleanDistribution) -> Result<SlcReport> {
    let degree = mu
        .homogeneous_degree()
        .ok_or_else(|| Error::Unsupported("strong log-concavity is checked for homogeneous distributions only".into()))?;
    let g = GeneratingPolynomial::new(mu);
    let mut bases = BTreeSet::new();
    if degree >= 2 {
        for s in mu.support() {
            // all subsets of s with |I| <= degree - 2
            let elems: Vec<usize> = s.elements().collect();
            for bits in 0u32..(1 << elems.len()) {
                if bits.count_ones() as usize <= degree - 2 {
                    bases.insert(SubsetMask::from_elements(
                        elems.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, e)| *e),
                    ));
                }
            }
        }
    }
    let bases: Vec<SubsetMask> = bases.into_iter().collect();
    let entries: Vec<SlcEntry> = par::map_slice(&bases, |&base| {
        let h = partial_derivative_hessian(&g, base, None).expect("all-ones point has the right length");
        let positive_eigenvalues = scaled_eigenvalues(&h.to_dmatrix()).into_iter().filter(|&x| x > EIGEN_TOL).count();
        let log_hessian_max = h
            .log_hessian()
            .map(|l| scaled_eigenvalues(&l).into_iter().fold(f64::NEG_INFINITY, f64::max))
            .unwrap_or(f64::NAN);
        SlcEntry {
            base,
            positive_eigenvalues,
            log_hessian_max,
            one_positive: positive_eigenvalues <= 1,
            log_concave: log_hessian_max <= EIGEN_TOL,
        }
    });
    let first_failure = entries.iter().find(|e| !e.one_positive).map(|e| e.base);
    Ok(SlcReport {
        degree,
        numerical_warning: entries.iter().any(|e| !e.agree()),
        passed: first_failure.is_none(),
        first_failure,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SrpViolation {
    pub i: usize,
    pub j: usize,
    pub x: Vec<f64>,
    /// `d_i g * d_j g`.
    pub lhs: f64,
    /// `g * d_i d_j g`.
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SrpReport {
    pub points_checked: usize,
    pub violation: Option<SrpViolation>,
}

impl SrpReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

const GRID_VALUES: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
const GRID_MAX_POINTS: usize = 100_000;

/// Samples `d_i g(x) d_j g(x) >= g(x) d_i d_j g(x)` for a quadratic
/// multiaffine `g` at `trials` standard normal points, then on a fixed grid
/// when it is small enough. Stops at the first violation.
pub fn srp_quadratic_check<R: Rng + ?Sized>(mu: &BooleanDistribution, trials: usize, rng: &mut R) -> Result<SrpReport> {
    if mu.homogeneous_degree() != Some(2) {
        return Err(Error::Unsupported("the quadratic test needs every support set of size 2".into()));
    }
    let n = mu.n();
    let mut a = vec![vec![0.0; n]; n];
    for (s, m) in mu.mass() {
        let e: Vec<usize> = s.elements().collect();
        let v = rational::to_f64(m);
        a[e[0]][e[1]] = v;
        a[e[1]][e[0]] = v;
    }
    let test = |x: &[f64]| -> Option<SrpViolation> {
        let grad: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * x[j]).sum()).collect();
        let g: f64 = 0.5 * (0..n).map(|i| x[i] * grad[i]).sum::<f64>();
        for i in 0..n {
            for j in (i + 1)..n {
                let lhs = grad[i] * grad[j];
                let rhs = g * a[i][j];
                if lhs < rhs - 1e-12 * (lhs.abs() + rhs.abs()) {
                    return Some(SrpViolation { i, j, x: x.to_vec(), lhs, rhs });
                }
            }
        }
        None
    };
    let mut checked = 0;
    for _ in 0..trials {
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        checked += 1;
        if let Some(v) = test(&x) {
            return Ok(SrpReport { points_checked: checked, violation: Some(v) });
        }
    }
    let grid_points = GRID_VALUES.len().checked_pow(n as u32).filter(|&p| p <= GRID_MAX_POINTS);
    if let Some(points) = grid_points {
        let mut x = vec![0.0; n];
        for mut idx in 0..points {
            for xi in x.iter_mut() {
                *xi = GRID_VALUES[idx % GRID_VALUES.len()];
                idx /= GRID_VALUES.len();
            }
            checked += 1;
            if let Some(v) = test(&x) {
                return Ok(SrpReport { points_checked: checked, violation: Some(v) });
            }
        }
    }
    Ok(SrpReport { points_checked: checked, violation: None })
}

/// Bisects `theta` in `[lo, hi]` for the change of the SLC verdict of the
/// theta family; the verdicts at the two ends must differ.
pub fn theta_threshold(lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let verdict = |t: f64| -> Result<bool> { Ok(slc_check(&theta_family(&rational::from_f64(t)?)?)?.passed) };
    let (mut lo, mut hi) = (lo, hi);
    let at_lo = verdict(lo)?;
    if at_lo == verdict(hi)? {
        return Err(Error::InvalidArgument(format!("verdict is the same at {lo} and {hi}")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if verdict(mid)? == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{build_graphic, build_uniform};
    use crate::rational::{frac, int};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn theta(t: Ratio) -> BooleanDistribution {
        theta_family(&t).unwrap()
    }

    #[test]
    fn u23_hessian_is_triangle() {
        let wc = WeightedComplex::uniform(build_uniform(3, 2).unwrap()).unwrap();
        let g = GeneratingPolynomial::new(&BooleanDistribution::from_complex(&wc));
        let h = partial_derivative_hessian(&g, SubsetMask::EMPTY, None).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h.entries[i][j], if i == j { int(0) } else { frac(1, 3) });
            }
        }
        let dead = partial_derivative_hessian(&g, SubsetMask::from_elements([0, 1, 2]), None).unwrap();
        assert!(dead.degenerate && dead.entries.iter().flatten().all(Zero::is_zero));
    }

    #[test]
    fn pair_weight_relation() {
        let wc = WeightedComplex::uniform(build_graphic(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap()).unwrap();
        for k in 0..=wc.rank() - 2 {
            for &i in wc.level(k) {
                assert!(hessian_matches_pair_weights(&wc, i).unwrap());
            }
        }
    }

    #[test]
    fn slc_verdicts() {
        let wc = WeightedComplex::uniform(build_uniform(4, 2).unwrap()).unwrap();
        let r = slc_check(&BooleanDistribution::from_complex(&wc)).unwrap();
        assert!(r.passed && !r.numerical_warning);
        assert!(!slc_check(&theta(frac(1, 10))).unwrap().passed);
        assert!(slc_check(&theta(int(1))).unwrap().passed);
        assert!(slc_check(&theta(int(3))).unwrap().passed);
        assert!(!slc_check(&theta(int(6))).unwrap().passed);
        let r = slc_check(&theta(int(6))).unwrap();
        assert!(!r.numerical_warning && r.first_failure == Some(SubsetMask::EMPTY));
        let mixed = BooleanDistribution::new(
            2,
            BTreeMap::from([(SubsetMask::singleton(0), int(1)), (SubsetMask::from_elements([0, 1]), int(1))]),
        )
        .unwrap();
        assert!(matches!(slc_check(&mixed), Err(Error::Unsupported(_))));
    }

    #[test]
    fn srp_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bad = srp_quadratic_check(&theta(int(6)), 10_000, &mut rng).unwrap();
        let v = bad.violation.expect("theta = 6 is not strongly Rayleigh");
        assert!(v.lhs < v.rhs);
        let good = srp_quadratic_check(&theta(int(1)), 10_000, &mut rng).unwrap();
        assert!(good.passed());
        assert!(srp_quadratic_check(&theta(int(1)), 0, &mut rng).unwrap().points_checked > 0);
    }

    #[test]
    fn thresholds() {
        let lo = theta_threshold(0.1, 1.0, 1e-6).unwrap();
        let hi = theta_threshold(1.0, 6.0, 1e-6).unwrap();
        assert!((lo - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-4, "{lo}");
        assert!((hi - (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-4, "{hi}");
    }
}
