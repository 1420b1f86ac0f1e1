//! Total-variation mixing times by direct evolution, and the closed-form
//! upper bounds in terms of the spectral gap and the (modified)
//! log-Sobolev constants.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::walks::TransitionKernel;

use super::functionals::total_variation;

/// Largest chain accepted by [`exact_mixing_time`].
pub const MAX_MIXING_STATES: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingResult {
    pub epsilon: f64,
    /// Smallest `t` with `max_x ||P^t(x,.) - pi||_TV <= epsilon`; `None` when
    /// not reached within the step limit.
    pub exact_t: Option<u64>,
    /// Modified log-Sobolev bound for the walk's guaranteed constant, when
    /// the kernel carries a walk label and the bound is defined.
    pub bound_t: Option<f64>,
    /// Start attaining the mixing time (lowest index on ties).
    pub worst_start: usize,
    /// Largest `|sum tau - 1|` seen, a proxy for accumulated rounding.
    pub mass_drift: f64,
}

/// Distance after `t` steps from every start, in start order.
pub fn tv_from_each_start(p: &TransitionKernel, t: u64) -> Vec<f64> {
    let n = p.len();
    par::map_range(n, |x| {
        let mut tau = vec![0.0; n];
        tau[x] = 1.0;
        for _ in 0..t {
            tau = p.evolve(&tau);
        }
        total_variation(&tau, p.pi_f64())
    })
}

/// `max_x ||P^t(x,.) - pi||_TV`.
pub fn worst_case_tv(p: &TransitionKernel, t: u64) -> f64 {
    tv_from_each_start(p, t).into_iter().fold(0.0, f64::max)
}

/// Exact mixing time by evolving a point mass from every start. The
/// distance from a fixed start never increases, so each start stops at its
/// own first crossing and the mixing time is the largest of these.
pub fn exact_mixing_time(p: &TransitionKernel, epsilon: f64, max_t: u64) -> Result<MixingResult> {
    let n = p.len();
    if n > MAX_MIXING_STATES {
        return Err(Error::SizeCap(format!("{n} states exceeds the limit of {MAX_MIXING_STATES}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let bound_t = match (p.walk(), p.level()) {
        (Some(kind), Some(k)) => {
            let pi_min = p.pi_f64().iter().copied().fold(f64::INFINITY, f64::min);
            mlsi_bound(kind.mlsi_factor(k) as f64, pi_min, epsilon)
        }
        _ => None,
    };
    if epsilon >= 1.0 || n == 0 {
        return Ok(MixingResult { epsilon, exact_t: Some(0), bound_t, worst_start: 0, mass_drift: 0.0 });
    }
    let pi = p.pi_f64();
    let per_start = par::map_range(n, |x| {
        let mut tau = vec![0.0; n];
        tau[x] = 1.0;
        let mut drift: f64 = 0.0;
        let mut t = 0;
        loop {
            if total_variation(&tau, pi) <= epsilon {
                return (Some(t), drift);
            }
            if t == max_t {
                return (None, drift);
            }
            tau = p.evolve(&tau);
            drift = drift.max((tau.iter().sum::<f64>() - 1.0).abs());
            t += 1;
        }
    });
    let mass_drift = per_start.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    let mut worst_start = 0;
    let mut exact_t = Some(0);
    for (x, (t, _)) in per_start.iter().enumerate() {
        match (t, exact_t) {
            (None, Some(_)) => {
                exact_t = None;
                worst_start = x;
            }
            (Some(tx), Some(cur)) if *tx > cur => {
                exact_t = Some(*tx);
                worst_start = x;
            }
            _ => {}
        }
    }
    Ok(MixingResult { epsilon, exact_t, bound_t, worst_start, mass_drift })
}

fn valid_eps(epsilon: f64) -> bool {
    epsilon > 0.0 && epsilon < 1.0
}

/// `c (log log(1/pi_min) + log(1/(2 eps^2)))`, where `1/c` lower-bounds the
/// modified log-Sobolev constant. Undefined when `pi_min >= 1/e`.
pub fn mlsi_bound(c: f64, pi_min: f64, epsilon: f64) -> Option<f64> {
    if !(pi_min > 0.0 && pi_min < (-1.0f64).exp()) || !valid_eps(epsilon) {
        return None;
    }
    Some(c * ((1.0 / pi_min).ln().ln() + (1.0 / (2.0 * epsilon * epsilon)).ln()))
}

/// `(1/lambda) (1/2 log(1/pi_min) + log(1/(2 eps)))`.
pub fn spectral_bound(lambda: f64, pi_min: f64, epsilon: f64) -> Option<f64> {
    if !(lambda > 0.0 && pi_min > 0.0 && pi_min < 1.0) || !valid_eps(epsilon) {
        return None;
    }
    Some((0.5 * (1.0 / pi_min).ln() + (1.0 / (2.0 * epsilon)).ln()) / lambda)
}

/// `(1/(4 alpha)) (log log(1/pi_min) + log(1/(2 eps^2)))`.
pub fn lsi_bound(alpha: f64, pi_min: f64, epsilon: f64) -> Option<f64> {
    if !(alpha > 0.0) {
        return None;
    }
    mlsi_bound(1.0 / (4.0 * alpha), pi_min, epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundComparison {
    pub spectral: Option<f64>,
    pub lsi: Option<f64>,
    pub mlsi: Option<f64>,
}

/// All three bounds side by side; any input may be missing.
pub fn compare_bounds(
    mlsi_factor: f64,
    lambda: Option<f64>,
    alpha: Option<f64>,
    pi_min: f64,
    epsilon: f64,
) -> BoundComparison {
    BoundComparison {
        spectral: lambda.and_then(|l| spectral_bound(l, pi_min, epsilon)),
        lsi: alpha.and_then(|a| lsi_bound(a, pi_min, epsilon)),
        mlsi: mlsi_bound(mlsi_factor, pi_min, epsilon),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{build_partition, build_uniform, WeightedComplex};
    use crate::walks::bases_exchange;

    fn cube(n: usize) -> TransitionKernel {
        let blocks: Vec<Vec<usize>> = (0..n).map(|i| vec![2 * i, 2 * i + 1]).collect();
        bases_exchange(&WeightedComplex::uniform(build_partition(&blocks).unwrap()).unwrap()).unwrap()
    }

    /// Brute force: dense powers, scanning t upwards.
    fn scan(p: &TransitionKernel, eps: f64) -> u64 {
        let m = p.dense();
        let pi = p.pi_f64();
        let mut pow = nalgebra::DMatrix::<f64>::identity(p.len(), p.len());
        for t in 0.. {
            let worst = (0..p.len())
                .map(|x| 0.5 * (0..p.len()).map(|y| (pow[(x, y)] - pi[y]).abs()).sum::<f64>())
                .fold(0.0, f64::max);
            if worst <= eps {
                return t;
            }
            pow = &pow * &m;
        }
        unreachable!()
    }

    #[test]
    fn lazy_square() {
        let p = cube(2);
        let r = exact_mixing_time(&p, 0.25, 1000).unwrap();
        assert_eq!(r.exact_t, Some(scan(&p, 0.25)));
        let t = r.exact_t.unwrap();
        assert!(worst_case_tv(&p, t) <= 0.25);
        assert!(t == 0 || worst_case_tv(&p, t - 1) > 0.25);
        assert!(r.exact_t.unwrap() as f64 <= r.bound_t.unwrap());
    }

    #[test]
    fn matches_scan_on_larger_chains() {
        for p in [cube(4), bases_exchange(&WeightedComplex::uniform(build_uniform(5, 2).unwrap()).unwrap()).unwrap()] {
            for eps in [0.4, 0.25, 0.05] {
                assert_eq!(exact_mixing_time(&p, eps, 1000).unwrap().exact_t, Some(scan(&p, eps)));
            }
        }
    }

    #[test]
    fn trivial_and_capped() {
        let p = cube(3);
        assert_eq!(exact_mixing_time(&p, 1.0, 10).unwrap().exact_t, Some(0));
        assert_eq!(exact_mixing_time(&p, 1e-12, 2).unwrap().exact_t, None);
        assert!(exact_mixing_time(&p, 0.0, 2).is_err());
    }

    #[test]
    fn bound_values() {
        let n = 8.0f64;
        let b = mlsi_bound(n, 2f64.powi(-8), 0.25).unwrap();
        let oracle = n * ((n * 2f64.ln()).ln() + 8f64.ln());
        assert!((b - oracle).abs() < 1e-12);
        assert!((b - 30.34).abs() < 0.02);
        assert!(mlsi_bound(2.0, 0.5, 0.25).is_none());
        assert!(mlsi_bound(2.0, 0.01, 0.3).unwrap() < mlsi_bound(2.0, 0.01, 0.2).unwrap());
        let c = compare_bounds(2.0, Some(0.5), Some(0.25), 0.01, 0.25);
        assert!(c.spectral.is_some() && c.lsi.is_some() && c.mlsi.is_some());
        // alpha = 1/(4c) makes the two entropy bounds coincide
        assert!((c.lsi.unwrap() - mlsi_bound(1.0, 0.01, 0.25).unwrap()).abs() < 1e-12);
    }
}
