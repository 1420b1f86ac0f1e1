//! Scalar functionals of a distribution and a function on its states.
//! Natural logarithms throughout; `0 log 0 = 0` by branch.

use crate::error::{Error, Result};
use crate::walks::TransitionKernel;

#[inline]
pub(crate) fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn check_nonneg(f: &[f64]) -> Result<()> {
    match f.iter().find(|x| !(**x >= 0.0)) {
        Some(x) => Err(Error::InvalidFunction(format!("negative or NaN value {x}"))),
        None => Ok(()),
    }
}

fn check_len(pi: &[f64], f: &[f64]) -> Result<()> {
    if pi.len() != f.len() {
        return Err(Error::InvalidFunction(format!(
            "function has {} values for {} states",
            f.len(),
            pi.len()
        )));
    }
    Ok(())
}

pub fn expectation(pi: &[f64], f: &[f64]) -> f64 {
    pi.iter().zip(f).map(|(p, x)| p * x).sum()
}

pub fn variance(pi: &[f64], f: &[f64]) -> f64 {
    let m = expectation(pi, f);
    pi.iter().zip(f).map(|(p, x)| p * (x - m) * (x - m)).sum()
}

/// `Ent_pi(f) = E(f log f) - E f log E f`.
///
/// Evaluated as `sum pi * m * phi(f/m)` with `phi(t) = t log t - t + 1 >= 0`,
/// which equals the textbook form and has no cancellation between large terms.
pub fn entropy(pi: &[f64], f: &[f64]) -> Result<f64> {
    check_len(pi, f)?;
    check_nonneg(f)?;
    Ok(entropy_unchecked(pi, f))
}

pub(crate) fn entropy_unchecked(pi: &[f64], f: &[f64]) -> f64 {
    let m = expectation(pi, f);
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = pi
        .iter()
        .zip(f)
        .map(|(p, x)| {
            let t = x / m;
            let phi = if t == 0.0 { 1.0 } else { t * t.ln() - t + 1.0 };
            p * phi
        })
        .sum();
    (m * s).max(0.0)
}

/// `E_pi(f log f) - E f log E f` computed literally. Used as a cross-check.
pub fn entropy_direct(pi: &[f64], f: &[f64]) -> Result<f64> {
    check_len(pi, f)?;
    check_nonneg(f)?;
    let m = expectation(pi, f);
    Ok(pi.iter().zip(f).map(|(p, x)| p * xlogx(*x)).sum::<f64>() - xlogx(m))
}

/// Relative entropy `D(tau || pi)`. Requires `supp(tau) ⊆ supp(pi)`.
pub fn kl_divergence(tau: &[f64], pi: &[f64]) -> Result<f64> {
    check_len(pi, tau)?;
    check_nonneg(tau)?;
    let mut acc = 0.0;
    for (t, p) in tau.iter().zip(pi) {
        if *t == 0.0 {
            continue;
        }
        if *p == 0.0 {
            return Err(Error::InvalidDistribution("tau charges a state outside supp(pi)".into()));
        }
        acc += t * (t / p).ln();
    }
    Ok(acc.max(0.0))
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// `2 ||tau - pi||_TV^2 <= D(tau || pi)`, with slack `tol`.
pub fn pinsker_holds(tau: &[f64], pi: &[f64], tol: f64) -> Result<bool> {
    let tv = total_variation(tau, pi);
    Ok(2.0 * tv * tv <= kl_divergence(tau, pi)? + tol)
}

/// Dirichlet form `f^T diag(pi) (I - P) g`.
pub fn dirichlet(p: &TransitionKernel, f: &[f64], g: &[f64]) -> Result<f64> {
    p.require_reversible()?;
    check_len(p.pi_f64(), f)?;
    check_len(p.pi_f64(), g)?;
    let pg = p.apply(g);
    Ok(p.pi_f64().iter().zip(f).zip(g.iter().zip(&pg)).map(|((pi, fx), (gx, pgx))| pi * fx * (gx - pgx)).sum())
}

/// Dirichlet form `1/2 sum pi(x) P(x,y) (f(x)-f(y)) (g(x)-g(y))`.
pub fn dirichlet_symmetric(p: &TransitionKernel, f: &[f64], g: &[f64]) -> Result<f64> {
    p.require_reversible()?;
    check_len(p.pi_f64(), f)?;
    check_len(p.pi_f64(), g)?;
    Ok(dirichlet_symmetric_unchecked(p, f, g))
}

pub(crate) fn dirichlet_symmetric_unchecked(p: &TransitionKernel, f: &[f64], g: &[f64]) -> f64 {
    let pi = p.pi_f64();
    let mut acc = 0.0;
    for x in 0..pi.len() {
        let mut row = 0.0;
        for (y, pxy) in p.matrix().row_f64(x) {
            row += pxy * (f[x] - f[*y]) * (g[x] - g[*y]);
        }
        acc += pi[x] * row;
    }
    0.5 * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{build_uniform, WeightedComplex};
    use crate::walks::down_up_walk;

    #[test]
    fn entropy_basics() {
        let pi = [1.0 / 3.0; 3];
        assert_eq!(entropy(&pi, &[2.0, 2.0, 2.0]).unwrap(), 0.0);
        let spike = [3.0, 0.0, 0.0];
        assert!((entropy(&pi, &spike).unwrap() - 3f64.ln()).abs() < 1e-14);
        assert!((entropy_direct(&pi, &spike).unwrap() - 3f64.ln()).abs() < 1e-14);
        let f = [0.3, 1.7, 0.2];
        let c = 4.5;
        let scaled: Vec<f64> = f.iter().map(|x| c * x).collect();
        assert!((entropy(&pi, &scaled).unwrap() - c * entropy(&pi, &f).unwrap()).abs() < 1e-13);
        assert!((entropy(&pi, &f).unwrap() - entropy_direct(&pi, &f).unwrap()).abs() < 1e-14);
        assert!(entropy(&pi, &[1.0, -1.0, 1.0]).is_err());
    }

    #[test]
    fn kl_and_pinsker() {
        let pi = [0.5, 0.5];
        assert_eq!(kl_divergence(&pi, &pi).unwrap(), 0.0);
        assert!((kl_divergence(&[1.0, 0.0], &pi).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(pinsker_holds(&[1.0, 0.0], &pi, 0.0).unwrap());
        assert!(kl_divergence(&[0.5, 0.5], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn dirichlet_forms_agree() {
        let wc = WeightedComplex::uniform(build_uniform(3, 2).unwrap()).unwrap();
        let p = down_up_walk(&wc, 2).unwrap();
        let f = [3.0, 0.0, 0.0];
        // hand computation: pi = 1/3, P off-diagonal 1/4; pairs (0,1),(0,2) differ by 3
        // 1/2 * sum_x sum_y pi P (df)^2 = 1/2 * 4 * (1/3 * 1/4 * 9) = 3/2
        assert!((dirichlet(&p, &f, &f).unwrap() - 1.5).abs() < 1e-14);
        assert!((dirichlet_symmetric(&p, &f, &f).unwrap() - 1.5).abs() < 1e-14);
        let g = [0.1, 2.0, 0.7];
        let a = dirichlet(&p, &f, &g).unwrap();
        assert!((a - dirichlet(&p, &g, &f).unwrap()).abs() < 1e-14);
        assert!((a - dirichlet_symmetric(&p, &f, &g).unwrap()).abs() < 1e-14);
        assert!(dirichlet(&p, &[1.0; 3], &g).unwrap().abs() < 1e-15);
    }
}
