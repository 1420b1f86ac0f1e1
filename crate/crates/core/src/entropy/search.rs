//! Multi-restart local search for the infimum defining the (modified)
//! log-Sobolev constant of a reversible kernel.
//!
//! The search runs over `f = exp(x)` for an unconstrained `x`, rescaled to
//! `E_pi f = 1`, so positivity and normalisation hold at every iterate.
//! Gradients are central finite differences; steps use Armijo backtracking.
//! Up to half of the restarts begin near a normalised indicator `1_x / pi(x)`,
//! the rest at random points. Whatever the search returns is an upper bound
//! on the true constant.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::walks::{LevelFunction, TransitionKernel};

use super::functionals::{dirichlet_symmetric_unchecked, entropy_unchecked};

/// Below this entropy a point is treated as constant and rejected.
const MIN_ENTROPY: f64 = 1e-14;
const FD_STEP: f64 = 1e-6;
const GRAD_TOL: f64 = 1e-9;
const ARMIJO: f64 = 1e-4;
/// Restart scales for the initial log-values, cycled over restarts.
const INIT_SCALES: [f64; 4] = [0.3, 1.0, 3.0, 8.0];
/// Log-height of the spike in indicator-like starting points.
const SPIKE: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub restarts: usize,
    /// Maximum descent iterations per restart.
    pub budget: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { restarts: 200, budget: 200, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    /// `E(f, log f) / Ent(f)`.
    ModifiedLogSobolev,
    /// `E(sqrt f, sqrt f) / Ent(f)`.
    LogSobolev,
}

/// Best point found by an infimum search.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalReport {
    pub value: f64,
    pub witness: LevelFunction,
    pub restarts: usize,
    pub converged: bool,
    pub evaluations: usize,
}

/// The ratio at a non-negative `f`. Returns `None` when `Ent(f)` is zero.
pub fn functional_ratio(p: &TransitionKernel, f: &[f64], which: Functional) -> Result<Option<f64>> {
    p.require_reversible()?;
    if f.len() != p.len() || f.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::InvalidFunction("need a non-negative function on the kernel's states".into()));
    }
    let ent = entropy_unchecked(p.pi_f64(), f);
    if ent <= 0.0 {
        return Ok(None);
    }
    let num = match which {
        Functional::ModifiedLogSobolev => {
            let lf: Vec<f64> = f.iter().map(|x| if *x == 0.0 { f64::NEG_INFINITY } else { x.ln() }).collect();
            dirichlet_log(p, f, &lf)
        }
        Functional::LogSobolev => {
            let s: Vec<f64> = f.iter().map(|x| x.sqrt()).collect();
            dirichlet_symmetric_unchecked(p, &s, &s)
        }
    };
    Ok(Some(num / ent))
}

/// `E(f, g)` where `g` may carry `-inf` at zeros of `f`; a pair with one zero
/// and one positive value contributes `+inf`, a pair of zeros contributes 0.
fn dirichlet_log(p: &TransitionKernel, f: &[f64], lf: &[f64]) -> f64 {
    let pi = p.pi_f64();
    let mut acc = 0.0;
    for x in 0..pi.len() {
        for (y, pxy) in p.matrix().row_f64(x) {
            let df = f[x] - f[*y];
            if df == 0.0 {
                continue;
            }
            acc += pi[x] * pxy * df * (lf[x] - lf[*y]);
        }
    }
    0.5 * acc
}

struct Objective<'a> {
    p: &'a TransitionKernel,
    which: Functional,
}

impl Objective<'_> {
    /// Normalised `f` and its logarithm from the raw parameters.
    fn point(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = x.iter().map(|v| (v - max).exp()).collect();
        let mean: f64 = self.p.pi_f64().iter().zip(&e).map(|(a, b)| a * b).sum();
        let shift = max + mean.ln();
        let f = e.iter().map(|v| v / mean).collect();
        let lf = x.iter().map(|v| v - shift).collect();
        (f, lf)
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let (f, lf) = self.point(x);
        let ent = entropy_unchecked(self.p.pi_f64(), &f);
        if !(ent > MIN_ENTROPY) {
            return f64::INFINITY;
        }
        let num = match self.which {
            Functional::ModifiedLogSobolev => dirichlet_log(self.p, &f, &lf),
            Functional::LogSobolev => {
                let s: Vec<f64> = lf.iter().map(|v| (0.5 * v).exp()).collect();
                dirichlet_symmetric_unchecked(self.p, &s, &s)
            }
        };
        num / ent
    }
}

struct RestartOutcome {
    value: f64,
    x: Vec<f64>,
    converged: bool,
    evaluations: usize,
}

fn descend(obj: &Objective<'_>, mut x: Vec<f64>, budget: usize) -> RestartOutcome {
    let n = x.len();
    let mut evals = 1;
    let mut fx = obj.eval(&x);
    let mut step: f64 = 1.0;
    let mut converged = false;
    if !fx.is_finite() {
        return RestartOutcome { value: fx, x, converged: false, evaluations: evals };
    }
    let mut grad = vec![0.0; n];
    for _ in 0..budget {
        for i in 0..n {
            let orig = x[i];
            x[i] = orig + FD_STEP;
            let up = obj.eval(&x);
            x[i] = orig - FD_STEP;
            let down = obj.eval(&x);
            x[i] = orig;
            grad[i] = if up.is_finite() && down.is_finite() { (up - down) / (2.0 * FD_STEP) } else { 0.0 };
        }
        evals += 2 * n;
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        if gnorm2.sqrt() < GRAD_TOL {
            converged = true;
            break;
        }
        let mut accepted = false;
        step = (step * 2.0).min(1e3);
        while step > 1e-14 {
            let cand: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a - step * g).collect();
            let fc = obj.eval(&cand);
            evals += 1;
            if fc.is_finite() && fc <= fx - ARMIJO * step * gnorm2 {
                x = cand;
                fx = fc;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            converged = true;
            break;
        }
    }
    RestartOutcome { value: fx, x, converged, evaluations: evals }
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    seed ^ (restart as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Infimum search for `which` over positive functions. Restarts run in
/// parallel; the minimum is taken in restart order, so the result does not
/// depend on scheduling.
pub fn estimate_constant(p: &TransitionKernel, which: Functional, cfg: &SearchConfig) -> Result<FunctionalReport> {
    p.require_reversible()?;
    if cfg.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let n = p.len();
    if n < 2 {
        return Err(Error::Degenerate("a single-state chain has no non-constant functions".into()));
    }
    let obj = Objective { p, which };
    let spikes = n.min(cfg.restarts / 2);
    let outcomes = par::map_range(cfg.restarts, |r| {
        if r < spikes {
            let mut x0 = vec![0.0; n];
            x0[r] = SPIKE;
            return descend(&obj, x0, cfg.budget);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(cfg.seed, r));
        let scale = INIT_SCALES[r % INIT_SCALES.len()];
        let x0: Vec<f64> = (0..n).map(|_| scale * Distribution::<f64>::sample(&StandardNormal, &mut rng)).collect();
        descend(&obj, x0, cfg.budget)
    });
    let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
    let best = outcomes
        .into_iter()
        .filter(|o| o.value.is_finite())
        .reduce(|a, b| if b.value < a.value { b } else { a });
    let level = p.level().unwrap_or(0);
    match best {
        None => Ok(FunctionalReport {
            value: f64::NAN,
            witness: LevelFunction { level, values: vec![1.0; n], normalized: true },
            restarts: cfg.restarts,
            converged: false,
            evaluations,
        }),
        Some(best) => {
            let (f, _) = obj.point(&best.x);
            let value = functional_ratio(p, &f, which)?.unwrap_or(f64::NAN);
            Ok(FunctionalReport {
                value,
                witness: LevelFunction { level, values: f, normalized: true },
                restarts: cfg.restarts,
                converged: best.converged && value.is_finite(),
                evaluations,
            })
        }
    }
}

/// Upper estimate of the modified log-Sobolev constant.
pub fn estimate_mlsc(p: &TransitionKernel, cfg: &SearchConfig) -> Result<FunctionalReport> {
    estimate_constant(p, Functional::ModifiedLogSobolev, cfg)
}

/// Upper estimate of the log-Sobolev constant.
pub fn estimate_lsc(p: &TransitionKernel, cfg: &SearchConfig) -> Result<FunctionalReport> {
    estimate_constant(p, Functional::LogSobolev, cfg)
}

/// `min_x 1 / (-log pi(x))`, the value of the log-Sobolev ratio at the
/// indicator functions `1_x / pi(x)` (an upper bound on the constant).
pub fn alpha_indicator_bound(pi: &[f64]) -> Result<f64> {
    if pi.len() < 2 || pi.iter().any(|p| *p >= 1.0) {
        return Err(Error::Degenerate("need at least two states of positive mass".into()));
    }
    Ok(pi.iter().filter(|p| **p > 0.0).map(|p| 1.0 / -p.ln()).fold(f64::INFINITY, f64::min))
}
