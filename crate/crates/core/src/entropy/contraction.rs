//! Numerical checks of the entropy-contraction inequalities and the exact
//! identities behind them: projection of functions down the levels, the
//! chain rule over links, the one-step KL contraction of the down-up walk,
//! and the link-level modified log-Sobolev bound.

use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::matroid::WeightedComplex;
use crate::negdep::{slc_check, BooleanDistribution, EIGEN_TOL};
use crate::rational::{self, Ratio};
use crate::walks::{
    down_operator, down_up_walk, push_down, up_down_walk, up_operator, LevelFunction, RectangularOperator,
    TransitionKernel,
};

use super::functionals::{entropy_unchecked, expectation, kl_divergence, pinsker_holds};
use super::search::{estimate_mlsc, FunctionalReport, SearchConfig};

/// Slack for entropy inequalities and identities.
pub const ENTROPY_TOL: f64 = 1e-10;
/// Slack for optimiser-based lower-bound checks.
pub const SEARCH_TOL: f64 = 1e-6;
/// Slack for the quadratic-form bound.
pub const QUADRATIC_TOL: f64 = 1e-9;

/// `exp` of i.i.d. standard normals, so both flat and spiky functions occur.
pub fn random_positive<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    (0..len).map(|_| rng.sample::<f64, _>(StandardNormal).exp()).collect()
}

/// Random positive function on `M(k)` with `E_{pi_k} f = 1`.
pub fn random_level_function<R: Rng + ?Sized>(wc: &WeightedComplex, k: usize, rng: &mut R) -> Result<LevelFunction> {
    let pi = wc.level_distribution(k)?.to_f64();
    LevelFunction::new(k, random_positive(pi.len(), rng))?.normalize(&pi)
}

/// Random distribution on `len` states.
pub fn random_distribution<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    let v = random_positive(len, rng);
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

fn check_function(wc: &WeightedComplex, f: &LevelFunction) -> Result<Vec<f64>> {
    let pi = wc.level_distribution(f.level)?.to_f64();
    if pi.len() != f.values.len() {
        return Err(Error::InvalidFunction(format!(
            "function has {} values but M({}) has {} sets",
            f.values.len(),
            f.level,
            pi.len()
        )));
    }
    if f.values.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::InvalidFunction("negative values".into()));
    }
    Ok(pi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl InequalityCheck {
    /// `lhs >= rhs - tol`.
    fn at_least(lhs: f64, rhs: f64, tol: f64) -> Self {
        InequalityCheck { lhs, rhs, pass: lhs >= rhs - tol }
    }

    /// `lhs <= rhs + tol`.
    fn at_most(lhs: f64, rhs: f64, tol: f64) -> Self {
        InequalityCheck { lhs, rhs, pass: lhs <= rhs + tol }
    }
}

/// `Ent_k(f) >= (k/(k-1)) Ent_{k-1}(f^(k-1))`.
pub fn verify_entropy_contraction(wc: &WeightedComplex, k: usize, f: &LevelFunction) -> Result<InequalityCheck> {
    if k < 2 || k > wc.rank() || f.level != k {
        return Err(Error::InvalidArgument(format!("need 2 <= k <= r and f on M(k), got k = {k}")));
    }
    let pi = check_function(wc, f)?;
    let lhs = entropy_unchecked(&pi, &f.values);
    let g = push_down(wc, f, k - 1)?;
    let pi_lower = wc.level_distribution(k - 1)?.to_f64();
    let rhs = k as f64 / (k as f64 - 1.0) * entropy_unchecked(&pi_lower, &g.values);
    Ok(InequalityCheck::at_least(lhs, rhs, ENTROPY_TOL))
}

/// `Ent_k(f) >= k Ent_1(f^(1))`, the per-level checks composed.
pub fn verify_entropy_chain(wc: &WeightedComplex, k: usize, f: &LevelFunction) -> Result<InequalityCheck> {
    if k < 1 || k > wc.rank() || f.level != k {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= r and f on M(k), got k = {k}")));
    }
    let pi = check_function(wc, f)?;
    let lhs = entropy_unchecked(&pi, &f.values);
    let g = push_down(wc, f, 1)?;
    let rhs = k as f64 * entropy_unchecked(&wc.level_distribution(1)?.to_f64(), &g.values);
    Ok(InequalityCheck::at_least(lhs, rhs, ENTROPY_TOL))
}

/// Largest deviations found when comparing `f^(i)` with conditional
/// expectations and `E_{pi_i} f^(i)` with `E_{pi_k} f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionCheck {
    pub conditional_error: f64,
    pub normalization_error: f64,
    pub pass: bool,
}

/// For every level `i < k`: `f^(i)(J) = E_{pi_{J,k-i}} f` and the mean is kept.
pub fn verify_projection(wc: &WeightedComplex, f: &LevelFunction) -> Result<ProjectionCheck> {
    let k = f.level;
    let pi = check_function(wc, f)?;
    let mean = expectation(&pi, &f.values);
    let mut conditional_error: f64 = 0.0;
    let mut normalization_error: f64 = 0.0;
    for i in (1..k).rev() {
        let g = push_down(wc, f, i)?;
        let pi_i = wc.level_distribution(i)?.to_f64();
        normalization_error = normalization_error.max((expectation(&pi_i, &g.values) - mean).abs());
        for (idx, &j) in wc.level(i).iter().enumerate() {
            let cond = wc.conditional_distribution(j, k - i)?.to_f64();
            let direct = expectation(&cond, &f.values);
            conditional_error = conditional_error.max((direct - g.values[idx]).abs() / direct.abs().max(1.0));
        }
    }
    Ok(ProjectionCheck {
        conditional_error,
        normalization_error,
        pass: conditional_error <= ENTROPY_TOL && normalization_error <= ENTROPY_TOL * mean.max(1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneStepReport {
    /// `D(P^T tau || pi_k)` against `(1 - 1/k) D(tau || pi_k)`.
    pub contraction: InequalityCheck,
    /// `Ent_k(P_down g) <= Ent_{k-1}(g)` for the projected density `g`.
    pub down_entropy: InequalityCheck,
    pub expectation_preserved: bool,
    /// Pinsker on `tau` and on the distribution after one step.
    pub pinsker: bool,
}

impl OneStepReport {
    pub fn passed(&self) -> bool {
        self.contraction.pass && self.down_entropy.pass && self.expectation_preserved && self.pinsker
    }
}

/// One step of the down-up walk on `M(k)`, prepared once and applied to
/// many starting distributions.
#[derive(Debug, Clone)]
pub struct OneStepKl {
    k: usize,
    kernel: TransitionKernel,
    up: RectangularOperator,
    down: RectangularOperator,
    pi_lower: Vec<f64>,
}

impl OneStepKl {
    pub fn new(wc: &WeightedComplex, k: usize) -> Result<Self> {
        if k < 2 || k > wc.rank() {
            return Err(Error::InvalidArgument(format!("need 2 <= k <= r, got k = {k}")));
        }
        Ok(OneStepKl {
            k,
            kernel: down_up_walk(wc, k)?,
            up: up_operator(wc, k - 1)?,
            down: down_operator(wc, k)?,
            pi_lower: wc.level_distribution(k - 1)?.to_f64(),
        })
    }

    pub fn kernel(&self) -> &TransitionKernel {
        &self.kernel
    }

    pub fn check(&self, tau: &[f64]) -> Result<OneStepReport> {
        let pi = self.kernel.pi_f64();
        if tau.len() != pi.len() || tau.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::InvalidDistribution("tau must be non-negative on M(k)".into()));
        }
        if (tau.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution("tau does not sum to 1".into()));
        }
        let before = kl_divergence(tau, pi)?;
        let stepped = self.kernel.evolve(tau);
        let after = kl_divergence(&stepped, pi)?;
        let factor = 1.0 - 1.0 / self.k as f64;
        let contraction = InequalityCheck::at_most(after, factor * before, ENTROPY_TOL);

        // density of tau, its projection one level down, and back up
        let f: Vec<f64> = tau.iter().zip(pi).map(|(t, p)| t / p).collect();
        let g = self.up.apply(&f);
        let lifted = self.down.apply(&g);
        let ent_g = entropy_unchecked(&self.pi_lower, &g);
        let ent_lifted = entropy_unchecked(pi, &lifted);
        let down_entropy = InequalityCheck::at_most(ent_lifted, ent_g, ENTROPY_TOL);
        let expectation_preserved = (expectation(pi, &lifted) - expectation(&self.pi_lower, &g)).abs() <= ENTROPY_TOL;

        let pinsker = pinsker_holds(tau, pi, 0.0)? && pinsker_holds(&stepped, pi, 0.0)?;
        Ok(OneStepReport { contraction, down_entropy, expectation_preserved, pinsker })
    }
}

/// Convenience wrapper around [`OneStepKl`] for a single distribution.
pub fn verify_one_step_kl(wc: &WeightedComplex, k: usize, tau: &[f64]) -> Result<OneStepReport> {
    OneStepKl::new(wc, k)?.check(tau)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainRuleReport {
    pub entropy: f64,
    /// `sum_K pi_{k-1}(K) Ent_{pi_{K,1}}(f)`.
    pub link_part: f64,
    /// `Ent_{pi_{k-1}}(f^(k-1))`.
    pub projection_part: f64,
    /// `sum_v pi_1(v) Ent_{pi_{v,k-1}}(f) + Ent_{pi_1}(f^(1))`.
    pub vertex_total: f64,
    pub pass: bool,
    /// `link_part >= Ent_k(f) / k`.
    pub link_lower_bound: bool,
}

/// Mixture decompositions of `pi_k` over links, prepared once.
#[derive(Debug, Clone)]
pub struct ChainRule {
    k: usize,
    pi: Vec<f64>,
    pi_lower: Vec<f64>,
    pi_one: Vec<f64>,
    /// For each `K` in `M(k-1)`: supersets in `M(k)` with `pi_{K,1}` mass.
    links: Vec<Vec<(usize, f64)>>,
    /// For each `v` in `M(1)`: supersets in `M(k)` with `pi_{v,k-1}` mass.
    stars: Vec<Vec<(usize, f64)>>,
    mixtures_exact: bool,
}

fn superset_masses(wc: &WeightedComplex, base: SubsetMask, k: usize) -> Result<Vec<(usize, Ratio)>> {
    let d = wc.conditional_distribution(base, k - base.len())?;
    Ok(d.p.into_iter().enumerate().filter(|(_, p)| !p.is_zero()).collect())
}

fn to_f64_pairs(v: &[(usize, Ratio)]) -> Vec<(usize, f64)> {
    v.iter().map(|(i, p)| (*i, rational::to_f64(p))).collect()
}

impl ChainRule {
    pub fn new(wc: &WeightedComplex, k: usize) -> Result<Self> {
        if k < 1 || k > wc.rank() {
            return Err(Error::InvalidArgument(format!("need 1 <= k <= r, got k = {k}")));
        }
        let pi_exact = wc.level_distribution(k)?.p;
        let lower = wc.level_distribution(k - 1)?;
        let one = wc.level_distribution(1)?;
        let size = pi_exact.len();

        let mut links = Vec::with_capacity(lower.len());
        let mut mix_links = vec![Ratio::zero(); size];
        for (&kset, pk) in lower.states.iter().zip(&lower.p) {
            let masses = superset_masses(wc, kset, k)?;
            for (j, p) in &masses {
                mix_links[*j] += pk * p;
            }
            links.push(to_f64_pairs(&masses));
        }
        let mut stars = Vec::with_capacity(one.len());
        let mut mix_stars = vec![Ratio::zero(); size];
        for (&v, pv) in one.states.iter().zip(&one.p) {
            let masses = superset_masses(wc, v, k)?;
            for (j, p) in &masses {
                mix_stars[*j] += pv * p;
            }
            stars.push(to_f64_pairs(&masses));
        }
        let mixtures_exact = mix_links == pi_exact && mix_stars == pi_exact;
        debug_assert!(rational::sum(&pi_exact).is_one());
        Ok(ChainRule {
            k,
            pi: pi_exact.iter().map(rational::to_f64).collect(),
            pi_lower: lower.to_f64(),
            pi_one: one.to_f64(),
            links,
            stars,
            mixtures_exact,
        })
    }

    /// Both mixture identities hold in exact arithmetic.
    pub fn mixtures_exact(&self) -> bool {
        self.mixtures_exact
    }

    pub fn check(&self, f: &[f64]) -> Result<ChainRuleReport> {
        if f.len() != self.pi.len() || f.iter().any(|x| !(*x >= 0.0)) {
            return Err(Error::InvalidFunction("need a non-negative function on M(k)".into()));
        }
        let entropy = entropy_unchecked(&self.pi, f);
        let (link_part, projection_part) = split(&self.links, &self.pi_lower, f);
        let (star_part, star_projection) = split(&self.stars, &self.pi_one, f);
        let vertex_total = star_part + star_projection;
        let scale = entropy.abs().max(1.0);
        let pass = (link_part + projection_part - entropy).abs() <= ENTROPY_TOL * scale
            && (vertex_total - entropy).abs() <= ENTROPY_TOL * scale;
        let link_lower_bound = link_part >= entropy / self.k as f64 - ENTROPY_TOL * scale;
        Ok(ChainRuleReport { entropy, link_part, projection_part, vertex_total, pass, link_lower_bound })
    }
}

/// Mixture chain rule: average conditional entropy and entropy of the
/// conditional means.
fn split(parts: &[Vec<(usize, f64)>], weights: &[f64], f: &[f64]) -> (f64, f64) {
    let mut restricted = 0.0;
    let mut means = Vec::with_capacity(parts.len());
    for (part, w) in parts.iter().zip(weights) {
        let probs: Vec<f64> = part.iter().map(|(_, p)| *p).collect();
        let vals: Vec<f64> = part.iter().map(|(j, _)| f[*j]).collect();
        restricted += w * entropy_unchecked(&probs, &vals);
        means.push(expectation(&probs, &vals));
    }
    (restricted, entropy_unchecked(weights, &means))
}

/// Convenience wrapper around [`ChainRule`] for a single function.
pub fn verify_chain_rule(wc: &WeightedComplex, k: usize, f: &LevelFunction) -> Result<ChainRuleReport> {
    check_function(wc, f)?;
    ChainRule::new(wc, k)?.check(&f.values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkReport {
    pub base: SubsetMask,
    /// Search on the level-1 up-down walk of the contraction.
    pub search: FunctionalReport,
    pub mlsc_pass: bool,
    pub quadratic_trials: usize,
    /// `max (f^T W_I f - w(I))` over the trials, relative to `w(I)`.
    pub quadratic_max_excess: f64,
    pub quadratic_pass: bool,
    pub positive_eigenvalues: usize,
    pub eigenvalue_pass: bool,
    /// Whether the basis distribution is strongly log-concave. The bounds
    /// are only guaranteed when it is; otherwise the verdicts are informative.
    pub slc_input: bool,
}

impl LinkReport {
    pub fn passed(&self) -> bool {
        self.mlsc_pass && self.quadratic_pass && self.eigenvalue_pass
    }
}

/// Link checks at `I`: the level-1 up-down walk of the contraction has
/// modified log-Sobolev estimate at least 1/2, `f^T W_I f <= w(I)` for
/// random `f` with `E_{pi_{I,1}} f = 1`, and `W_I` has at most one positive
/// eigenvalue.
pub fn verify_link_mlsc(
    wc: &WeightedComplex,
    base: SubsetMask,
    cfg: &SearchConfig,
    quadratic_trials: usize,
) -> Result<LinkReport> {
    wc.check_independent(base)?;
    if base.len() + 2 > wc.rank() {
        return Err(Error::InvalidArgument(format!("link checks need |I| <= r-2, got {}", base.len())));
    }
    let link = wc.contract(base)?;
    let p = up_down_walk(&link, 1)?;
    let search = estimate_mlsc(&p, cfg)?;
    let mlsc_pass = search.value >= 0.5 - SEARCH_TOL;

    let w = wc.pair_weight_matrix(base)?;
    let w_base = rational::to_f64(&wc.weight(base));
    let wv: Vec<f64> = w.elements.iter().map(|&e| rational::to_f64(&wc.weight(base.with(e)))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ u64::from(base.0).wrapping_mul(0xA24B_AED4_963E_E407));
    let mut excess = f64::NEG_INFINITY;
    for t in 0..quadratic_trials {
        // the first trial is the equality case f = 1
        let mut f = if t == 0 { vec![1.0; wv.len()] } else { random_positive(wv.len(), &mut rng) };
        let s: f64 = f.iter().zip(&wv).map(|(a, b)| a * b).sum();
        for x in &mut f {
            *x *= w_base / s;
        }
        excess = excess.max((w.quadratic_form(&f) - w_base) / w_base);
    }
    let positive_eigenvalues = w.positive_eigenvalue_count(EIGEN_TOL);
    let slc_input = slc_check(&BooleanDistribution::from_complex(wc))?.passed;
    Ok(LinkReport {
        base,
        search,
        mlsc_pass,
        quadratic_trials,
        quadratic_max_excess: excess,
        quadratic_pass: quadratic_trials == 0 || excess <= QUADRATIC_TOL,
        positive_eigenvalues,
        eigenvalue_pass: positive_eigenvalues <= 1,
        slc_input,
    })
}

/// All independent sets with `|I| <= r - 2`, in level order.
pub fn admissible_links(wc: &WeightedComplex) -> Vec<SubsetMask> {
    let top = wc.rank().saturating_sub(2);
    if wc.rank() < 2 {
        return Vec::new();
    }
    (0..=top).flat_map(|k| wc.level(k).iter().copied()).collect()
}
