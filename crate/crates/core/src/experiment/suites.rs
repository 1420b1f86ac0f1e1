use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::concentration::{example_observables, tail_report};
use crate::entropy::{
    admissible_links, alpha_indicator_bound, compare_bounds, estimate_lsc, estimate_mlsc, exact_mixing_time, kl_divergence,
    random_distribution, random_level_function, spectral_bound, spectral_gap, total_variation, verify_entropy_chain,
    verify_entropy_contraction, verify_link_mlsc, verify_projection, ChainRule, OneStepKl, SearchConfig,
};
use crate::error::Result;
use crate::matroid::{verify_axioms, WeightedComplex};
use crate::negdep::{
    theta_family, hessian_matches_pair_weights, ncd_check, scp_check, slc_check, srp_quadratic_check,
    theta_threshold, BooleanDistribution,
};
use crate::par;
use crate::rational::{self, frac, int, Ratio};
use crate::walks::{
    adjoint_identity_holds, bases_exchange, down_up_by_composition, up_down_by_composition,
    up_down_link_decomposition, walk, SparseMatrix, TransitionKernel, WalkKind,
};

use super::{Cell, ExperimentConfig, Instance, Report, Suite};

/// Gaps of partner walks must agree to this precision.
const GAP_TOL: f64 = 1e-9;
/// Slack for optimiser-based lower bounds.
const SEARCH_TOL: f64 = 1e-6;
/// Slack for the consistency of the three estimated constants.
const SANDWICH_SLACK: f64 = 0.05;
/// Step cap for exact mixing times.
const MAX_STEPS: u64 = 1_000_000;
/// Sample count for the quadratic strong-Rayleigh test.
const SRP_SAMPLES: usize = 10_000;
const THRESHOLD_TOL: f64 = 1e-4;

/// splitmix64 finaliser, used to derive independent sub-seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sub_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix(seed), |acc, &p| mix(acc ^ p))
}

fn seed_of(cfg: &ExperimentConfig) -> u64 {
    cfg.seed.unwrap_or(0)
}

fn walk_code(kind: WalkKind) -> u64 {
    match kind {
        WalkKind::UpDown => 1,
        WalkKind::DownUp => 2,
    }
}

/// `(kind, level)` for every walk with an upper level in range.
fn walk_levels(wc: &WeightedComplex) -> Vec<(WalkKind, usize)> {
    let r = wc.rank();
    let mut out: Vec<(WalkKind, usize)> = (1..r).map(|k| (WalkKind::UpDown, k)).collect();
    out.extend((2..=r).map(|k| (WalkKind::DownUp, k)));
    out
}

pub(super) fn axioms(cfg: &ExperimentConfig, instances: &[Instance]) -> Result<Report> {
    let mut r = Report::new(
        Suite::Axioms,
        cfg.seed,
        &["id", "n", "rank", "bases", "axioms", "recursion", "closed_form", "normalizers", "positive", "pass"],
    );
    for inst in instances {
        let wc = &inst.complex;
        let ax = verify_axioms(wc.matroid())?;
        let s = wc.structure_report();
        if let Some((a, b)) = ax.downward_violation {
            r.note(format!("{}: {a} independent but its subset {b} is not", inst.id));
        }
        if let Some((a, b)) = ax.augmentation_violation {
            r.note(format!("{}: no element of {a} augments {b}", inst.id));
        }
        r.push(vec![
            inst.id.as_str().into(),
            Cell::count(wc.ground_size()),
            Cell::count(wc.rank()),
            Cell::count(wc.bases().len()),
            ax.passed().into(),
            s.recursion_ok.into(),
            s.closed_form_ok.into(),
            s.normalizers_ok.into(),
            s.positive.into(),
            (ax.passed() && s.passed()).into(),
        ]);
    }
    Ok(r)
}

pub(super) fn walks(cfg: &ExperimentConfig, instances: &[Instance]) -> Result<Report> {
    let mut r = Report::new(
        Suite::Walks,
        cfg.seed,
        &[
            "id",
            "walk",
            "level",
            "states",
            "row_stochastic",
            "reversible",
            "stationary",
            "composition",
            "adjoint",
            "link_decomposition",
            "gap",
            "partner_gap",
            "pass",
        ],
    );
    for inst in instances {
        let wc = &inst.complex;
        if wc.rank() < 2 {
            r.note(format!("{}: rank {} has no walks between levels", inst.id, wc.rank()));
            continue;
        }
        for (kind, k) in walk_levels(wc) {
            let p = walk(wc, kind, k)?;
            let (partner, composition, adjoint, link) = match kind {
                WalkKind::UpDown => {
                    let identity_minus_p = SparseMatrix::identity(p.len()).sub(p.matrix());
                    (
                        walk(wc, WalkKind::DownUp, k + 1)?,
                        *p.matrix() == up_down_by_composition(wc, k)?,
                        adjoint_identity_holds(wc, k)?,
                        Some(identity_minus_p == up_down_link_decomposition(wc, k)?),
                    )
                }
                WalkKind::DownUp => (
                    walk(wc, WalkKind::UpDown, k - 1)?,
                    *p.matrix() == down_up_by_composition(wc, k)?,
                    adjoint_identity_holds(wc, k - 1)?,
                    None,
                ),
            };
            let gap = spectral_gap(&p)?.gap;
            let partner_gap = spectral_gap(&partner)?.gap;
            let exact = p.is_row_stochastic() && p.is_reversible() && p.is_stationary() && composition && adjoint;
            let pass = exact && link.unwrap_or(true) && (gap - partner_gap).abs() <= GAP_TOL;
            r.push(vec![
                inst.id.as_str().into(),
                kind.to_string().into(),
                Cell::count(k),
                Cell::count(p.len()),
                p.is_row_stochastic().into(),
                p.is_reversible().into(),
                p.is_stationary().into(),
                composition.into(),
                adjoint.into(),
                link.map_or(Cell::Missing, Cell::Bool),
                gap.into(),
                partner_gap.into(),
                pass.into(),
            ]);
        }
    }
    Ok(r)
}

fn search_config(cfg: &ExperimentConfig, seed: u64) -> SearchConfig {
    SearchConfig { restarts: cfg.restarts, budget: cfg.budget, seed }
}

fn pi_min(p: &TransitionKernel) -> f64 {
    p.pi_f64().iter().copied().fold(f64::INFINITY, f64::min)
}

pub(super) fn constants(cfg: &ExperimentConfig, instances: &[Instance]) -> Result<Report> {
    let mut r = Report::new(
        Suite::Constants,
        cfg.seed,
        &[
            "id",
            "level",
            "walk",
            "states",
            "lambda",
            "rho_hat",
            "alpha_hat",
            "alpha_indicator",
            "bound_1_over_k",
            "rho_gap",
            "exact_tmix",
            "mlsi_bound",
            "spectral_bound",
            "lsi_bound",
            "sandwich",
            "pass",
        ],
    );
    let seed = seed_of(cfg);
    for (idx, inst) in instances.iter().enumerate() {
        let wc = &inst.complex;
        for (kind, k) in walk_levels(wc) {
            let p = walk(wc, kind, k)?;
            if p.len() < 2 {
                r.note(format!("{}: {kind} walk at level {k} has a single state", inst.id));
                continue;
            }
            let s = search_config(cfg, sub_seed(seed, &[idx as u64, walk_code(kind), k as u64]));
            let lambda = spectral_gap(&p)?.gap;
            let rho = estimate_mlsc(&p, &s)?;
            let alpha = estimate_lsc(&p, &s)?;
            let indicator = alpha_indicator_bound(p.pi_f64())?;
            let lower = 1.0 / kind.mlsi_factor(k) as f64;
            // both estimates are upper bounds, so this only flags optimiser trouble
            let sandwich = rho.value <= 2.0 * lambda + SANDWICH_SLACK
                && 4.0 * alpha.value <= rho.value + SANDWICH_SLACK;
            let mix = exact_mixing_time(&p, cfg.epsilon, MAX_STEPS)?;
            let bounds = compare_bounds(kind.mlsi_factor(k) as f64, Some(lambda), Some(alpha.value), pi_min(&p), cfg.epsilon);
            let pass = rho.value >= lower - SEARCH_TOL;
            if !pass {
                r.note(format!(
                    "{}: {kind} level {k} ratio {} below {lower} at f = {:?}",
                    inst.id, rho.value, rho.witness.values
                ));
            }
            r.push(vec![
                inst.id.as_str().into(),
                Cell::count(k),
                kind.to_string().into(),
                Cell::count(p.len()),
                lambda.into(),
                rho.value.into(),
                alpha.value.into(),
                indicator.into(),
                lower.into(),
                (rho.value - lower).into(),
                mix.exact_t.map_or(Cell::Missing, |t| Cell::Int(t as i64)),
                Cell::opt_float(bounds.mlsi),
                Cell::opt_float(bounds.spectral),
                Cell::opt_float(bounds.lsi),
                sandwich.into(),
                pass.into(),
            ]);
        }
    }
    Ok(r)
}

/// Accumulates one contraction-suite row over many trials.
struct Tally {
    trials: usize,
    worst: f64,
    pass: bool,
}

impl Tally {
    fn new() -> Self {
        Tally { trials: 0, worst: f64::NEG_INFINITY, pass: true }
    }

    fn add(&mut self, violation: f64, ok: bool) {
        self.trials += 1;
        self.worst = self.worst.max(violation);
        self.pass &= ok;
    }

    fn row(self, id: &str, level: usize, check: &str, subject: Cell, tol: f64) -> Vec<Cell> {
        let pass = self.pass && self.worst <= tol;
        vec![
            id.into(),
            Cell::count(level),
            check.into(),
            subject,
            Cell::count(self.trials),
            if self.trials == 0 { Cell::Missing } else { self.worst.into() },
            pass.into(),
        ]
    }
}

fn relative(x: f64, scale: f64) -> f64 {
    x / scale.abs().max(1.0)
}

pub(super) fn contraction(cfg: &ExperimentConfig, instances: &[Instance]) -> Result<Report> {
    let mut r = Report::new(
        Suite::Contraction,
        cfg.seed,
        &["id", "level", "check", "subject", "trials", "worst", "pass"],
    );
    let seed = seed_of(cfg);
    let tol = cfg.tol;
    for (idx, inst) in instances.iter().enumerate() {
        let wc = &inst.complex;
        let id = inst.id.as_str();
        for k in 1..=wc.rank() {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, &[idx as u64, 0, k as u64]));
            let fs = (0..cfg.trials).map(|_| random_level_function(wc, k, &mut rng)).collect::<Result<Vec<_>>>()?;

            let rule = ChainRule::new(wc, k)?;
            r.push(vec![
                id.into(),
                Cell::count(k),
                "mixture-identity".into(),
                Cell::Missing,
                Cell::count(1),
                Cell::Missing,
                rule.mixtures_exact().into(),
            ]);
            let mut chain = Tally::new();
            let mut link_sum = Tally::new();
            for c in par::map_slice(&fs, |f| rule.check(&f.values)) {
                let c = c?;
                let gap = (c.link_part + c.projection_part - c.entropy).abs().max((c.vertex_total - c.entropy).abs());
                chain.add(relative(gap, c.entropy), true);
                link_sum.add(relative(c.entropy / k as f64 - c.link_part, c.entropy), true);
            }
            r.push(chain.row(id, k, "chain-rule", Cell::Missing, tol));
            r.push(link_sum.row(id, k, "link-sum-entropy", Cell::Missing, tol));

            let mut entropy_chain = Tally::new();
            for c in par::map_slice(&fs, |f| verify_entropy_chain(wc, k, f)) {
                let c = c?;
                entropy_chain.add(c.rhs - c.lhs, true);
            }
            r.push(entropy_chain.row(id, k, "entropy-chain", Cell::Missing, tol));

            if k < 2 {
                continue;
            }
            let mut contraction = Tally::new();
            for c in par::map_slice(&fs, |f| verify_entropy_contraction(wc, k, f)) {
                let c = c?;
                contraction.add(c.rhs - c.lhs, true);
            }
            r.push(contraction.row(id, k, "entropy-contraction", Cell::Missing, tol));

            let mut projection = Tally::new();
            for c in par::map_slice(&fs, |f| verify_projection(wc, f)) {
                let c = c?;
                projection.add(c.conditional_error.max(c.normalization_error), true);
            }
            r.push(projection.row(id, k, "projection", Cell::Missing, tol));

            // random starting laws, then every point mass
            let step = OneStepKl::new(wc, k)?;
            let pi = step.kernel().pi_f64();
            let n = pi.len();
            let mut taus: Vec<Vec<f64>> = (0..cfg.trials).map(|_| random_distribution(n, &mut rng)).collect();
            taus.extend((0..n).map(|x| {
                let mut t = vec![0.0; n];
                t[x] = 1.0;
                t
            }));
            let mut one_step = Tally::new();
            let mut down = Tally::new();
            let mut pinsker = Tally::new();
            let outcomes = par::map_slice(&taus, |tau| -> Result<_> {
                let rep = step.check(tau)?;
                let stepped = step.kernel().evolve(tau);
                let mut margin = f64::NEG_INFINITY;
                for t in [tau.as_slice(), stepped.as_slice()] {
                    let kl = kl_divergence(t, pi)?;
                    margin = margin.max(total_variation(t, pi) - (kl / 2.0).sqrt());
                }
                Ok((rep, margin))
            });
            for o in outcomes {
                let (rep, margin) = o?;
                one_step.add(rep.contraction.lhs - rep.contraction.rhs, true);
                down.add(rep.down_entropy.lhs - rep.down_entropy.rhs, rep.expectation_preserved);
                pinsker.add(margin, rep.pinsker);
            }
            r.push(one_step.row(id, k, "one-step-kl", Cell::Missing, tol));
            r.push(down.row(id, k, "down-entropy", Cell::Missing, tol));
            // Pinsker is checked with no slack
            r.push(pinsker.row(id, k, "pinsker", Cell::Missing, 0.0));
        }

        for base in admissible_links(wc) {
            let s = search_config(cfg, sub_seed(seed, &[idx as u64, 1, u64::from(base.0)]));
            let link = verify_link_mlsc(wc, base, &s, cfg.trials)?;
            let subject = Cell::Text(base.to_string());
            let level = base.len();
            r.push(vec![
                id.into(),
                Cell::count(level),
                "link-mlsc".into(),
                subject.clone(),
                Cell::count(cfg.restarts),
                link.search.value.into(),
                link.mlsc_pass.into(),
            ]);
            r.push(vec![
                id.into(),
                Cell::count(level),
                "quadratic-bound".into(),
                subject.clone(),
                Cell::count(link.quadratic_trials),
                link.quadratic_max_excess.into(),
                link.quadratic_pass.into(),
            ]);
            r.push(vec![
                id.into(),
                Cell::count(level),
                "eigenvalue-count".into(),
                subject,
                Cell::count(1),
                Cell::count(link.positive_eigenvalues),
                link.eigenvalue_pass.into(),
            ]);
        }
    }
    Ok(r)
}

pub(super) fn mixing(cfg: &ExperimentConfig, instances: &[Instance]) -> Result<Report> {
    let mut r = Report::new(
        Suite::Mixing,
        cfg.seed,
        &["id", "states", "pi_min", "epsilon", "exact_t", "mlsi_bound", "spectral_bound", "pass"],
    );
    for inst in instances {
        let p = bases_exchange(&inst.complex)?;
        let m = exact_mixing_time(&p, cfg.epsilon, MAX_STEPS)?;
        let spectral = spectral_bound(spectral_gap(&p)?.gap, pi_min(&p), cfg.epsilon);
        let pass = match (m.exact_t, m.bound_t) {
            (None, _) => false,
            (Some(t), Some(b)) => t as f64 <= b,
            (Some(_), None) => true,
        };
        if m.bound_t.is_none() {
            r.note(format!("{}: bound undefined since pi_min >= 1/e", inst.id));
        }
        r.push(vec![
            inst.id.as_str().into(),
            Cell::count(p.len()),
            pi_min(&p).into(),
            cfg.epsilon.into(),
            m.exact_t.map_or(Cell::Missing, |t| Cell::Int(t as i64)),
            Cell::opt_float(m.bound_t),
            Cell::opt_float(spectral),
            pass.into(),
        ]);
    }
    Ok(r)
}

pub(super) fn concentration(cfg: &ExperimentConfig, instances: &[Instance]) -> Result<Report> {
    let mut r = Report::new(
        Suite::Concentration,
        cfg.seed,
        &["id", "observable", "a", "exact_tail", "herbst_two_sided", "v_f", "c", "lipschitz_observed", "pass"],
    );
    for inst in instances {
        let wc = &inst.complex;
        let p = bases_exchange(wc)?;
        for f in example_observables(wc) {
            let t = tail_report(&p, wc.rank(), &f)?;
            if !t.lipschitz.pass {
                r.note(format!("{}: {} moves by {} in one step", inst.id, t.observable, t.lipschitz.observed));
            }
            if !t.variance_within_c2 {
                r.note(format!("{}: {} has one-step variance {} above c^2", inst.id, t.observable, t.v));
            }
            let global = t.lipschitz.pass && t.variance_within_c2;
            for row in &t.rows {
                r.push(vec![
                    inst.id.as_str().into(),
                    t.observable.as_str().into(),
                    row.a.into(),
                    row.exact_tail.into(),
                    row.herbst_two_sided.into(),
                    t.v.into(),
                    Cell::opt_float(t.lipschitz.declared),
                    t.lipschitz.observed.into(),
                    (global && row.pass).into(),
                ]);
            }
        }
    }
    Ok(r)
}

fn inputs(instances: &[Instance], distributions: &[(String, BooleanDistribution)]) -> Vec<(String, BooleanDistribution, Option<WeightedComplex>)> {
    let mut out: Vec<_> = instances
        .iter()
        .map(|i| (i.id.clone(), BooleanDistribution::from_complex(&i.complex), Some(i.complex.clone())))
        .collect();
    out.extend(distributions.iter().map(|(id, mu)| (id.clone(), mu.clone(), None)));
    out
}

pub(super) fn slc(
    cfg: &ExperimentConfig,
    instances: &[Instance],
    distributions: &[(String, BooleanDistribution)],
) -> Result<Report> {
    let mut r = Report::new(
        Suite::Slc,
        cfg.seed,
        &["id", "degree", "bases_checked", "one_positive", "log_concave", "agree", "pair_weights", "slc", "pass"],
    );
    for (id, mu, wc) in inputs(instances, distributions) {
        let rep = slc_check(&mu)?;
        let one_positive = rep.entries.iter().all(|e| e.one_positive);
        let log_concave = rep.entries.iter().all(|e| e.log_concave);
        let agree = rep.entries.iter().all(|e| e.agree());
        let pair_weights = match &wc {
            Some(wc) => {
                let mut ok = true;
                for base in admissible_links(wc) {
                    ok &= hessian_matches_pair_weights(wc, base)?;
                }
                Some(ok)
            }
            None => None,
        };
        if let Some(b) = rep.first_failure {
            r.note(format!("{id}: not strongly log-concave, first failure at partial derivative {b}"));
        }
        if rep.numerical_warning {
            r.note(format!("{id}: eigenvalue near the positivity threshold"));
        }
        r.push(vec![
            id.into(),
            Cell::count(rep.degree),
            Cell::count(rep.entries.len()),
            one_positive.into(),
            log_concave.into(),
            agree.into(),
            pair_weights.map_or(Cell::Missing, Cell::Bool),
            rep.passed.into(),
            (agree && pair_weights.unwrap_or(true)).into(),
        ]);
    }
    Ok(r)
}

pub(super) fn scp(
    cfg: &ExperimentConfig,
    instances: &[Instance],
    distributions: &[(String, BooleanDistribution)],
) -> Result<Report> {
    let mut r = Report::new(
        Suite::Scp,
        cfg.seed,
        &["id", "n", "pairs_checked", "pairs_skipped", "scp", "ncd", "pass"],
    );
    for (id, mu, _) in inputs(instances, distributions) {
        let s = scp_check(&mu)?;
        let c = ncd_check(&mu)?;
        if let Some(p) = s.failure {
            r.note(format!("{id}: covering fails on {} between patterns {} and {}", p.set, p.x, p.y));
        }
        if let Some(w) = &c.witness {
            r.note(format!(
                "{id}: cylinder {:?} on {}: {} > {}",
                w.kind,
                w.set,
                rational::format(&w.lhs),
                rational::format(&w.rhs)
            ));
        }
        r.push(vec![
            id.into(),
            Cell::count(mu.n()),
            Cell::Int(s.pairs_checked as i64),
            Cell::Int(s.pairs_skipped as i64),
            s.passed.into(),
            c.passed.into(),
            (!s.passed || c.passed).into(),
        ]);
    }
    Ok(r)
}

fn theta_row(check: &str, theta: Option<&Ratio>, value: Cell, expected: Cell, pass: bool) -> Vec<Cell> {
    vec![
        check.into(),
        theta.map_or(Cell::Missing, |t| Cell::Text(rational::format(t))),
        value,
        expected,
        pass.into(),
    ]
}

pub(super) fn theta_scan(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new(Suite::ThetaScan, cfg.seed, &["check", "theta", "value", "expected", "pass"]);
    let slc_cases = [(int(0), false), (frac(1, 10), false), (int(1), true), (int(3), true), (int(6), false)];
    for (theta, expected) in &slc_cases {
        let got = slc_check(&theta_family(theta)?)?.passed;
        r.push(theta_row("slc", Some(theta), got.into(), (*expected).into(), got == *expected));
    }
    let scp_cases = [(int(0), true), (frac(1, 10), true), (int(1), true), (int(6), true), (frac(61, 10), false)];
    for (theta, expected) in &scp_cases {
        let mu = theta_family(theta)?;
        let s = scp_check(&mu)?.passed;
        r.push(theta_row("scp", Some(theta), s.into(), (*expected).into(), s == *expected));
        let c = ncd_check(&mu)?.passed;
        let expected_ncd = if s { Cell::Bool(true) } else { Cell::Missing };
        r.push(theta_row("ncd", Some(theta), c.into(), expected_ncd, !s || c));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed_of(cfg), &[u64::MAX]));
    for (theta, expected) in [(int(6), true), (int(1), false)] {
        let rep = srp_quadratic_check(&theta_family(&theta)?, SRP_SAMPLES, &mut rng)?;
        let found = rep.violation.is_some();
        if let Some(v) = &rep.violation {
            r.note(format!(
                "theta {}: quadratic test fails for ({}, {}) at x = {:?}",
                rational::format(&theta),
                v.i,
                v.j,
                v.x
            ));
        }
        r.push(theta_row("srp-violation", Some(&theta), found.into(), expected.into(), found == expected));
    }
    let root2 = 2f64.sqrt();
    for (check, lo, hi, target) in
        [("threshold-low", 0.1, 1.0, 3.0 - 2.0 * root2), ("threshold-high", 1.0, 6.0, 3.0 + 2.0 * root2)]
    {
        let t = theta_threshold(lo, hi, THRESHOLD_TOL / 100.0)?;
        r.push(theta_row(check, None, t.into(), target.into(), (t - target).abs() <= THRESHOLD_TOL));
    }
    Ok(r)
}
