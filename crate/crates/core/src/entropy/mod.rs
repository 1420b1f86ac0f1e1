//! Entropy and Dirichlet functionals, spectral gaps, infimum searches for
//! the log-Sobolev constants, entropy-contraction checks and mixing times.

mod contraction;
mod functionals;
mod mixing;
mod search;
mod spectral;

pub use contraction::{
    admissible_links, random_distribution, random_level_function, random_positive, verify_chain_rule,
    verify_entropy_chain, verify_entropy_contraction, verify_link_mlsc, verify_one_step_kl, verify_projection,
    ChainRule, ChainRuleReport, InequalityCheck, LinkReport, OneStepKl, OneStepReport, ProjectionCheck,
    ENTROPY_TOL, QUADRATIC_TOL, SEARCH_TOL,
};
pub use functionals::{
    dirichlet, dirichlet_symmetric, entropy, entropy_direct, expectation, kl_divergence, pinsker_holds,
    total_variation, variance,
};
pub use mixing::{
    compare_bounds, exact_mixing_time, lsi_bound, mlsi_bound, spectral_bound, tv_from_each_start, worst_case_tv,
    BoundComparison, MixingResult, MAX_MIXING_STATES,
};
pub use search::{
    alpha_indicator_bound, estimate_constant, estimate_lsc, estimate_mlsc, functional_ratio, Functional,
    FunctionalReport, SearchConfig,
};
pub use spectral::{spectral_gap, SpectralGap};
