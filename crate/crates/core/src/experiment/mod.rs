//! Named experiment suites over a set of instances, producing tabular
//! reports with a single overall verdict.

mod catalog;
mod report;
mod suites;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::negdep::BooleanDistribution;

pub use catalog::{bundled, hypercube, load_instances, parse_instances, Instance};
pub use report::{Cell, Format, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Axioms,
    Walks,
    Constants,
    Contraction,
    Mixing,
    Concentration,
    Slc,
    Scp,
    ThetaScan,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Axioms,
        Suite::Walks,
        Suite::Constants,
        Suite::Contraction,
        Suite::Mixing,
        Suite::Concentration,
        Suite::Slc,
        Suite::Scp,
        Suite::ThetaScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Walks => "walks",
            Suite::Constants => "constants",
            Suite::Contraction => "contraction",
            Suite::Mixing => "mixing",
            Suite::Concentration => "concentration",
            Suite::Slc => "slc",
            Suite::Scp => "scp",
            Suite::ThetaScan => "theta-scan",
        }
    }

    /// Suites that draw random numbers and so need a seed.
    pub fn is_randomized(self) -> bool {
        matches!(self, Suite::Constants | Suite::Contraction | Suite::ThetaScan)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub seed: Option<u64>,
    /// Restarts for every infimum search.
    pub restarts: usize,
    /// Descent iterations per restart.
    pub budget: usize,
    pub epsilon: f64,
    /// Slack for the entropy identities and inequalities.
    pub tol: f64,
    /// Random functions or distributions per instance and level.
    pub trials: usize,
}

impl ExperimentConfig {
    pub fn new(suite: Suite) -> Self {
        ExperimentConfig { suite, seed: None, restarts: 200, budget: 200, epsilon: 0.25, tol: 1e-10, trials: 1000 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.suite.is_randomized() && self.seed.is_none() {
            return Err(Error::InvalidArgument(format!("suite {} needs a seed", self.suite)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be non-negative, got {}", self.tol)));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("need at least one restart".into()));
        }
        Ok(())
    }
}

/// Runs one suite. `distributions` are extra inputs for the `slc` and `scp`
/// suites, checked alongside the basis distributions of `instances`.
pub fn run(cfg: &ExperimentConfig, instances: &[Instance], distributions: &[(String, BooleanDistribution)]) -> Result<Report> {
    cfg.validate()?;
    match cfg.suite {
        Suite::Axioms => suites::axioms(cfg, instances),
        Suite::Walks => suites::walks(cfg, instances),
        Suite::Constants => suites::constants(cfg, instances),
        Suite::Contraction => suites::contraction(cfg, instances),
        Suite::Mixing => suites::mixing(cfg, instances),
        Suite::Concentration => suites::concentration(cfg, instances),
        Suite::Slc => suites::slc(cfg, instances, distributions),
        Suite::Scp => suites::scp(cfg, instances, distributions),
        Suite::ThetaScan => suites::theta_scan(cfg),
    }
}

/// Process exit status for a finished run: 0 pass, 1 failed assertion.
pub fn exit_code(report: &Report) -> i32 {
    if report.passed {
        0
    } else {
        1
    }
}

/// Process exit status for a run that did not produce a report.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::SizeCap(_) => 3,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn seed_required() {
        let cfg = ExperimentConfig::new(Suite::Constants);
        assert!(run(&cfg, &bundled(), &[]).is_err());
        assert!(ExperimentConfig::new(Suite::Axioms).validate().is_ok());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(error_exit_code(&Error::SizeCap(String::new())), 3);
        assert_eq!(error_exit_code(&Error::Parse(String::new())), 2);
        let mut r = Report::new(Suite::Mixing, None, &["id", "pass"]);
        r.push(vec!["a".into(), true.into()]);
        assert_eq!(exit_code(&r), 0);
        r.push(vec!["b".into(), false.into()]);
        assert_eq!(exit_code(&r), 1);
    }
}
