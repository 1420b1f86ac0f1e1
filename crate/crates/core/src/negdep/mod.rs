//! Boolean distributions, their generating polynomials, and checkers for
//! strong log-concavity, the quadratic strong Rayleigh inequality, the
//! stochastic covering property and negative cylinder dependence.

mod covering;
mod distribution;
mod ncd;
mod slc;

pub use covering::{covers, scp_check, stochastic_covering, ScpPair, ScpReport, SCP_MAX_N, SKIPPED_LIST_CAP};
pub use distribution::{theta_family, BooleanDistribution, GeneratingPolynomial};
pub use ncd::{ncd_check, CylinderKind, NcdReport, NcdWitness, NCD_MAX_N};
pub use slc::{
    hessian_matches_pair_weights, partial_derivative_hessian, slc_check, srp_quadratic_check, theta_threshold,
    PartialHessian, SlcEntry, SlcReport, SrpReport, SrpViolation, EIGEN_TOL,
};

use crate::rational::{self, Ratio};

pub(crate) fn serialize_ratio<S: serde::Serializer>(x: &Ratio, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(x))
}
