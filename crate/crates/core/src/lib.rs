//! Weighted matroid complexes and the random walks on their level sets.
//!
//! The crate materialises, at desk scale, the objects around the
//! bases-exchange walk of a weighted matroid: the recursive weight table,
//! the up/down operators and the walks they compose into, entropy and
//! Dirichlet functionals, estimates of the modified log-Sobolev constant,
//! exact total-variation mixing times, concentration bounds, and checkers
//! for strong log-concavity and related negative-dependence properties.
//!
//! Weights, stationary distributions and transition probabilities are kept
//! as exact rationals; conversion to `f64` happens only where functionals
//! and spectra are evaluated.

// `!(x >= 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod concentration;
pub mod entropy;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod mask;
pub mod matroid;
pub mod negdep;
pub mod par;
pub mod walks;
pub mod rational;

pub use error::{Error, Result};
pub use mask::{GroundSet, SubsetMask};
pub use rational::Ratio;
