//! Up and down operators, the walks they compose into, and samplers.

mod function;
mod kernel;
mod operators;
mod sampler;
mod sparse;

pub use function::{push_down, LevelFunction};
pub use kernel::{TransitionKernel, WalkKind};
pub use operators::{
    adjoint_identity_holds, bases_exchange, down_operator, down_up_by_composition, down_up_walk,
    up_down_by_composition, up_down_link_decomposition, up_down_walk, up_operator, walk,
    RectangularOperator,
};
pub use sampler::{sample_step, Sampler};
pub use sparse::SparseMatrix;
