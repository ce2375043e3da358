//! Exact Lie algebra kernel.

mod algebra;
pub mod builtins;
pub mod json;
mod roots;
mod subspace;

pub use algebra::LieAlgebra;
pub use roots::{root_decomposition, LinearFunctional, RootDecomposition};
pub use subspace::Subspace;
