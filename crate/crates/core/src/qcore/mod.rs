//! Dense complex linear algebra and density-operator primitives.

mod eig;
mod matrix;
mod state;
pub mod states;

pub use eig::{eig_hermitian, eigvals_hermitian, hermitian_tolerance, Eigen};
pub use matrix::{inner, kron_vec, pauli, tensor_product, vec_norm, CMatrix, C64};
pub use state::{
    entropy_of_spectrum, partial_trace, schmidt_decomposition, validate_density,
    von_neumann_entropy, BipartiteState, PureState, Schmidt, Subsystem, ENTROPY_FLOOR,
};
