//! Dense, sparse and iterative symmetric eigensolvers, and the exact-spectrum oracle.

pub mod dense;
pub mod exact;
pub mod lanczos;
pub mod matrix;
pub mod sparse;

pub use dense::{diagonalize_lowest, diagonalize_symmetric, symmetric_eigenvalues, EigenDecomposition};
pub use exact::{
    dense_hamiltonian, exact_levels, exact_spectrum, exact_spectrum_with, ExactMethod,
    ExactOptions, ExactSpectrum, TransverseFieldOperator,
};
pub use lanczos::{lowest_eigenpairs, LanczosOptions, LinearOperator};
pub use matrix::Matrix;
pub use sparse::SparseSymmetric;
