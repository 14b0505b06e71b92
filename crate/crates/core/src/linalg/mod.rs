//! Dense complex linear algebra on the truncated joint space.

mod eigen;
mod matrix;
mod ops;

pub use eigen::{
    hermitian_eig, hermitian_eig_range, hermitian_eigvals, EigenSystem, DEFAULT_TOL, QL_ITERATION_CAP,
};
pub use matrix::{basis_vector, inner, norm, normalize, ComplexMatrix, C64, I, ONE, ZERO};
pub use ops::{commutator_deviation, expectation, expectation_complex, kron, EXPECTATION_IMAG_TOL};
