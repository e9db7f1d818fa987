//! Complex linear algebra used throughout the crate.

mod dense;
mod lanczos;
mod matrix;
mod ops;
pub mod random;

pub use dense::{
    connected_blocks, eig_hermitian_dense, eigvals_hermitian_dense, hermitian_null_space,
    hermitian_pd_inverse, singular_values, DENSE_CAP, HERMITIAN_TOL,
};
pub use lanczos::{
    deflated_lowest, lanczos_extreme, op_two_norm, smallest_nonzero_deflated, Extreme, RitzPair,
};
pub use matrix::{axpy, inner, norm, ComplexMatrix, StateVector};
pub use ops::{apply_on_sites, embed_operator, orthonormalize, partial_trace, projector, site_bit};

pub use num_complex::Complex64 as C64;
