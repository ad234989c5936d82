//! Dense complex linear algebra: matrices, Hermitian eigendecomposition,
//! spectral calculus and Loewner-order tests.

mod eigen;
mod matrix;

pub use eigen::{
    apply_function, block_psd_margin, eig_hermitian, inverse_strictly_positive, is_psd,
    min_eigenvalue, normalized_min_eigenvalue, reconstruction_error, schur_psd_check,
    unitarity_defect, HermitianSpectrum, SchurCheck, CONVERGENCE_TOL, MAX_SWEEPS, PSD_TOL,
    STRICT_POSITIVITY_TOL,
};
pub use matrix::{pauli, ComplexMatrix};
