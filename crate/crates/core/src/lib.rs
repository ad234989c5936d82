//! Generalized covariance, variance, correlation and Wigner–Yanase–Dyson skew
//! information for tracial positive maps on finite-dimensional C*-algebras,
//! with randomized checkers for the inequalities relating them.

pub mod algebra;
pub mod campaign;
pub mod checks;
pub mod error;
pub mod functions;
pub mod instances;
pub mod json;
pub mod linalg;
pub mod measures;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::RealScalar;

pub type Matrix = linalg::ComplexMatrix<f64>;
pub type Element = algebra::BlockDiagonalElement<f64>;
pub type Density = algebra::DensityElement<f64>;
pub type Context = measures::MeasureContext<f64>;
pub type Spectrum = linalg::HermitianSpectrum<f64>;
