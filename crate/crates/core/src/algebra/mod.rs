//! Finite-dimensional C*-algebras `⊕ᵢ M_{nᵢ}(ℂ)` and concrete tracial positive maps on them.

mod density;
mod element;
mod maps;

pub use density::{kadison_check, normalize_density, DensityElement, DENSITY_FLOOR};
pub use element::{
    operator_block2x2, split_block2x2, AlgebraShape, BlockDiagonalElement, MAX_TOTAL_DIM,
};
pub use maps::{as_scalar, compose_apply, factorize_block_trace, MapKind, TracialMap};
