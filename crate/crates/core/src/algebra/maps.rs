use std::fmt;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::element::{split_block2x2, AlgebraShape, BlockDiagonalElement};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, STRICT_POSITIVITY_TOL};
use crate::scalar::RealScalar;

/// A concrete tracial positive linear map `Φ : 𝒜 → ℬ` between block-diagonal algebras.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "crate::json::MapJson", into = "crate::json::MapJson")]
pub enum TracialMap {
    /// `X ↦ Σᵢ Tr(Xᵢ)` into `ℂ`.
    ScalarTrace(AlgebraShape),
    /// `X ↦ diag(Tr X₁, …, Tr X_k)` into the commutative algebra `ℂ^k`.
    BlockTrace(AlgebraShape),
    /// `X ↦ ⊕ᵢ (Tr Xᵢ / nᵢ)·I_{nᵢ}`: the unital tracial conditional expectation onto the center.
    CenterExpectation(AlgebraShape),
    /// `Ψ([[A, B], [C, D]]) = [[(Φ(A) + Φ(D))/2, 0], [0, 0]]` on `M₂(𝒜)`.
    Doubling(Box<TracialMap>),
}

/// Variant tag without the shape payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    ScalarTrace,
    BlockTrace,
    CenterExpectation,
    Doubling,
}

impl MapKind {
    pub const ALL: [MapKind; 4] = [
        MapKind::ScalarTrace,
        MapKind::BlockTrace,
        MapKind::CenterExpectation,
        MapKind::Doubling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapKind::ScalarTrace => "scalar_trace",
            MapKind::BlockTrace => "block_trace",
            MapKind::CenterExpectation => "center_expectation",
            MapKind::Doubling => "doubling",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown map kind {s:?}")))
    }

    /// The map of this kind acting on `shape`. `Doubling` wraps a block trace on
    /// `shape`, so its own domain is `shape` doubled.
    pub fn build(self, shape: &AlgebraShape) -> Result<TracialMap> {
        Ok(match self {
            MapKind::ScalarTrace => TracialMap::ScalarTrace(shape.clone()),
            MapKind::BlockTrace => TracialMap::BlockTrace(shape.clone()),
            MapKind::CenterExpectation => TracialMap::CenterExpectation(shape.clone()),
            MapKind::Doubling => {
                shape.doubled()?;
                TracialMap::Doubling(Box::new(TracialMap::BlockTrace(shape.clone())))
            }
        })
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl TracialMap {
    pub fn kind(&self) -> MapKind {
        match self {
            TracialMap::ScalarTrace(_) => MapKind::ScalarTrace,
            TracialMap::BlockTrace(_) => MapKind::BlockTrace,
            TracialMap::CenterExpectation(_) => MapKind::CenterExpectation,
            TracialMap::Doubling(_) => MapKind::Doubling,
        }
    }

    pub fn doubling(inner: TracialMap) -> Result<Self> {
        inner.domain_shape().doubled()?;
        Ok(TracialMap::Doubling(Box::new(inner)))
    }

    pub fn domain_shape(&self) -> AlgebraShape {
        match self {
            TracialMap::ScalarTrace(s) | TracialMap::BlockTrace(s) | TracialMap::CenterExpectation(s) => {
                s.clone()
            }
            TracialMap::Doubling(inner) => inner
                .domain_shape()
                .doubled()
                .expect("validated at construction"),
        }
    }

    pub fn codomain_shape(&self) -> AlgebraShape {
        match self {
            TracialMap::ScalarTrace(_) => AlgebraShape::commutative(1).expect("valid"),
            TracialMap::BlockTrace(s) => AlgebraShape::commutative(s.num_blocks()).expect("valid"),
            TracialMap::CenterExpectation(s) => s.clone(),
            TracialMap::Doubling(inner) => inner
                .codomain_shape()
                .doubled()
                .expect("codomain no larger than domain"),
        }
    }

    /// Whether `Φ(𝒜)` is a commutative subset of the codomain.
    pub fn has_commutative_range(&self) -> bool {
        match self {
            TracialMap::ScalarTrace(_) | TracialMap::BlockTrace(_) | TracialMap::CenterExpectation(_) => true,
            TracialMap::Doubling(inner) => inner.has_commutative_range(),
        }
    }

    /// Evaluates `Φ(X)`.
    pub fn apply<T: RealScalar>(&self, x: &BlockDiagonalElement<T>) -> Result<BlockDiagonalElement<T>> {
        x.require_shape(&self.domain_shape())?;
        match self {
            TracialMap::ScalarTrace(_) => {
                let total = x.blocks().iter().fold(Complex::zero(), |acc, b| acc + b.trace());
                BlockDiagonalElement::single(ComplexMatrix::one_by_one(total))
            }
            TracialMap::BlockTrace(s) => {
                let shape = AlgebraShape::commutative(s.num_blocks())?;
                Ok(BlockDiagonalElement::from_fn(&shape, |i, _| {
                    ComplexMatrix::one_by_one(x.block(i).trace())
                }))
            }
            TracialMap::CenterExpectation(s) => Ok(BlockDiagonalElement::from_fn(s, |i, n| {
                let mean = x.block(i).trace() / T::from_usize(n).expect("usize fits");
                ComplexMatrix::identity(n).scale_complex(mean)
            })),
            TracialMap::Doubling(inner) => {
                let [a, _, _, d] = split_block2x2(x)?;
                let y = inner.apply(&a)?.try_add(&inner.apply(&d)?)?.scale(T::lit(0.5));
                let zero = BlockDiagonalElement::zeros(y.shape());
                super::element::operator_block2x2(&y, &zero, &zero, &zero)
            }
        }
    }

    /// The unit of the corner of the codomain that contains `Φ(𝒜)`.
    ///
    /// This is the codomain identity for every kind except `Doubling`, whose range
    /// sits in the upper-left corner `e₁₁ ⊗ ℬ`.
    pub fn codomain_unit<T: RealScalar>(&self) -> BlockDiagonalElement<T> {
        match self {
            TracialMap::Doubling(inner) => {
                let u = inner.codomain_unit::<T>();
                let zero = BlockDiagonalElement::zeros(u.shape());
                super::element::operator_block2x2(&u, &zero, &zero, &zero).expect("shapes agree")
            }
            _ => BlockDiagonalElement::identity(&self.codomain_shape()),
        }
    }

    /// Inverse of a strictly positive element of the range corner, taken in that
    /// corner: `(Y + (1 − P))⁻¹ − (1 − P)` where `P` is the corner unit.
    ///
    /// Fails with [`Error::SingularNormalizer`] when `Y` restricted to the corner has
    /// smallest eigenvalue at or below `1e-10 · max(1, ‖Y‖_F)`.
    pub fn codomain_inverse<T: RealScalar>(
        &self,
        y: &BlockDiagonalElement<T>,
        what: &str,
    ) -> Result<BlockDiagonalElement<T>> {
        y.require_shape(&self.codomain_shape())?;
        let unit = self.codomain_unit::<T>();
        let complement = BlockDiagonalElement::identity(unit.shape()).try_sub(&unit)?;
        let lifted = y.hermitize().try_add(&complement)?;
        let threshold = T::tol(STRICT_POSITIVITY_TOL) * y.scale_floor();
        let mut blocks = Vec::with_capacity(lifted.shape().num_blocks());
        for b in lifted.blocks() {
            let spectrum = eig_hermitian(b)?;
            if spectrum.min() <= threshold {
                return Err(Error::SingularNormalizer {
                    what: what.to_string(),
                    min_eigenvalue: spectrum.min().as_f64(),
                });
            }
            let inv: Vec<T> = spectrum.eigenvalues().iter().map(|&l| T::one() / l).collect();
            blocks.push(spectrum.synthesize(&inv));
        }
        BlockDiagonalElement::new(lifted.shape().clone(), blocks)?.try_sub(&complement)
    }

    /// Restricts `X` to the corner holding `Φ(𝒜)`: for `Doubling`, the upper-left
    /// corner of every block of a codomain element, or of every entry of a 2×2
    /// operator matrix over the codomain. Other elements pass through unchanged.
    pub fn compress_to_range<T: RealScalar>(&self, x: &BlockDiagonalElement<T>) -> Result<BlockDiagonalElement<T>> {
        let TracialMap::Doubling(_) = self else {
            return Ok(x.clone());
        };
        let codomain = self.codomain_shape();
        let corner = |y: &BlockDiagonalElement<T>| split_block2x2(y).map(|[c, ..]| c);
        if x.shape() == &codomain {
            corner(x)
        } else if x.shape() == &codomain.doubled()? {
            let [a, b, c, d] = split_block2x2(x)?;
            super::element::operator_block2x2(&corner(&a)?, &corner(&b)?, &corner(&c)?, &corner(&d)?)
        } else {
            Ok(x.clone())
        }
    }

    /// Per-block scale factors `cᵢ` such that `Φ(⊕ᵢ cᵢ Pᵢ)` is the codomain unit.
    pub(crate) fn density_scales<T: RealScalar>(&self, p: &BlockDiagonalElement<T>, floor: T) -> Result<Vec<T>> {
        p.require_shape(&self.domain_shape())?;
        let traces: Vec<T> = p.blocks().iter().map(|b| b.trace().re).collect();
        match self {
            TracialMap::ScalarTrace(_) => {
                let total: T = traces.iter().copied().sum();
                if total < floor {
                    return Err(Error::DegenerateBlock {
                        block: 0,
                        trace: total.as_f64(),
                        floor: floor.as_f64(),
                    });
                }
                Ok(vec![T::one() / total; traces.len()])
            }
            TracialMap::BlockTrace(s) | TracialMap::CenterExpectation(s) => {
                let centered = matches!(self, TracialMap::CenterExpectation(_));
                traces
                    .iter()
                    .zip(s.block_dims())
                    .enumerate()
                    .map(|(i, (&t, &n))| {
                        if t < floor {
                            return Err(Error::DegenerateBlock {
                                block: i,
                                trace: t.as_f64(),
                                floor: floor.as_f64(),
                            });
                        }
                        let n = if centered { T::from_usize(n).expect("usize fits") } else { T::one() };
                        Ok(n / t)
                    })
                    .collect()
            }
            TracialMap::Doubling(inner) => {
                // Ψ(X) = e₁₁ ⊗ Φ((X₁₁ + X₂₂)/2), and scaling block i of X scales
                // block i of the partial trace identically.
                let [a, _, _, d] = split_block2x2(p)?;
                let reduced = a.try_add(&d)?.scale(T::lit(0.5));
                inner.density_scales(&reduced, floor)
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            TracialMap::Doubling(inner) => format!("doubling[{}]", inner.name()),
            _ => format!("{}{}", self.kind().name(), self.domain_shape()),
        }
    }
}

impl fmt::Display for TracialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Factors a block (or scalar) trace through a commutative algebra: `Φ = φ₂ ∘ φ₁`
/// with `φ₁ : 𝒜 → ℂ^k` the same trace and `φ₂ : ℂ^k → ℬ` the identity embedding
/// (realized as the center expectation on `(1, …, 1)`, which is the identity there).
pub fn factorize_block_trace(phi: &TracialMap) -> Result<(TracialMap, TracialMap)> {
    match phi {
        TracialMap::BlockTrace(_) | TracialMap::ScalarTrace(_) => {
            let phi2 = TracialMap::CenterExpectation(phi.codomain_shape());
            Ok((phi.clone(), phi2))
        }
        other => Err(Error::WrongKind {
            expected: "block_trace".into(),
            found: other.kind().name().into(),
        }),
    }
}

/// `φ₂(φ₁(X))`.
pub fn compose_apply<T: RealScalar>(
    phi2: &TracialMap,
    phi1: &TracialMap,
    x: &BlockDiagonalElement<T>,
) -> Result<BlockDiagonalElement<T>> {
    phi2.apply(&phi1.apply(x)?)
}

/// Scalar helper: the unique entry of a `1×1` single-block element.
pub fn as_scalar<T: RealScalar>(x: &BlockDiagonalElement<T>) -> Option<Complex<T>> {
    (x.shape().block_dims() == [1]).then(|| x.block(0)[(0, 0)])
}

impl<T: RealScalar> BlockDiagonalElement<T> {
    /// Frobenius distance to another element, `∞` on shape mismatch.
    pub fn distance(&self, other: &Self) -> T {
        self.try_sub(other).map_or(T::infinity(), |d| d.frobenius_norm())
    }

    pub fn is_unit_of(&self, map: &TracialMap, tol: T) -> bool {
        self.distance(&map.codomain_unit()) <= tol
    }
}
