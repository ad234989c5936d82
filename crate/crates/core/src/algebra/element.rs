use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, HermitianSpectrum};
use crate::scalar::{unit_floor, RealScalar};

/// Largest total dimension `Σ nᵢ` accepted for an algebra.
pub const MAX_TOTAL_DIM: usize = 32;

/// Block sizes `(n₁, …, n_k)` of the algebra `⊕ᵢ M_{nᵢ}(ℂ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct AlgebraShape(Vec<usize>);

impl AlgebraShape {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        let total: usize = block_dims.iter().sum();
        if block_dims.is_empty() || block_dims.contains(&0) || total > MAX_TOTAL_DIM {
            return Err(Error::InvalidShape(block_dims));
        }
        Ok(Self(block_dims))
    }

    /// `(1, 1, …, 1)` with `k` entries: a commutative algebra `ℂ^k`.
    pub fn commutative(k: usize) -> Result<Self> {
        Self::new(vec![1; k])
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.0
    }

    pub fn num_blocks(&self) -> usize {
        self.0.len()
    }

    pub fn total_dim(&self) -> usize {
        self.0.iter().sum()
    }

    /// Shape of `M₂(𝒜)`, i.e. every block doubled.
    pub fn doubled(&self) -> Result<Self> {
        Self::new(self.0.iter().map(|n| 2 * n).collect())
    }

    /// Inverse of [`doubled`](Self::doubled), if every block has even size.
    pub fn halved(&self) -> Option<Self> {
        if self.0.iter().all(|n| n % 2 == 0) {
            Self::new(self.0.iter().map(|n| n / 2).collect()).ok()
        } else {
            None
        }
    }

    /// Parses `"2,2"` into `(2, 2)`.
    pub fn parse(s: &str) -> Result<Self> {
        let dims = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad block size {t:?} in shape {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims)
    }
}

impl TryFrom<Vec<usize>> for AlgebraShape {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<AlgebraShape> for Vec<usize> {
    fn from(s: AlgebraShape) -> Self {
        s.0
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// An element of `⊕ᵢ M_{nᵢ}(ℂ)`, stored block by block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagonalElement<T> {
    shape: AlgebraShape,
    blocks: Vec<ComplexMatrix<T>>,
}

impl<T: RealScalar> BlockDiagonalElement<T> {
    pub fn new(shape: AlgebraShape, blocks: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let dims: Vec<usize> = blocks.iter().map(|b| b.rows()).collect();
        let all_square = blocks.iter().all(|b| b.is_square());
        if !all_square || dims != shape.block_dims() {
            return Err(Error::ShapeMismatch {
                expected: shape.block_dims().to_vec(),
                found: dims,
            });
        }
        if blocks
            .iter()
            .flat_map(|b| b.entries())
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Parse("element entries must be finite".into()));
        }
        Ok(Self { shape, blocks })
    }

    /// A single full matrix algebra `M_n`.
    pub fn single(m: ComplexMatrix<T>) -> Result<Self> {
        let shape = AlgebraShape::new(vec![m.rows()])?;
        Self::new(shape, vec![m])
    }

    pub fn from_fn(shape: &AlgebraShape, mut f: impl FnMut(usize, usize) -> ComplexMatrix<T>) -> Self {
        let blocks = shape.block_dims().iter().enumerate().map(|(i, &n)| f(i, n)).collect();
        Self {
            shape: shape.clone(),
            blocks,
        }
    }

    pub fn zeros(shape: &AlgebraShape) -> Self {
        Self::from_fn(shape, |_, n| ComplexMatrix::zeros(n, n))
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        Self::from_fn(shape, |_, n| ComplexMatrix::identity(n))
    }

    /// Central element `⊕ᵢ cᵢ·I_{nᵢ}`.
    pub fn central(shape: &AlgebraShape, coefficients: &[Complex<T>]) -> Result<Self> {
        if coefficients.len() != shape.num_blocks() {
            return Err(Error::ShapeMismatch {
                expected: shape.block_dims().to_vec(),
                found: vec![coefficients.len()],
            });
        }
        Ok(Self::from_fn(shape, |i, n| {
            ComplexMatrix::identity(n).scale_complex(coefficients[i])
        }))
    }

    /// Diagonal of the commutative algebra `(1, …, 1)` from real values.
    pub fn commutative_from_reals(values: &[T]) -> Result<Self> {
        let shape = AlgebraShape::commutative(values.len())?;
        Ok(Self::from_fn(&shape, |i, _| ComplexMatrix::scalar(values[i])))
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[ComplexMatrix<T>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &ComplexMatrix<T> {
        &self.blocks[i]
    }

    pub fn into_blocks(self) -> Vec<ComplexMatrix<T>> {
        self.blocks
    }

    pub fn map_blocks(&self, f: impl Fn(&ComplexMatrix<T>) -> ComplexMatrix<T>) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    pub fn try_map_blocks(&self, f: impl Fn(&ComplexMatrix<T>) -> Result<ComplexMatrix<T>>) -> Result<Self> {
        Ok(Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn require_shape(&self, shape: &AlgebraShape) -> Result<()> {
        if &self.shape != shape {
            return Err(Error::ShapeMismatch {
                expected: shape.block_dims().to_vec(),
                found: self.shape.block_dims().to_vec(),
            });
        }
        Ok(())
    }

    fn zip_blocks(
        &self,
        other: &Self,
        f: impl Fn(&ComplexMatrix<T>, &ComplexMatrix<T>) -> ComplexMatrix<T>,
    ) -> Result<Self> {
        other.require_shape(&self.shape)?;
        Ok(Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a - b)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a * b)
    }

    /// Product of several elements, left to right.
    pub fn product(factors: &[&Self]) -> Result<Self> {
        let (first, rest) = factors.split_first().expect("at least one factor");
        rest.iter().try_fold((*first).clone(), |acc, f| acc.try_mul(f))
    }

    pub fn scale(&self, s: T) -> Self {
        self.map_blocks(|b| b.scale(s))
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        self.map_blocks(|b| b.scale_complex(s))
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(|b| b.adjoint())
    }

    pub fn real_part(&self) -> Self {
        self.map_blocks(|b| b.hermitize())
    }

    pub fn hermitize(&self) -> Self {
        self.real_part()
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| &(a * b) - &(b * a))
    }

    pub fn frobenius_norm(&self) -> T {
        self.blocks.iter().map(|b| b.frobenius_norm().powi(2)).sum::<T>().sqrt()
    }

    /// `max(1, ‖X‖_F)`.
    pub fn scale_floor(&self) -> T {
        unit_floor(self.frobenius_norm())
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        let defect = self.blocks.iter().map(|b| b.hermitian_defect().powi(2)).sum::<T>().sqrt();
        defect <= tol * self.scale_floor()
    }

    pub fn is_normal(&self, tol: T) -> bool {
        self.blocks.iter().all(|b| b.is_normal(tol))
    }

    /// Every block a multiple of its identity, within `tol · scale`.
    pub fn is_central(&self, tol: T) -> bool {
        self.blocks.iter().all(|b| {
            let n = b.rows();
            let mean = b.trace() / T::from_usize(n).expect("usize fits");
            let dev = (b - &ComplexMatrix::identity(n).scale_complex(mean)).frobenius_norm();
            dev <= tol * self.scale_floor()
        })
    }

    /// Eigendecomposition of every (Hermitian) block.
    pub fn spectra(&self) -> Result<Vec<HermitianSpectrum<T>>> {
        self.blocks.iter().map(eig_hermitian).collect()
    }

    /// Smallest eigenvalue over all blocks.
    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self
            .spectra()?
            .iter()
            .map(|s| s.min())
            .fold(T::infinity(), T::min))
    }

    /// Largest eigenvalue over all blocks: the operator norm of a PSD element.
    pub fn max_eigenvalue(&self) -> Result<T> {
        Ok(self
            .spectra()?
            .iter()
            .map(|s| s.max())
            .fold(T::neg_infinity(), T::max))
    }

    /// `λ_min / max(1, ‖X‖_F)`.
    pub fn normalized_min_eigenvalue(&self) -> Result<T> {
        Ok(self.min_eigenvalue()? / self.scale_floor())
    }

    /// `f` applied blockwise by spectral calculus.
    pub fn apply_function(&self, f: impl Fn(T) -> Result<T>) -> Result<Self> {
        self.try_map_blocks(|b| eig_hermitian(b)?.map(&f))
    }

    /// The same matrix data viewed as one dense block-diagonal matrix.
    pub fn to_dense(&self) -> ComplexMatrix<T> {
        let n = self.shape.total_dim();
        let mut out = ComplexMatrix::zeros(n, n);
        let mut offset = 0;
        for b in &self.blocks {
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    out[(offset + i, offset + j)] = b[(i, j)];
                }
            }
            offset += b.rows();
        }
        out
    }

    /// Block `i` kept, all other blocks zeroed.
    pub fn embed_block(shape: &AlgebraShape, i: usize, m: ComplexMatrix<T>) -> Result<Self> {
        let mut blocks: Vec<ComplexMatrix<T>> =
            shape.block_dims().iter().map(|&n| ComplexMatrix::zeros(n, n)).collect();
        blocks[i] = m;
        Self::new(shape.clone(), blocks)
    }

    pub fn cast<U: RealScalar>(&self) -> BlockDiagonalElement<U> {
        BlockDiagonalElement {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|b| b.cast()).collect(),
        }
    }
}

/// 2×2 operator matrix `[[a, b], [c, d]]` over a block-diagonal codomain,
/// assembled per block as `2nᵢ × 2nᵢ` matrices (a permutation of the full
/// `2d × 2d` assembly, with the same spectrum).
pub fn operator_block2x2<T: RealScalar>(
    a: &BlockDiagonalElement<T>,
    b: &BlockDiagonalElement<T>,
    c: &BlockDiagonalElement<T>,
    d: &BlockDiagonalElement<T>,
) -> Result<BlockDiagonalElement<T>> {
    for x in [b, c, d] {
        x.require_shape(a.shape())?;
    }
    let shape = a.shape().doubled()?;
    let blocks = (0..a.shape().num_blocks())
        .map(|i| ComplexMatrix::block2x2(a.block(i), b.block(i), c.block(i), d.block(i)))
        .collect::<Result<Vec<_>>>()?;
    BlockDiagonalElement::new(shape, blocks)
}

/// Splits every `2n × 2n` block of an element of `M₂(𝒜)` into its four `n × n` corners.
pub fn split_block2x2<T: RealScalar>(
    x: &BlockDiagonalElement<T>,
) -> Result<[BlockDiagonalElement<T>; 4]> {
    let half = x
        .shape()
        .halved()
        .ok_or_else(|| Error::InvalidShape(x.shape().block_dims().to_vec()))?;
    let corner = |r: usize, c: usize| {
        BlockDiagonalElement::from_fn(&half, |i, n| x.block(i).submatrix(r * n, c * n, n, n))
    };
    Ok([corner(0, 0), corner(0, 1), corner(1, 0), corner(1, 1)])
}

impl<T: RealScalar> Add for &BlockDiagonalElement<T> {
    type Output = BlockDiagonalElement<T>;
    fn add(self, rhs: Self) -> BlockDiagonalElement<T> {
        self.try_add(rhs).expect("element add")
    }
}

impl<T: RealScalar> Sub for &BlockDiagonalElement<T> {
    type Output = BlockDiagonalElement<T>;
    fn sub(self, rhs: Self) -> BlockDiagonalElement<T> {
        self.try_sub(rhs).expect("element sub")
    }
}

impl<T: RealScalar> Mul for &BlockDiagonalElement<T> {
    type Output = BlockDiagonalElement<T>;
    fn mul(self, rhs: Self) -> BlockDiagonalElement<T> {
        self.try_mul(rhs).expect("element mul")
    }
}
