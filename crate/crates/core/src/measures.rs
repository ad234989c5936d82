//! Generalized covariance, variance, correlation and skew information of a
//! Hermitian `ρ` with respect to a tracial positive map and a function pair.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use crate::algebra::{BlockDiagonalElement, TracialMap};
use crate::error::{Error, Result};
use crate::functions::{FunctionPair, SameMonotone, ScalarFunction};
use crate::linalg::{eig_hermitian, ComplexMatrix, HermitianSpectrum};
use crate::scalar::RealScalar;

/// Eigenvalues of `ρ` in `[−SNAP_TOL·max(1, ‖ρ‖_F), 0)` are read as `0` by functions
/// defined only on `x ≥ 0`.
pub const SNAP_TOL: f64 = 1e-12;

/// Relative gap below which neighbouring eigenvalues share one spectral projection.
pub const CLUSTER_TOL: f64 = 1e-8;

/// A fixed `(Φ, ρ, f, g)` with the spectral data of `ρ` computed once.
#[derive(Debug, Clone)]
pub struct MeasureContext<T> {
    map: TracialMap,
    rho: BlockDiagonalElement<T>,
    pair: FunctionPair,
    spectra: Arc<Vec<HermitianSpectrum<T>>>,
    f_rho: BlockDiagonalElement<T>,
    g_rho: BlockDiagonalElement<T>,
    fg_rho: BlockDiagonalElement<T>,
    snap: T,
    waived: bool,
}

impl<T: RealScalar> MeasureContext<T> {
    pub fn new(map: TracialMap, rho: BlockDiagonalElement<T>, pair: FunctionPair) -> Result<Self> {
        rho.require_shape(&map.domain_shape())?;
        let rho = BlockDiagonalElement::new(
            rho.shape().clone(),
            rho.blocks().iter().map(|b| b.checked_hermitian()).collect::<Result<_>>()?,
        )?;
        let spectra = rho.blocks().iter().map(eig_hermitian).collect::<Result<Vec<_>>>()?;
        Self::assemble(map, rho, pair, Arc::new(spectra), false)
    }

    fn assemble(
        map: TracialMap,
        rho: BlockDiagonalElement<T>,
        pair: FunctionPair,
        spectra: Arc<Vec<HermitianSpectrum<T>>>,
        waived: bool,
    ) -> Result<Self> {
        let snap = T::lit(SNAP_TOL) * rho.scale_floor();
        let mut ctx = Self {
            f_rho: BlockDiagonalElement::zeros(rho.shape()),
            g_rho: BlockDiagonalElement::zeros(rho.shape()),
            fg_rho: BlockDiagonalElement::zeros(rho.shape()),
            map,
            rho,
            pair,
            spectra,
            snap,
            waived,
        };
        ctx.f_rho = ctx.function_of_rho(&ctx.pair.f)?;
        ctx.g_rho = ctx.function_of_rho(&ctx.pair.g)?;
        ctx.fg_rho = ctx.function_of_rho(&ctx.pair.product())?;
        Ok(ctx)
    }

    /// Same `Φ` and `ρ`, different functions; the eigendecomposition is reused.
    pub fn with_pair(&self, pair: FunctionPair) -> Result<Self> {
        Self::assemble(self.map.clone(), self.rho.clone(), pair, Arc::clone(&self.spectra), self.waived)
    }

    /// Lets same-monotone checkers run on a pair that fails the certificate, so
    /// that violations can be observed.
    pub fn waive_same_monotone(mut self) -> Self {
        self.waived = true;
        self
    }

    pub fn same_monotone_waived(&self) -> bool {
        self.waived
    }

    pub fn map(&self) -> &TracialMap {
        &self.map
    }

    pub fn rho(&self) -> &BlockDiagonalElement<T> {
        &self.rho
    }

    pub fn pair(&self) -> &FunctionPair {
        &self.pair
    }

    pub fn spectra(&self) -> &[HermitianSpectrum<T>] {
        &self.spectra
    }

    pub fn f_rho(&self) -> &BlockDiagonalElement<T> {
        &self.f_rho
    }

    pub fn g_rho(&self) -> &BlockDiagonalElement<T> {
        &self.g_rho
    }

    /// All eigenvalues of `ρ`, block by block.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spectra
            .iter()
            .flat_map(|s| s.eigenvalues().iter().map(|x| x.as_f64()))
            .collect()
    }

    fn snapped(&self, h: &ScalarFunction, x: T) -> T {
        if x < T::zero() && x >= -self.snap && h.wants_nonnegative() {
            T::zero()
        } else {
            x
        }
    }

    fn eval_at(&self, h: &ScalarFunction, x: T) -> Result<T> {
        h.eval(self.snapped(h, x))
    }

    /// `h(ρ)` by spectral calculus.
    pub fn function_of_rho(&self, h: &ScalarFunction) -> Result<BlockDiagonalElement<T>> {
        let blocks = self
            .spectra
            .iter()
            .map(|s| s.map(|x| self.eval_at(h, x)))
            .collect::<Result<Vec<_>>>()?;
        BlockDiagonalElement::new(self.rho.shape().clone(), blocks)
    }

    pub fn phi(&self, x: &BlockDiagonalElement<T>) -> Result<BlockDiagonalElement<T>> {
        self.map.apply(x)
    }

    /// `Φ` of an ordered product.
    pub fn phi_of(&self, factors: &[&BlockDiagonalElement<T>]) -> Result<BlockDiagonalElement<T>> {
        self.map.apply(&BlockDiagonalElement::product(factors)?)
    }

    /// Errors with [`Error::NotSameMonotone`] unless the pair is certified on the
    /// spectrum of `ρ` or the requirement has been waived.
    pub fn require_same_monotone(&self) -> Result<Option<SameMonotone>> {
        if self.waived {
            return Ok(None);
        }
        let values: Vec<f64> = self
            .spectra
            .iter()
            .flat_map(|s| s.eigenvalues().iter().map(|&x| self.snapped(&self.pair.f, x).as_f64()))
            .collect();
        self.pair.certify_same_monotone(&values).map(Some)
    }

    /// Requires `f > 0` and `g > 0` on the spectrum of `ρ`.
    pub fn require_positive_functions(&self) -> Result<()> {
        for s in self.spectra.iter() {
            for &x in s.eigenvalues() {
                for h in [&self.pair.f, &self.pair.g] {
                    let v = self.eval_at(h, x)?;
                    if v <= T::zero() {
                        return Err(Error::Precondition(format!(
                            "{h} is not positive at eigenvalue {:e}",
                            x.as_f64()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `Φ(f(ρ)A*B) − Φ(f(ρ)g(ρ)A*) Φ(f(ρ)g(ρ)²)⁻¹ Φ(f(ρ)g(ρ)B)`.
    pub fn covariance(&self, a: &BlockDiagonalElement<T>, b: &BlockDiagonalElement<T>) -> Result<BlockDiagonalElement<T>> {
        let fg2 = self.function_of_rho(&ScalarFunction::product(self.pair.product(), self.pair.g.clone()))?;
        let normalizer = self.map.codomain_inverse(&self.phi(&fg2)?, "Φ(f(ρ)g(ρ)²)")?;
        let a_star = a.adjoint();
        let first = self.phi_of(&[&self.f_rho, &a_star, b])?;
        let left = self.phi_of(&[&self.fg_rho, &a_star])?;
        let right = self.phi_of(&[&self.fg_rho, b])?;
        first.try_sub(&BlockDiagonalElement::product(&[&left, &normalizer, &right])?)
    }

    pub fn variance(&self, a: &BlockDiagonalElement<T>) -> Result<BlockDiagonalElement<T>> {
        self.covariance(a, a)
    }

    /// `Φ(f(ρ)g(ρ)A*B) − Φ(f(ρ)A*g(ρ)B)`.
    pub fn correlation(&self, a: &BlockDiagonalElement<T>, b: &BlockDiagonalElement<T>) -> Result<BlockDiagonalElement<T>> {
        let a_star = a.adjoint();
        let first = self.phi_of(&[&self.fg_rho, &a_star, b])?;
        let second = self.phi_of(&[&self.f_rho, &a_star, &self.g_rho, b])?;
        first.try_sub(&second)
    }

    pub fn skew_information(&self, a: &BlockDiagonalElement<T>) -> Result<BlockDiagonalElement<T>> {
        self.correlation(a, a)
    }

    /// `½(Corr(A, B) + Corr(B*, A*))`.
    pub fn symmetric_correlation(
        &self,
        a: &BlockDiagonalElement<T>,
        b: &BlockDiagonalElement<T>,
    ) -> Result<BlockDiagonalElement<T>> {
        let forward = self.correlation(a, b)?;
        let backward = self.correlation(&b.adjoint(), &a.adjoint())?;
        Ok(forward.try_add(&backward)?.scale(T::lit(0.5)))
    }

    pub fn symmetric_skew(&self, a: &BlockDiagonalElement<T>) -> Result<BlockDiagonalElement<T>> {
        self.symmetric_correlation(a, a)
    }

    /// The correlation written as `Σᵢⱼ (fᵢgᵢ − fᵢgⱼ) Φ(Eᵢ A* Eⱼ B)` over the spectral
    /// projections `Eᵢ` of `ρ`. Shares no matrix functions with [`Self::correlation`].
    pub fn spectral_sum_correlation(
        &self,
        a: &BlockDiagonalElement<T>,
        b: &BlockDiagonalElement<T>,
    ) -> Result<BlockDiagonalElement<T>> {
        a.require_shape(self.rho.shape())?;
        b.require_shape(self.rho.shape())?;
        let mut blocks = Vec::with_capacity(self.spectra.len());
        for (i, spectrum) in self.spectra.iter().enumerate() {
            let n = spectrum.dim();
            let clusters = spectrum.eigenprojections(T::lit(CLUSTER_TOL));
            let mut fs = Vec::with_capacity(clusters.len());
            let mut gs = Vec::with_capacity(clusters.len());
            for (lambda, _) in &clusters {
                fs.push(self.eval_at(&self.pair.f, *lambda)?);
                gs.push(self.eval_at(&self.pair.g, *lambda)?);
            }
            let a_star = a.block(i).adjoint();
            let left: Vec<ComplexMatrix<T>> = clusters.iter().map(|(_, e)| e * &a_star).collect();
            let right: Vec<ComplexMatrix<T>> = clusters.iter().map(|(_, e)| e * b.block(i)).collect();
            let mut acc = ComplexMatrix::zeros(n, n);
            for (k, lk) in left.iter().enumerate() {
                for (l, rl) in right.iter().enumerate() {
                    let c = fs[k] * gs[k] - fs[k] * gs[l];
                    if c != T::zero() {
                        acc = &acc + &(lk * rl).scale_complex(Complex::new(c, T::zero()));
                    }
                }
            }
            blocks.push(acc);
        }
        self.phi(&BlockDiagonalElement::new(self.rho.shape().clone(), blocks)?)
    }
}

/// Context for the pair `(x^{1−α}, x^α)`.
pub fn alpha_context<T: RealScalar>(
    map: TracialMap,
    rho: BlockDiagonalElement<T>,
    alpha: f64,
) -> Result<MeasureContext<T>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Precondition(format!("α = {alpha} lies outside [0, 1]")));
    }
    MeasureContext::new(map, rho, FunctionPair::alpha(alpha))
}

/// Unique entry of a `1 × 1` codomain value, or the upper-left entry of a corner value.
pub fn leading_entry<T: RealScalar>(x: &BlockDiagonalElement<T>) -> Complex<T> {
    x.blocks().first().map_or(Complex::zero(), |b| b[(0, 0)])
}
