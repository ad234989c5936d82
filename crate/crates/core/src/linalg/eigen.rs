//! Complex Hermitian eigendecomposition by cyclic Jacobi rotations, plus the
//! spectral-calculus and Loewner-order primitives built on top of it.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{unit_floor, RealScalar};

/// Maximum number of full Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;

/// Off-diagonal Frobenius mass, relative to `‖M‖_F`, at which a sweep loop stops.
pub const CONVERGENCE_TOL: f64 = 1e-12;

/// Relative tolerance for accepting a matrix as positive semidefinite.
pub const PSD_TOL: f64 = 1e-9;

/// Relative threshold below which a matrix is not considered strictly positive.
pub const STRICT_POSITIVITY_TOL: f64 = 1e-10;

/// Eigenvalues in ascending order with the matching unitary eigenvector matrix (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSpectrum<T> {
    eigenvalues: Vec<T>,
    eigenvectors: ComplexMatrix<T>,
}

impl<T: RealScalar> HermitianSpectrum<T> {
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix<T> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }

    /// `U diag(values) U*` for an arbitrary list of real values in eigenvalue order.
    pub fn synthesize(&self, values: &[T]) -> ComplexMatrix<T> {
        let n = self.dim();
        debug_assert_eq!(values.len(), n);
        let u = &self.eigenvectors;
        let mut out = ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(Complex::zero(), |acc, k| acc + u[(i, k)] * u[(j, k)].conj() * values[k])
        });
        // exact Hermitian symmetry of the output
        for i in 0..n {
            out[(i, i)].im = T::zero();
            for j in (i + 1)..n {
                let v = out[(i, j)];
                out[(j, i)] = v.conj();
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.synthesize(&self.eigenvalues)
    }

    /// `U diag(f(λ)) U*`.
    pub fn map<F>(&self, f: F) -> Result<ComplexMatrix<T>>
    where
        F: Fn(T) -> Result<T>,
    {
        let values = self.eigenvalues.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        Ok(self.synthesize(&values))
    }

    /// Groups eigenvalues lying within `rel_tol · spread` of their neighbour into
    /// clusters and returns `(mean eigenvalue, spectral projection)` per cluster.
    /// The projections sum to the identity.
    pub fn eigenprojections(&self, rel_tol: T) -> Vec<(T, ComplexMatrix<T>)> {
        let n = self.dim();
        if n == 0 {
            return Vec::new();
        }
        let spread = self.max() - self.min();
        let gap = rel_tol * spread;
        let mut groups: Vec<Vec<usize>> = vec![vec![0]];
        for k in 1..n {
            if self.eigenvalues[k] - self.eigenvalues[k - 1] <= gap {
                groups.last_mut().expect("non-empty").push(k);
            } else {
                groups.push(vec![k]);
            }
        }
        let u = &self.eigenvectors;
        groups
            .into_iter()
            .map(|idx| {
                let mean = idx.iter().map(|&k| self.eigenvalues[k]).sum::<T>()
                    / T::from_usize(idx.len()).expect("usize fits");
                let proj = ComplexMatrix::from_fn(n, n, |i, j| {
                    idx.iter().fold(Complex::zero(), |acc, &k| acc + u[(i, k)] * u[(j, k)].conj())
                });
                (mean, proj)
            })
            .collect()
    }
}

fn off_diagonal_norm<T: RealScalar>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary and then applies the real symmetric Jacobi rotation, so the combined
/// 2×2 unitary is
///
/// ```text
/// J = [[ c,            s           ],
///      [-s·e^{-iφ},    c·e^{-iφ}    ]],   a_pq = r·e^{iφ}
/// ```
///
/// and `J* A J` has a zero in position `(p, q)`.
pub fn eig_hermitian<T: RealScalar>(m: &ComplexMatrix<T>) -> Result<HermitianSpectrum<T>> {
    let mut a = m.checked_hermitian()?;
    let n = a.rows();
    let mut v = ComplexMatrix::<T>::identity(n);
    let norm = a.frobenius_norm();
    let threshold = T::tol(CONVERGENCE_TOL) * norm;

    let mut converged = norm.is_zero();
    for _ in 0..MAX_SWEEPS {
        if converged || off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate<T: RealScalar>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r.is_zero() {
        return;
    }
    let phase_conj = (apq / r).conj();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (r + r);
    let t = if theta.is_zero() {
        T::one()
    } else {
        theta.signum() / (theta.abs() + theta.hypot(T::one()))
    };
    let c = T::one() / t.hypot(T::one());
    let s = t * c;

    let jpp = Complex::new(c, T::zero());
    let jpq = Complex::new(s, T::zero());
    let jqp = phase_conj * (-s);
    let jqq = phase_conj * c;

    let n = a.rows();
    // A ← A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // A ← J* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)].im = T::zero();
    a[(q, q)].im = T::zero();
    // V ← V J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// `f(M)` by spectral calculus.
pub fn apply_function<T, F>(m: &ComplexMatrix<T>, f: F) -> Result<ComplexMatrix<T>>
where
    T: RealScalar,
    F: Fn(T) -> Result<T>,
{
    eig_hermitian(m)?.map(f)
}

pub fn min_eigenvalue<T: RealScalar>(m: &ComplexMatrix<T>) -> Result<T> {
    Ok(eig_hermitian(m)?.min())
}

/// `λ_min(M) / max(1, ‖M‖_F)`.
pub fn normalized_min_eigenvalue<T: RealScalar>(m: &ComplexMatrix<T>) -> Result<T> {
    Ok(min_eigenvalue(m)? / m.scale_floor())
}

/// `λ_min(M) ≥ −tol · max(1, ‖M‖_F)`.
pub fn is_psd<T: RealScalar>(m: &ComplexMatrix<T>, tol: T) -> Result<bool> {
    Ok(normalized_min_eigenvalue(m)? >= -tol)
}

/// Inverse of a Hermitian matrix whose smallest eigenvalue clears
/// `1e-10 · max(1, ‖M‖_F)`. Near-singular inputs are rejected, never regularized.
pub fn inverse_strictly_positive<T: RealScalar>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let spectrum = eig_hermitian(m)?;
    let threshold = T::tol(STRICT_POSITIVITY_TOL) * m.scale_floor();
    if spectrum.min() <= threshold {
        return Err(Error::SingularB {
            min_eigenvalue: spectrum.min().as_f64(),
            threshold: threshold.as_f64(),
        });
    }
    let inv: Vec<T> = spectrum.eigenvalues().iter().map(|&x| T::one() / x).collect();
    Ok(spectrum.synthesize(&inv))
}

/// Outcome of a Schur-complement positivity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurCheck<T> {
    pub psd: bool,
    /// Normalized minimum eigenvalue of `A − X B⁻¹ X*`.
    pub margin: T,
}

/// Decides `[[A, X], [X*, B]] ⪰ 0` through the Schur complement `A − X B⁻¹ X* ⪰ 0`,
/// valid whenever `B` is strictly positive.
pub fn schur_psd_check<T: RealScalar>(
    a: &ComplexMatrix<T>,
    x: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
) -> Result<SchurCheck<T>> {
    if x.rows() != a.rows() || x.cols() != b.rows() {
        return Err(Error::DimensionMismatch {
            expected: format!("X of size {}x{}", a.rows(), b.rows()),
            found: format!("{}x{}", x.rows(), x.cols()),
        });
    }
    let b_inv = inverse_strictly_positive(b)?;
    let complement = a - &(&(x * &b_inv) * &x.adjoint());
    let margin = normalized_min_eigenvalue(&complement.hermitize())?;
    Ok(SchurCheck {
        psd: margin >= -T::tol(PSD_TOL),
        margin,
    })
}

/// Normalized minimum eigenvalue of the assembled block matrix `[[A, X], [X*, B]]`.
pub fn block_psd_margin<T: RealScalar>(
    a: &ComplexMatrix<T>,
    x: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
) -> Result<T> {
    let n = a.rows();
    let m = b.rows();
    if x.dims() != (n, m) {
        return Err(Error::DimensionMismatch {
            expected: format!("X of size {n}x{m}"),
            found: format!("{}x{}", x.rows(), x.cols()),
        });
    }
    let xa = x.adjoint();
    let full = ComplexMatrix::from_fn(n + m, n + m, |i, j| match (i < n, j < n) {
        (true, true) => a[(i, j)],
        (true, false) => x[(i, j - n)],
        (false, true) => xa[(i - n, j)],
        (false, false) => b[(i - n, j - n)],
    });
    normalized_min_eigenvalue(&full.hermitize())
}

/// `‖U*U − I‖_F`.
pub fn unitarity_defect<T: RealScalar>(u: &ComplexMatrix<T>) -> T {
    let gram = &u.adjoint() * u;
    (&gram - &ComplexMatrix::identity(u.rows())).frobenius_norm()
}

/// `‖U diag(λ) U* − M‖_F / max(1, ‖M‖_F)`.
pub fn reconstruction_error<T: RealScalar>(spectrum: &HermitianSpectrum<T>, m: &ComplexMatrix<T>) -> T {
    (&spectrum.reconstruct() - m).frobenius_norm() / unit_floor(m.frobenius_norm())
}

impl<T: RealScalar> ComplexMatrix<T> {
    /// Convenience: `M + c·I`.
    pub fn shift(&self, c: T) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows().min(self.cols()) {
            out[(i, i)] += Complex::new(c, T::zero());
        }
        out
    }

    pub fn is_identity(&self, tol: T) -> bool {
        self.is_square() && (self - &Self::identity(self.rows())).frobenius_norm() <= tol
    }

    pub fn one_by_one(z: Complex<T>) -> Self {
        let mut m = Self::zeros(1, 1);
        m[(0, 0)] = z;
        m
    }

    pub fn scalar(x: T) -> Self {
        Self::one_by_one(Complex::new(x, T::zero()))
    }

    pub fn unit_scalar() -> Self {
        Self::one_by_one(Complex::one())
    }
}
