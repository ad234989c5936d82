use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{unit_floor, RealScalar};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: RealScalar> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    /// Builds a matrix from row-major entries. Rejects wrong lengths and non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parse("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    /// Real matrix from nested rows. Panics on ragged input; meant for literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| Complex::new(T::lit(x), T::zero())));
        }
        Self { rows: r, cols: c, data }
    }

    /// Complex matrix from nested `(re, im)` rows. Panics on ragged input.
    pub fn from_complex_rows(rows: &[&[(f64, f64)]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&(re, im)| Complex::new(T::lit(re), T::lit(im))));
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(Complex::zero(), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    fn check_same_dims(&self, other: &Self, op: &str) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: format!("{op} operands of {}x{}", self.rows, self.cols),
                found: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other, "add")?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other, "sub")?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn try_matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows on the right factor", self.cols),
                found: format!("{}", other.rows),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// `max(1, ‖M‖_F)`.
    pub fn scale_floor(&self) -> T {
        unit_floor(self.frobenius_norm())
    }

    /// Frobenius norm of `M − M*`.
    pub fn hermitian_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut acc = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Hermitian within `tol · max(1, ‖M‖_F)`.
    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square() && self.hermitian_defect() <= tol * self.scale_floor()
    }

    /// Exact structural Hermiticity (bitwise `M[i][j] == conj(M[j][i])`).
    pub fn is_exactly_hermitian(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self[(i, j)] == self[(j, i)].conj()))
    }

    /// `(M + M*) / 2`.
    pub fn hermitize(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    /// Symmetrizes inputs within `1e-10` of Hermitian; rejects anything further off.
    pub fn checked_hermitian(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", self.rows, self.cols),
            });
        }
        let defect = self.hermitian_defect();
        let scale = self.scale_floor();
        if defect > T::tol(1e-10) * scale {
            return Err(Error::NotHermitian {
                asymmetry: (defect / scale).as_f64(),
            });
        }
        Ok(self.hermitize())
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        if !self.is_square() || self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: format!("square {}x{}", self.rows, self.rows),
                found: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(self * other - other * self)
    }

    /// Hermitian part `(A + A*) / 2`.
    pub fn real_part(&self) -> Result<Self> {
        self.require_square()?;
        Ok(self.hermitize())
    }

    /// Hermitian `(A − A*) / 2i`, so that `A = Re(A) + i·Im(A)`.
    pub fn imag_part(&self) -> Result<Self> {
        self.require_square()?;
        let factor = Complex::new(T::zero(), -T::lit(0.5));
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] - self[(j, i)].conj()) * factor
        }))
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", self.rows, self.cols),
            })
        }
    }

    pub fn is_normal(&self, tol: T) -> bool {
        if !self.is_square() {
            return false;
        }
        let adj = self.adjoint();
        let defect = (&(&adj * self) - &(self * &adj)).frobenius_norm();
        defect <= tol * unit_floor(self.frobenius_norm().powi(2))
    }

    /// Assembles `[[a, b], [c, d]]` from four equally sized square blocks.
    pub fn block2x2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        let n = a.rows;
        for m in [a, b, c, d] {
            if m.dims() != (n, n) {
                return Err(Error::DimensionMismatch {
                    expected: format!("{n}x{n} block"),
                    found: format!("{}x{}", m.rows, m.cols),
                });
            }
        }
        Ok(Self::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - n)],
            (false, true) => c[(i - n, j)],
            (false, false) => d[(i - n, j - n)],
        }))
    }

    /// Copies the `size × size` submatrix starting at `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Largest absolute entry difference, handy in tests.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn cast<U: RealScalar>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64())))
                .collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on dimension mismatch; the `try_*` methods are the fallible API.

impl<T: RealScalar> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_add(rhs).expect("matrix add")
    }
}

impl<T: RealScalar> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_sub(rhs).expect("matrix sub")
    }
}

impl<T: RealScalar> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_matmul(rhs).expect("matrix mul")
    }
}

impl<T: RealScalar> Add for ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        &self + &rhs
    }
}

impl<T: RealScalar> Sub for ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        &self - &rhs
    }
}

impl<T: RealScalar> Mul for ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        &self * &rhs
    }
}

impl<T: RealScalar> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        self.map(|z| -z)
    }
}

/// Pauli matrices, used by fixtures and demos.
pub mod pauli {
    use super::ComplexMatrix;
    use crate::scalar::RealScalar;

    pub fn x<T: RealScalar>() -> ComplexMatrix<T> {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn y<T: RealScalar>() -> ComplexMatrix<T> {
        ComplexMatrix::from_complex_rows(&[&[(0.0, 0.0), (0.0, -1.0)], &[(0.0, 1.0), (0.0, 0.0)]])
    }

    pub fn z<T: RealScalar>() -> ComplexMatrix<T> {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn close(a: &M, b: &M) -> bool {
        a.dims() == b.dims() && a.max_abs_diff(b) < 1e-14
    }

    #[test]
    fn pauli_commutator_is_2i_sigma_z() {
        let c = pauli::x::<f64>().commutator(&pauli::y()).unwrap();
        let expected = pauli::z::<f64>().scale_complex(Complex::new(0.0, 2.0));
        assert!(close(&c, &expected));
    }

    #[test]
    fn self_and_diagonal_commutators_vanish() {
        let a = M::from_complex_rows(&[&[(1.0, 0.0), (2.0, 1.0)], &[(0.5, -3.0), (4.0, 0.0)]]);
        assert_eq!(a.commutator(&a).unwrap().frobenius_norm(), 0.0);
        let d1 = M::from_real_diagonal(&[1.0, 2.0]);
        let d2 = M::from_real_diagonal(&[3.0, 4.0]);
        assert_eq!(d1.commutator(&d2).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn commutator_of_hermitians_is_skew() {
        let a = M::from_complex_rows(&[&[(1.0, 0.0), (2.0, 1.0)], &[(2.0, -1.0), (-1.0, 0.0)]]);
        let b = M::from_complex_rows(&[&[(0.3, 0.0), (0.0, 1.0)], &[(0.0, -1.0), (2.0, 0.0)]]);
        let c = a.commutator(&b).unwrap();
        assert!(close(&c.adjoint(), &-&c));
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let err = M::identity(2).commutator(&M::identity(3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn real_and_imag_parts() {
        let i_eye = M::identity(2).scale_complex(Complex::i());
        assert_eq!(i_eye.real_part().unwrap().frobenius_norm(), 0.0);
        assert_eq!(pauli::x::<f64>().imag_part().unwrap().frobenius_norm(), 0.0);

        let raise = M::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let re = raise.real_part().unwrap();
        let im = raise.imag_part().unwrap();
        assert!(close(&re, &pauli::x().scale(0.5)));
        // (A − A*)/2i = σ_y/2; Re + i·Im reproduces A below.
        assert!(close(&im, &pauli::y().scale(0.5)));
        let rebuilt = &re + &im.scale_complex(Complex::i());
        assert!(close(&rebuilt, &raise));
    }

    #[test]
    fn hermitian_tolerance_gate() {
        let mut m = pauli::x::<f64>();
        m[(0, 1)] += Complex::new(1e-13, 0.0);
        let sym = m.checked_hermitian().unwrap();
        assert!(sym.is_exactly_hermitian());
        m[(0, 1)] += Complex::new(1e-6, 0.0);
        assert!(matches!(m.checked_hermitian(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn from_row_major_rejects_bad_input() {
        assert!(M::from_row_major(2, 2, vec![Complex::new(0.0, 0.0); 3]).is_err());
        let bad = vec![Complex::new(f64::NAN, 0.0); 4];
        assert!(M::from_row_major(2, 2, bad).is_err());
    }

    #[test]
    fn block_assembly_layout() {
        let a = M::identity(1);
        let b = a.scale(2.0);
        let c = a.scale(3.0);
        let d = a.scale(4.0);
        let m = M::block2x2(&a, &b, &c, &d).unwrap();
        assert_eq!(m, M::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]));
        assert_eq!(m.submatrix(1, 0, 1, 1), c);
    }
}
