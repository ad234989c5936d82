use super::element::BlockDiagonalElement;
use super::maps::TracialMap;
use crate::error::{Error, Result};
use crate::linalg::PSD_TOL;
use crate::report::{MarginReport, MarginSet};
use crate::scalar::RealScalar;

/// Default lower bound on the traces used to normalize a density.
pub const DENSITY_FLOOR: f64 = 1e-8;

/// A positive `ρ` with `Φ(ρ)` equal to the unit of `Φ`'s range.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityElement<T> {
    rho: BlockDiagonalElement<T>,
    map: TracialMap,
}

impl<T: RealScalar> DensityElement<T> {
    /// Wraps an existing `ρ` after checking positivity and `Φ(ρ) = 1` within `1e-9`.
    pub fn new(map: TracialMap, rho: BlockDiagonalElement<T>) -> Result<Self> {
        check_positive(&rho)?;
        let image = map.apply(&rho)?;
        if !image.is_unit_of(&map, T::tol(1e-9)) {
            return Err(Error::Precondition(format!(
                "Φ(ρ) differs from the unit by {:e}",
                image.distance(&map.codomain_unit()).as_f64()
            )));
        }
        Ok(Self { rho, map })
    }

    pub fn rho(&self) -> &BlockDiagonalElement<T> {
        &self.rho
    }

    pub fn map(&self) -> &TracialMap {
        &self.map
    }

    pub fn into_parts(self) -> (TracialMap, BlockDiagonalElement<T>) {
        (self.map, self.rho)
    }
}

fn check_positive<T: RealScalar>(p: &BlockDiagonalElement<T>) -> Result<()> {
    if !p.is_hermitian(T::tol(1e-10)) {
        return Err(Error::NotHermitian {
            asymmetry: f64::NAN,
        });
    }
    let margin = p.hermitize().normalized_min_eigenvalue()?;
    if margin < -T::tol(PSD_TOL) {
        return Err(Error::Precondition(format!(
            "density candidate is not positive (normalized λ_min {:e})",
            margin.as_f64()
        )));
    }
    Ok(())
}

/// Rescales a positive `P` blockwise so that `Φ(ρ)` is the unit:
/// `P / Tr P` for the scalar trace, `Pᵢ / Tr Pᵢ` for the block trace and
/// `nᵢ Pᵢ / Tr Pᵢ` for the center expectation.
pub fn normalize_density<T: RealScalar>(
    map: &TracialMap,
    p: &BlockDiagonalElement<T>,
    floor: T,
) -> Result<DensityElement<T>> {
    check_positive(p)?;
    let p = p.hermitize();
    let scales = map.density_scales(&p, floor)?;
    let blocks = p.blocks().iter().zip(&scales).map(|(b, &c)| b.scale(c)).collect();
    let rho = BlockDiagonalElement::new(p.shape().clone(), blocks)?;
    Ok(DensityElement {
        rho,
        map: map.clone(),
    })
}

/// `Φ(A* B⁻¹ A) ⪰ Φ(A)* Φ(B)⁻¹ Φ(A)` for strictly positive `B`.
pub fn kadison_check<T: RealScalar>(
    map: &TracialMap,
    a: &BlockDiagonalElement<T>,
    b: &BlockDiagonalElement<T>,
) -> Result<MarginReport> {
    let b = b.hermitize();
    let mut b_inv_blocks = Vec::new();
    for block in b.blocks() {
        b_inv_blocks.push(crate::linalg::inverse_strictly_positive(block)?);
    }
    let b_inv = BlockDiagonalElement::new(b.shape().clone(), b_inv_blocks)?;
    let lhs = map.apply(&BlockDiagonalElement::product(&[&a.adjoint(), &b_inv, a])?)?;
    let phi_a = map.apply(a)?;
    let phi_b_inv = map.codomain_inverse(&map.apply(&b)?, "Φ(B)")?;
    let rhs = BlockDiagonalElement::product(&[&phi_a.adjoint(), &phi_b_inv, &phi_a])?;
    let mut margins = MarginSet::on_range(map);
    margins.psd("kadison", &lhs.try_sub(&rhs)?)?;
    Ok(margins.finish("kadison"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraShape;
    use crate::linalg::ComplexMatrix;

    type E = BlockDiagonalElement<f64>;

    fn shape(d: &[usize]) -> AlgebraShape {
        AlgebraShape::new(d.to_vec()).unwrap()
    }

    #[test]
    fn scalar_trace_normalization() {
        let map = TracialMap::ScalarTrace(shape(&[2]));
        let p = E::single(ComplexMatrix::from_real_diagonal(&[3.0, 1.0])).unwrap();
        let d = normalize_density(&map, &p, DENSITY_FLOOR).unwrap();
        assert_eq!(d.rho().block(0), &ComplexMatrix::from_real_diagonal(&[0.75, 0.25]));
    }

    #[test]
    fn block_trace_normalization() {
        let map = TracialMap::BlockTrace(shape(&[2, 2]));
        let p = E::new(
            shape(&[2, 2]),
            vec![ComplexMatrix::identity(2), ComplexMatrix::identity(2).scale(2.0)],
        )
        .unwrap();
        let d = normalize_density(&map, &p, DENSITY_FLOOR).unwrap();
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert_eq!(d.rho().blocks(), &[half.clone(), half]);
    }

    #[test]
    fn center_expectation_normalization_solves_unit_equation() {
        let map = TracialMap::CenterExpectation(shape(&[2]));
        let p = E::single(ComplexMatrix::from_real_diagonal(&[1.0, 3.0])).unwrap();
        let d = normalize_density(&map, &p, DENSITY_FLOOR).unwrap();
        assert_eq!(d.rho().block(0), &ComplexMatrix::from_real_diagonal(&[0.5, 1.5]));
        assert_eq!(map.apply(d.rho()).unwrap(), E::identity(&shape(&[2])));
    }

    #[test]
    fn doubling_normalization_hits_corner_unit() {
        let map = TracialMap::doubling(TracialMap::BlockTrace(shape(&[1, 2]))).unwrap();
        let p = E::identity(&map.domain_shape()).scale(3.0);
        let d = normalize_density(&map, &p, DENSITY_FLOOR).unwrap();
        assert!(map.apply(d.rho()).unwrap().is_unit_of(&map, 1e-14));
    }

    #[test]
    fn degenerate_block_rejected() {
        let map = TracialMap::BlockTrace(shape(&[1, 1]));
        let p = E::commutative_from_reals(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            normalize_density(&map, &p, DENSITY_FLOOR),
            Err(Error::DegenerateBlock { block: 1, .. })
        ));
        let neg = E::commutative_from_reals(&[1.0, -1.0]).unwrap();
        assert!(normalize_density(&map, &neg, DENSITY_FLOOR).is_err());
    }

    #[test]
    fn kadison_equality_at_identity() {
        for map in [
            TracialMap::ScalarTrace(shape(&[2, 1])),
            TracialMap::BlockTrace(shape(&[2, 1])),
            TracialMap::CenterExpectation(shape(&[2, 1])),
            TracialMap::doubling(TracialMap::ScalarTrace(shape(&[2, 1]))).unwrap(),
        ] {
            let id = E::identity(&map.domain_shape());
            let r = kadison_check(&map, &id, &id).unwrap();
            assert!(r.passed, "{map}");
            assert!(r.min_margin().abs() < 1e-14, "{map}: {}", r.min_margin());
        }
    }

    #[test]
    fn kadison_diagonal_scalar_trace_matches_cauchy_schwarz() {
        // diagonal A = diag(a), B = diag(b): Σ a²/b − (Σ a)² / Σ b ≥ 0
        let a = [0.3, -1.2, 2.0];
        let b = [0.5, 1.5, 4.0];
        let lhs: f64 = a.iter().zip(&b).map(|(x, y)| x * x / y).sum();
        let rhs = a.iter().sum::<f64>().powi(2) / b.iter().sum::<f64>();
        let expected = lhs - rhs;
        let map = TracialMap::ScalarTrace(shape(&[3]));
        let ea = E::single(ComplexMatrix::from_real_diagonal(&a)).unwrap();
        let eb = E::single(ComplexMatrix::from_real_diagonal(&b)).unwrap();
        let r = kadison_check(&map, &ea, &eb).unwrap();
        assert!(expected > 0.0);
        assert!((r.min_margin() - expected / expected.max(1.0)).abs() < 1e-13);
    }

    #[test]
    fn kadison_rejects_singular_b() {
        let map = TracialMap::ScalarTrace(shape(&[2]));
        let a = E::identity(&shape(&[2]));
        let b = E::single(ComplexMatrix::from_real_diagonal(&[1.0, 0.0])).unwrap();
        assert!(matches!(kadison_check(&map, &a, &b), Err(Error::SingularB { .. })));
    }
}
