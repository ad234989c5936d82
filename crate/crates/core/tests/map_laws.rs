use num_complex::Complex;
use qitineq::algebra::{compose_apply, factorize_block_trace, AlgebraShape, BlockDiagonalElement, MapKind, TracialMap};
use qitineq::instances::{random_central, random_element, rng_from_seed, stream_seed, derive_seed};
use qitineq::Element;

const SAMPLES: u64 = 200;

fn shapes() -> Vec<AlgebraShape> {
    ["1", "2", "3", "2,2", "1,3", "2,1,2"].iter().map(|s| AlgebraShape::parse(s).unwrap()).collect()
}

fn scale(xs: &[&Element]) -> f64 {
    xs.iter().map(|x| x.frobenius_norm()).fold(1.0, f64::max)
}

fn for_each_sample(law: &str, mut f: impl FnMut(&TracialMap, &mut qitineq::instances::InstanceRng)) {
    let stream = stream_seed(7, law);
    for kind in MapKind::ALL {
        for (k, shape) in shapes().iter().enumerate() {
            let map = kind.build(shape).unwrap();
            for i in 0..SAMPLES / 4 {
                let mut rng = rng_from_seed(derive_seed(stream, (k as u64) << 32 | i));
                f(&map, &mut rng);
            }
        }
    }
}

#[test]
fn tracial() {
    for_each_sample("tracial", |map, rng| {
        let x = random_element::<f64, _>(rng, &map.domain_shape());
        let y = random_element::<f64, _>(rng, &map.domain_shape());
        let xy = map.apply(&x.try_mul(&y).unwrap()).unwrap();
        let yx = map.apply(&y.try_mul(&x).unwrap()).unwrap();
        assert!(xy.distance(&yx) <= 1e-9 * scale(&[&xy, &yx]), "{map}");
    });
}

#[test]
fn star_linear() {
    for_each_sample("star", |map, rng| {
        let x = random_element::<f64, _>(rng, &map.domain_shape());
        let y = random_element::<f64, _>(rng, &map.domain_shape());
        let lhs = map.apply(&x.adjoint()).unwrap();
        let rhs = map.apply(&x).unwrap().adjoint();
        assert!(lhs.distance(&rhs) <= 1e-12 * scale(&[&lhs]), "{map}");
        let c = Complex::new(0.3, -1.7);
        let combo = map.apply(&x.scale_complex(c).try_add(&y).unwrap()).unwrap();
        let split = map.apply(&x).unwrap().scale_complex(c).try_add(&map.apply(&y).unwrap()).unwrap();
        assert!(combo.distance(&split) <= 1e-12 * scale(&[&combo]), "{map}");
    });
}

#[test]
fn positive() {
    for_each_sample("positive", |map, rng| {
        let x = random_element::<f64, _>(rng, &map.domain_shape());
        let y = map.apply(&x.adjoint().try_mul(&x).unwrap()).unwrap();
        assert!(y.hermitize().min_eigenvalue().unwrap() >= -1e-9 * y.scale_floor(), "{map}");
    });
}

#[test]
fn commutative_range() {
    for_each_sample("commutative", |map, rng| {
        let x = map.apply(&random_element::<f64, _>(rng, &map.domain_shape())).unwrap();
        let y = map.apply(&random_element::<f64, _>(rng, &map.domain_shape())).unwrap();
        let c = x.commutator(&y).unwrap();
        assert!(c.frobenius_norm() <= 1e-12 * scale(&[&x, &y]).powi(2), "{map}");
    });
}

#[test]
fn center_expectation_module_property_and_unit() {
    for (k, shape) in shapes().iter().enumerate() {
        let map = TracialMap::CenterExpectation(shape.clone());
        let unit = BlockDiagonalElement::<f64>::identity(shape);
        assert_eq!(map.apply(&unit).unwrap(), unit);
        for i in 0..SAMPLES {
            let mut rng = rng_from_seed(derive_seed(k as u64, i));
            let x = random_element::<f64, _>(&mut rng, shape);
            let b = random_central::<f64, _>(&mut rng, shape);
            let c = random_central::<f64, _>(&mut rng, shape);
            let lhs = map.apply(&BlockDiagonalElement::product(&[&b, &x, &c]).unwrap()).unwrap();
            let rhs = BlockDiagonalElement::product(&[&b, &map.apply(&x).unwrap(), &c]).unwrap();
            assert!(lhs.distance(&rhs) <= 1e-9 * scale(&[&lhs, &rhs]));
            assert!(map.apply(&x).unwrap().is_central(1e-12));
        }
    }
}

#[test]
fn block_trace_factorizes_through_commutative_algebra() {
    let shape = AlgebraShape::parse("2,3").unwrap();
    let phi = TracialMap::BlockTrace(shape.clone());
    let (phi1, phi2) = factorize_block_trace(&phi).unwrap();
    assert_eq!(phi1.codomain_shape().block_dims(), &[1, 1]);
    for i in 0..100 {
        let x = random_element::<f64, _>(&mut rng_from_seed(i), &shape);
        let direct = phi.apply(&x).unwrap();
        assert!(compose_apply(&phi2, &phi1, &x).unwrap().distance(&direct) <= 1e-12 * scale(&[&direct]));
    }
    assert!(factorize_block_trace(&TracialMap::CenterExpectation(shape)).is_err());
}

#[test]
fn doubling_examples() {
    let inner = TracialMap::ScalarTrace(AlgebraShape::parse("2").unwrap());
    let psi = TracialMap::doubling(inner).unwrap();
    let x = BlockDiagonalElement::<f64>::identity(&psi.domain_shape());
    let y = psi.apply(&x).unwrap();
    assert_eq!(y.block(0)[(0, 0)], Complex::new(2.0, 0.0));
    assert_eq!(y.block(0)[(1, 1)], Complex::new(0.0, 0.0));
}
