use proptest::prelude::*;

use qitineq::algebra::{AlgebraShape, BlockDiagonalElement, MapKind};
use qitineq::checks::{check_alpha_chain, check_classical_heisenberg, check_classical_schrodinger, check_skew_positivity};
use qitineq::functions::{FunctionPair, ScalarFunction};
use qitineq::instances::{random_density, random_element, random_hermitian_element, rng_from_seed, PairFamily};
use qitineq::json::{element_to_json, parse_element};
use qitineq::measures::MeasureContext;
use qitineq::report::{to_json_string, MarginReport};

fn shape_strategy() -> impl Strategy<Value = AlgebraShape> {
    prop::collection::vec(1usize..=3, 1..=3).prop_map(|d| AlgebraShape::new(d).unwrap())
}

fn kind_strategy() -> impl Strategy<Value = MapKind> {
    prop::sample::select(MapKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn skew_and_flat_variance_ignore_scalar_shifts(seed in any::<u64>(), shape in shape_strategy(), kind in kind_strategy(), c in -3.0f64..3.0) {
        let map = kind.build(&shape).unwrap();
        let mut rng = rng_from_seed(seed);
        let rho = random_density::<f64, _>(&mut rng, &map);
        let pair = PairFamily::RandomPowers.sample(&mut rng);
        let a = random_hermitian_element::<f64, _>(&mut rng, rho.rho().shape());
        let ctx = MeasureContext::new(map, rho.rho().clone(), pair.clone()).unwrap();
        let shifted = a.try_add(&BlockDiagonalElement::identity(a.shape()).scale(c)).unwrap();
        // with g = 1 the normalizer term removes the mean exactly
        let flat = ctx.with_pair(FunctionPair::new(pair.f, ScalarFunction::Constant(1.0))).unwrap();
        let v = flat.variance(&a).unwrap();
        let w = flat.variance(&shifted).unwrap();
        prop_assert!(v.distance(&w) <= 1e-9 * v.frobenius_norm().max(1.0) * (1.0 + c.abs()));
        let skew = ctx.skew_information(&a).unwrap();
        let skew_shifted = ctx.skew_information(&shifted).unwrap();
        prop_assert!(skew.distance(&skew_shifted) <= 1e-9 * (1.0 + c.abs()).powi(2));
    }

    #[test]
    fn correlation_is_sesquilinear(seed in any::<u64>(), shape in shape_strategy(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let map = MapKind::BlockTrace.build(&shape).unwrap();
        let mut rng = rng_from_seed(seed);
        let rho = random_density::<f64, _>(&mut rng, &map);
        let ctx = MeasureContext::new(map, rho.rho().clone(), FunctionPair::alpha(0.3)).unwrap();
        let a = random_element::<f64, _>(&mut rng, &shape);
        let b = random_element::<f64, _>(&mut rng, &shape);
        let z = num_complex::Complex::new(re, im);
        let lhs = ctx.correlation(&a.scale_complex(z), &b).unwrap();
        let rhs = ctx.correlation(&a, &b).unwrap().scale_complex(z.conj());
        prop_assert!(lhs.distance(&rhs) <= 1e-9 * rhs.frobenius_norm().max(1.0));
    }

    #[test]
    fn skew_positive_for_sound_families(seed in any::<u64>(), shape in shape_strategy(), kind in kind_strategy(),
                                        family in prop::sample::select(PairFamily::SOUND.to_vec())) {
        let map = kind.build(&shape).unwrap();
        let mut rng = rng_from_seed(seed);
        let rho = random_density::<f64, _>(&mut rng, &map);
        let pair = family.sample(&mut rng);
        let a = random_hermitian_element::<f64, _>(&mut rng, rho.rho().shape());
        let ctx = MeasureContext::new(map, rho.rho().clone(), pair).unwrap();
        let report = check_skew_positivity(&ctx, &a).unwrap();
        prop_assert!(report.passed, "{:?}", report);
    }

    #[test]
    fn schrodinger_never_exceeds_heisenberg(seed in any::<u64>(), dim in 2usize..=4) {
        let shape = AlgebraShape::new(vec![dim]).unwrap();
        let map = MapKind::ScalarTrace.build(&shape).unwrap();
        let mut rng = rng_from_seed(seed);
        let rho = random_density::<f64, _>(&mut rng, &map);
        let a = random_hermitian_element::<f64, _>(&mut rng, &shape);
        let b = random_hermitian_element::<f64, _>(&mut rng, &shape);
        let h = check_classical_heisenberg(&rho, &a, &b).unwrap().margin("heisenberg").unwrap();
        let s = check_classical_schrodinger(&rho, &a, &b).unwrap().margin("schrodinger").unwrap();
        prop_assert!(s <= h);
        prop_assert!(s >= -1e-9);
    }

    #[test]
    fn alpha_chain_holds(seed in any::<u64>(), alpha in 0.0f64..=1.0, shape in shape_strategy(), kind in kind_strategy()) {
        let map = kind.build(&shape).unwrap();
        let mut rng = rng_from_seed(seed);
        let rho = random_density::<f64, _>(&mut rng, &map);
        let a = random_hermitian_element::<f64, _>(&mut rng, rho.rho().shape());
        let report = check_alpha_chain(&rho, alpha, &a).unwrap();
        prop_assert!(report.min_margin() >= -1e-10, "{:?}", report);
    }

    #[test]
    fn element_json_round_trips(seed in any::<u64>(), shape in shape_strategy()) {
        let x = random_element::<f64, _>(&mut rng_from_seed(seed), &shape);
        prop_assert_eq!(parse_element(&element_to_json(&x)).unwrap(), x);
    }

    #[test]
    fn margin_reports_round_trip(values in prop::collection::vec(-1e3f64..1e3, 1..5), seed in any::<u64>(), scale in 0.0f64..1e6) {
        let margins = values.iter().enumerate().map(|(i, &v)| qitineq::report::Margin { label: format!("m{i}"), value: v }).collect();
        let report = MarginReport::new("chain", margins, scale).with_seed(seed);
        let text = to_json_string(&report).unwrap();
        prop_assert_eq!(serde_json::from_str::<MarginReport>(&text).unwrap(), report);
    }
}

#[test]
fn single_precision_agrees_with_double() {
    let shape = AlgebraShape::new(vec![3]).unwrap();
    let map = MapKind::ScalarTrace.build(&shape).unwrap();
    let mut rng = rng_from_seed(5);
    let rho = random_density::<f64, _>(&mut rng, &map);
    let a = random_hermitian_element::<f64, _>(&mut rng, &shape);
    let wide = MeasureContext::new(map.clone(), rho.rho().clone(), FunctionPair::alpha(0.5)).unwrap();
    let narrow = MeasureContext::new(map, rho.rho().cast::<f32>(), FunctionPair::alpha(0.5)).unwrap();
    let w = wide.skew_information(&a).unwrap();
    let n = narrow.skew_information(&a.cast::<f32>()).unwrap().cast::<f64>();
    assert!(w.distance(&n) <= 1e-4 * w.frobenius_norm().max(1.0));
}
