use qitineq::algebra::{AlgebraShape, BlockDiagonalElement, MapKind};
use qitineq::functions::FunctionPair;
use qitineq::instances::{
    derive_seed, random_density, random_element, random_hermitian, random_matrix, random_positive, rng_from_seed,
    stream_seed, PairFamily,
};
use qitineq::linalg::{block_psd_margin, eig_hermitian, pauli, reconstruction_error, schur_psd_check, ComplexMatrix};
use qitineq::measures::{leading_entry, MeasureContext};
use rand::Rng;

/// Shapes of total dimension 2 to 5.
fn small_shapes() -> Vec<AlgebraShape> {
    ["2", "3", "4", "5", "1,1", "1,2", "2,2", "1,3", "2,3", "1,1,2"]
        .iter()
        .map(|s| AlgebraShape::parse(s).unwrap())
        .collect()
}

#[test]
fn product_form_matches_spectral_sum() {
    let shapes = small_shapes();
    let kinds = [MapKind::ScalarTrace, MapKind::BlockTrace, MapKind::CenterExpectation, MapKind::Doubling];
    let stream = stream_seed(2024, "spectral-sum");
    let mut worst = 0.0f64;
    for i in 0..500u64 {
        let mut rng = rng_from_seed(derive_seed(stream, i));
        let shape = &shapes[i as usize % shapes.len()];
        let kind = kinds[(i as usize / shapes.len()) % kinds.len()];
        let map = kind.build(shape).unwrap();
        let rho = random_density::<f64, _>(&mut rng, &map);
        let family = PairFamily::SOUND[i as usize % 3];
        let pair = family.sample(&mut rng);
        let a = random_element::<f64, _>(&mut rng, rho.rho().shape());
        let b = random_element::<f64, _>(&mut rng, rho.rho().shape());
        let ctx = MeasureContext::new(map, rho.rho().clone(), pair).unwrap();
        let direct = ctx.correlation(&a, &b).unwrap();
        let oracle = ctx.spectral_sum_correlation(&a, &b).unwrap();
        let scale = direct.frobenius_norm().max(oracle.frobenius_norm()).max(1.0);
        worst = worst.max(direct.distance(&oracle) / scale);
    }
    assert!(worst <= 1e-9, "worst relative error {worst:e}");
}

#[test]
fn wigner_yanase_closed_form() {
    let sx = BlockDiagonalElement::single(pauli::x::<f64>()).unwrap();
    for k in 1..=9 {
        let p = k as f64 / 10.0;
        let rho = BlockDiagonalElement::single(ComplexMatrix::from_real_diagonal(&[p, 1.0 - p])).unwrap();
        let map = MapKind::ScalarTrace.build(rho.shape()).unwrap();
        let ctx = MeasureContext::new(map, rho, FunctionPair::alpha(0.5)).unwrap();
        let expected = 1.0 - 2.0 * (p * (1.0 - p)).sqrt();
        let direct = leading_entry(&ctx.skew_information(&sx).unwrap());
        let oracle = leading_entry(&ctx.spectral_sum_correlation(&sx, &sx).unwrap());
        assert!((direct.re - expected).abs() <= 1e-12 && direct.im.abs() <= 1e-12, "p={p}");
        assert!((oracle.re - expected).abs() <= 1e-12, "p={p}");
    }
}

#[test]
fn eigendecomposition_reconstructs() {
    let mut rng = rng_from_seed(31);
    for i in 0..1000 {
        let dim = 1 + i % 16;
        let m = random_hermitian::<f64, _>(&mut rng, dim).scale(rng.gen_range(0.01..100.0));
        let s = eig_hermitian(&m).unwrap();
        assert!(reconstruction_error(&s, &m) <= 1e-9, "dim {dim}");
    }
}

#[test]
fn schur_complement_agrees_with_assembled_block() {
    let mut rng = rng_from_seed(77);
    let (mut agree, mut psd, mut skipped) = (0, 0, 0);
    for i in 0..1000 {
        let n = 1 + i % 3;
        let m = 1 + (i / 3) % 3;
        let a = random_positive::<f64, _>(&mut rng, n, 0.0).shift(rng.gen_range(-0.5..0.5));
        let b = random_positive::<f64, _>(&mut rng, m, 0.05);
        let x = random_matrix::<f64, _>(&mut rng, n.max(m)).submatrix(0, 0, n, m).scale(rng.gen_range(0.0..1.0));
        let schur = schur_psd_check(&a, &x, &b).unwrap();
        let block = block_psd_margin(&a, &x, &b).unwrap();
        if schur.margin.abs() <= 1e-7 || block.abs() <= 1e-7 {
            skipped += 1;
            continue;
        }
        assert_eq!(schur.margin > 0.0, block > 0.0, "instance {i}: {} vs {block}", schur.margin);
        agree += 1;
        psd += usize::from(block > 0.0);
    }
    assert!(agree > 900 && psd > 100 && agree - psd > 100, "{agree} {psd} {skipped}");
}
