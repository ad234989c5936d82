//! Seeded random inputs: Hermitian, normal and arbitrary elements, Φ-densities
//! and function pairs.
//!
//! Seeds are derived with splitmix64: a check's stream is
//! `splitmix64(master ^ fnv1a(check_id))` and instance `i` of that stream uses
//! `splitmix64(stream ^ splitmix64(i))`. Each instance seed drives its own
//! ChaCha8 generator, so instances can be produced in any order or in parallel.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{normalize_density, AlgebraShape, BlockDiagonalElement, DensityElement, MapKind, TracialMap};
use crate::error::{Error, Result};
use crate::functions::{FunctionPair, ScalarFunction};
use crate::linalg::{eig_hermitian, ComplexMatrix};
use crate::scalar::RealScalar;

/// Added to `G*G` before normalizing a random density.
pub const DENSITY_SHIFT: f64 = 1e-6;

/// Added to `G*G` for the strictly positive `B` of the Kadison inequality.
pub const POSITIVE_SHIFT: f64 = 0.05;

pub type InstanceRng = ChaCha8Rng;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a.
pub fn fnv1a(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Seed of the stream named `name` under `master`.
pub fn stream_seed(master: u64, name: &str) -> u64 {
    splitmix64(master ^ fnv1a(name))
}

/// Seed of item `index` of a stream.
pub fn derive_seed(stream: u64, index: u64) -> u64 {
    splitmix64(stream ^ splitmix64(index))
}

pub fn rng_from_seed(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_complex<T: RealScalar, R: Rng>(rng: &mut R) -> Complex<T> {
    Complex::new(T::lit(rng.gen_range(-1.0..=1.0)), T::lit(rng.gen_range(-1.0..=1.0)))
}

/// Square matrix with real and imaginary parts uniform in `[−1, 1]`; almost surely not normal.
pub fn random_matrix<T: RealScalar, R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(dim, dim, |_, _| unit_complex(rng))
}

/// `(G + G*)/2` for a uniform `G`; exactly Hermitian.
pub fn random_hermitian<T: RealScalar, R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    random_matrix::<T, R>(rng, dim).hermitize()
}

/// `U diag(z) U*` with `U` the eigenvectors of a random Hermitian matrix and complex `zᵢ`.
pub fn random_normal<T: RealScalar, R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    let h = random_hermitian::<T, R>(rng, dim);
    let u = eig_hermitian(&h).expect("Hermitian by construction").eigenvectors().clone();
    let z: Vec<Complex<T>> = (0..dim).map(|_| unit_complex(rng)).collect();
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        (0..dim).fold(Complex::new(T::zero(), T::zero()), |acc, k| acc + u[(i, k)] * z[k] * u[(j, k)].conj())
    })
}

/// `G*G + shift·I`.
pub fn random_positive<T: RealScalar, R: Rng>(rng: &mut R, dim: usize, shift: f64) -> ComplexMatrix<T> {
    let g = random_matrix::<T, R>(rng, dim);
    (&g.adjoint() * &g).hermitize().shift(T::lit(shift))
}

fn blockwise<T: RealScalar, R: Rng>(
    rng: &mut R,
    shape: &AlgebraShape,
    mut f: impl FnMut(&mut R, usize) -> ComplexMatrix<T>,
) -> BlockDiagonalElement<T> {
    BlockDiagonalElement::from_fn(shape, |_, n| f(rng, n))
}

pub fn random_hermitian_element<T: RealScalar, R: Rng>(rng: &mut R, shape: &AlgebraShape) -> BlockDiagonalElement<T> {
    blockwise(rng, shape, |r, n| random_hermitian(r, n))
}

pub fn random_element<T: RealScalar, R: Rng>(rng: &mut R, shape: &AlgebraShape) -> BlockDiagonalElement<T> {
    blockwise(rng, shape, |r, n| random_matrix(r, n))
}

pub fn random_normal_element<T: RealScalar, R: Rng>(rng: &mut R, shape: &AlgebraShape) -> BlockDiagonalElement<T> {
    blockwise(rng, shape, |r, n| random_normal(r, n))
}

pub fn random_positive_element<T: RealScalar, R: Rng>(
    rng: &mut R,
    shape: &AlgebraShape,
    shift: f64,
) -> BlockDiagonalElement<T> {
    blockwise(rng, shape, |r, n| random_positive(r, n, shift))
}

/// `⊕ᵢ cᵢ I` with complex `cᵢ` uniform in the unit square.
pub fn random_central<T: RealScalar, R: Rng>(rng: &mut R, shape: &AlgebraShape) -> BlockDiagonalElement<T> {
    let c: Vec<Complex<T>> = (0..shape.num_blocks()).map(|_| unit_complex(rng)).collect();
    BlockDiagonalElement::central(shape, &c).expect("one coefficient per block")
}

/// `P = G*G + 1e-6·I` blockwise, rescaled so that `Φ(ρ)` is the unit.
pub fn random_density<T: RealScalar, R: Rng>(rng: &mut R, map: &TracialMap) -> DensityElement<T> {
    let p = random_positive_element(rng, &map.domain_shape(), DENSITY_SHIFT);
    normalize_density(map, &p, T::lit(crate::algebra::DENSITY_FLOOR)).expect("shifted Gram matrices are never degenerate")
}

pub fn gen_hermitian<T: RealScalar>(seed: u64, dim: usize) -> ComplexMatrix<T> {
    random_hermitian(&mut rng_from_seed(seed), dim)
}

pub fn gen_density<T: RealScalar>(seed: u64, map: &TracialMap) -> DensityElement<T> {
    random_density(&mut rng_from_seed(seed), map)
}

pub fn gen_function_pair(seed: u64, family: PairFamily) -> FunctionPair {
    family.sample(&mut rng_from_seed(seed))
}

/// Families of `(f, g)` pairs drawn by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairFamily {
    /// `(x^{1−α}, x^α)`, `α` uniform in `[0, 1]`.
    AlphaPowers,
    /// `(x^p, x^q)`, `p, q` uniform in `(0, 3]`.
    RandomPowers,
    /// A polynomial with nonnegative coefficients and positive constant term, paired with `exp`.
    PolyExpMix,
    /// `(x, 1 − x)`: opposite monotonicity, for negative controls.
    AdversarialNonMonotone,
}

impl PairFamily {
    pub const ALL: [PairFamily; 4] = [
        PairFamily::AlphaPowers,
        PairFamily::RandomPowers,
        PairFamily::PolyExpMix,
        PairFamily::AdversarialNonMonotone,
    ];

    /// Families whose pairs are same-monotone and positive on positive spectra.
    pub const SOUND: [PairFamily; 3] = [PairFamily::AlphaPowers, PairFamily::RandomPowers, PairFamily::PolyExpMix];

    pub fn name(self) -> &'static str {
        match self {
            PairFamily::AlphaPowers => "alpha_powers",
            PairFamily::RandomPowers => "random_powers",
            PairFamily::PolyExpMix => "poly_exp_mix",
            PairFamily::AdversarialNonMonotone => "adversarial_non_monotone",
        }
    }

    pub fn is_same_monotone(self) -> bool {
        self != PairFamily::AdversarialNonMonotone
    }

    pub fn sample<R: Rng>(self, rng: &mut R) -> FunctionPair {
        match self {
            PairFamily::AlphaPowers => FunctionPair::alpha(rng.gen_range(0.0..=1.0)),
            PairFamily::RandomPowers => {
                let p = 3.0 * (1.0 - rng.gen::<f64>());
                let q = 3.0 * (1.0 - rng.gen::<f64>());
                FunctionPair::new(ScalarFunction::Power(p), ScalarFunction::Power(q))
            }
            PairFamily::PolyExpMix => {
                let degree = rng.gen_range(1..=3);
                let mut coeffs = vec![rng.gen_range(0.1..=1.0)];
                coeffs.extend((0..degree).map(|_| rng.gen_range(0.0..=1.0)));
                FunctionPair::new(ScalarFunction::Polynomial(coeffs), ScalarFunction::Exp)
            }
            PairFamily::AdversarialNonMonotone => {
                FunctionPair::new(ScalarFunction::Power(1.0), ScalarFunction::Affine(-1.0, 1.0))
            }
        }
    }
}

impl fmt::Display for PairFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PairFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PairFamily::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown pair family `{s}`")))
    }
}

/// One slice of a campaign: how many instances to draw for a shape, map kind and family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub master_seed: u64,
    pub shape: AlgebraShape,
    pub map_kind: MapKind,
    pub pair_family: PairFamily,
    pub count: usize,
}

impl InstanceSpec {
    pub fn new(master_seed: u64, shape: AlgebraShape, map_kind: MapKind, pair_family: PairFamily, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Precondition("instance count must be at least 1".into()));
        }
        Ok(Self {
            master_seed,
            shape,
            map_kind,
            pair_family,
            count,
        })
    }

    pub fn map(&self) -> Result<TracialMap> {
        self.map_kind.build(&self.shape)
    }

    /// Seed of instance `index`, a pure function of these fields.
    pub fn instance_seed(&self, index: usize) -> u64 {
        let stream = stream_seed(
            self.master_seed,
            &format!("{}/{}/{}", self.shape, self.map_kind, self.pair_family),
        );
        derive_seed(stream, index as u64)
    }

    /// `(ρ, f, g)` for every instance, in index order.
    pub fn generate(&self) -> Result<Vec<(DensityElement<f64>, FunctionPair)>> {
        let map = self.map()?;
        Ok((0..self.count)
            .map(|i| {
                let mut rng = rng_from_seed(self.instance_seed(i));
                let rho = random_density(&mut rng, &map);
                (rho, self.pair_family.sample(&mut rng))
            })
            .collect())
    }
}
