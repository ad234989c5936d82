//! One checker per inequality. Each builds the operator that should be positive
//! and reports its normalized smallest eigenvalue as a margin.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    kadison_check, operator_block2x2, split_block2x2, BlockDiagonalElement, DensityElement, MapKind, TracialMap,
    MAX_TOTAL_DIM,
};
use crate::error::{Error, Result};
use crate::functions::FunctionPair;
use crate::measures::{alpha_context, leading_entry, MeasureContext};
use crate::report::{MarginReport, MarginSet};
use crate::scalar::RealScalar;

/// Tolerance on `‖X − X*‖_F / max(1, ‖X‖_F)` for inputs required to be Hermitian.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-10;

/// Identifier of a checker, used in reports and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    ClassicalHeisenberg,
    ClassicalSchrodinger,
    ClassicalCorrCs,
    VarianceCovariance,
    VarCovMatrix,
    SchrodingerCommutative,
    Kadison,
    HeisenbergGeneral,
    SkewPositivity,
    SkewSum,
    CorrCsMatrix,
    CorrCsNorm,
    ConditionalExpectationCs,
    Chain,
    AlphaChain,
}

impl CheckId {
    pub const ALL: [CheckId; 15] = [
        CheckId::ClassicalHeisenberg,
        CheckId::ClassicalSchrodinger,
        CheckId::ClassicalCorrCs,
        CheckId::VarianceCovariance,
        CheckId::VarCovMatrix,
        CheckId::SchrodingerCommutative,
        CheckId::Kadison,
        CheckId::HeisenbergGeneral,
        CheckId::SkewPositivity,
        CheckId::SkewSum,
        CheckId::CorrCsMatrix,
        CheckId::CorrCsNorm,
        CheckId::ConditionalExpectationCs,
        CheckId::Chain,
        CheckId::AlphaChain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::ClassicalHeisenberg => "classical_heisenberg",
            CheckId::ClassicalSchrodinger => "classical_schrodinger",
            CheckId::ClassicalCorrCs => "classical_corr_cs",
            CheckId::VarianceCovariance => "variance_covariance",
            CheckId::VarCovMatrix => "var_cov_matrix",
            CheckId::SchrodingerCommutative => "schrodinger_commutative",
            CheckId::Kadison => "kadison",
            CheckId::HeisenbergGeneral => "heisenberg_general",
            CheckId::SkewPositivity => "skew_positivity",
            CheckId::SkewSum => "skew_sum",
            CheckId::CorrCsMatrix => "corr_cs_matrix",
            CheckId::CorrCsNorm => "corr_cs_norm",
            CheckId::ConditionalExpectationCs => "conditional_expectation_cs",
            CheckId::Chain => "chain",
            CheckId::AlphaChain => "alpha_chain",
        }
    }

    /// Whether the checker accepts maps of this kind.
    pub fn supports(self, kind: MapKind) -> bool {
        match self {
            CheckId::ClassicalHeisenberg
            | CheckId::ClassicalSchrodinger
            | CheckId::ClassicalCorrCs
            | CheckId::VarianceCovariance => kind == MapKind::ScalarTrace,
            CheckId::ConditionalExpectationCs => kind == MapKind::CenterExpectation,
            _ => true,
        }
    }

    /// Whether the checker draws its functions from a pair family. The classical
    /// checkers and the α-chain fix their own functions; `kadison` uses none.
    pub fn uses_pair(self) -> bool {
        !matches!(
            self,
            CheckId::ClassicalHeisenberg
                | CheckId::ClassicalSchrodinger
                | CheckId::ClassicalCorrCs
                | CheckId::VarianceCovariance
                | CheckId::Kadison
                | CheckId::AlphaChain
        )
    }

    /// Whether the underlying inequality assumes a same-monotone pair.
    pub fn needs_same_monotone(self) -> bool {
        matches!(
            self,
            CheckId::SkewPositivity
                | CheckId::SkewSum
                | CheckId::CorrCsMatrix
                | CheckId::CorrCsNorm
                | CheckId::ConditionalExpectationCs
        )
    }

    /// Whether the inequality assumes `f > 0` and `g > 0` on the spectrum.
    pub fn needs_positive_pair(self) -> bool {
        matches!(
            self,
            CheckId::SchrodingerCommutative | CheckId::HeisenbergGeneral | CheckId::Chain
        )
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown check id `{s}`")))
    }
}

fn hermitian_input<T: RealScalar>(x: &BlockDiagonalElement<T>, name: &str) -> Result<BlockDiagonalElement<T>> {
    let defect = x.try_sub(&x.adjoint())?.frobenius_norm() / x.scale_floor();
    if defect > T::tol(HERMITIAN_INPUT_TOL) {
        return Err(Error::Precondition(format!(
            "{name} must be Hermitian (relative defect {:e})",
            defect.as_f64()
        )));
    }
    Ok(x.hermitize())
}

fn require_kind(map: &TracialMap, kind: MapKind) -> Result<()> {
    if map.kind() == kind {
        Ok(())
    } else {
        Err(Error::WrongKind {
            expected: kind.name().into(),
            found: map.kind().name().into(),
        })
    }
}

fn require_positive_f<T: RealScalar>(ctx: &MeasureContext<T>) -> Result<()> {
    let f = ctx.function_of_rho(&ctx.pair().f)?;
    if f.min_eigenvalue()? <= T::zero() {
        return Err(Error::Precondition(format!("{} must be positive on the spectrum", ctx.pair().f)));
    }
    Ok(())
}

fn classical_context<T: RealScalar>(rho: &DensityElement<T>) -> Result<MeasureContext<T>> {
    require_kind(rho.map(), MapKind::ScalarTrace)?;
    MeasureContext::new(rho.map().clone(), rho.rho().clone(), FunctionPair::classical())
}

fn re<T: RealScalar>(x: &BlockDiagonalElement<T>) -> f64 {
    leading_entry(x).re.as_f64()
}

struct ClassicalTerms {
    var_product: f64,
    commutator_sq: f64,
    re_cov_sq: f64,
}

fn classical_terms<T: RealScalar>(
    rho: &DensityElement<T>,
    a: &BlockDiagonalElement<T>,
    b: &BlockDiagonalElement<T>,
) -> Result<ClassicalTerms> {
    let ctx = classical_context(rho)?;
    let a = hermitian_input(a, "A")?;
    let b = hermitian_input(b, "B")?;
    let va = re(&ctx.variance(&a)?);
    let vb = re(&ctx.variance(&b)?);
    let comm = leading_entry(&ctx.phi_of(&[ctx.rho(), &a.commutator(&b)?])?);
    let cov = re(&ctx.covariance(&a, &b)?);
    Ok(ClassicalTerms {
        var_product: va * vb,
        commutator_sq: 0.25 * comm.norm_sqr().as_f64(),
        re_cov_sq: cov * cov,
    })
}

/// `Var(A)Var(B) − ¼|Tr(ρ[A,B])|² ≥ 0` for a state `ρ` and observables `A`, `B`.
pub fn check_classical_heisenberg<T: RealScalar>(
    rho: &DensityElement<T>,
    a: &BlockDiagonalElement<T>,
    b: &BlockDiagonalElement<T>,
) -> Result<MarginReport> {
    let t = classical_terms(rho, a, b)?;
    let mut m = MarginSet::new();
    m.value("heisenberg", t.var_product - t.commutator_sq, t.var_product);
    Ok(m.finish(CheckId::ClassicalHeisenberg.name()))
}

/// `Var(A)Var(B) − (Re Cov(A,B))² − ¼|Tr(ρ[A,B])|² ≥ 0`, normalized like the
/// Heisenberg margin so the two are directly comparable. The second margin is the
/// gap to the Heisenberg margin.
pub fn check_classical_schrodinger<T: RealScalar>(
    rho: &DensityElement<T>,
    a: &BlockDiagonalElement<T>,
    b: &BlockDiagonalElement<T>,
) -> Result<MarginReport> {
    let t = classical_terms(rho, a, b)?;
    let heisenberg = t.var_product - t.commutator_sq;
    let schrodinger = heisenberg - t.re_cov_sq;
    let mut m = MarginSet::new();
    let s = m.value("schrodinger", schrodinger, t.var_product);
    let h = heisenberg / t.var_product.abs().max(1.0);
    m.value("refinement", h - s, 1.0);
    Ok(m.finish(CheckId::ClassicalSchrodinger.name()))
}

/// `I^α(A) I^α(B) − (Re Corr^α(A,B))² ≥ 0` under the trace.
pub fn check_classical_corr_cs<T: RealScalar>(
    rho: &DensityElement<T>,
    alpha: f64,
    a: &BlockDiagonalElement<T>,
    b: &BlockDiagonalElement<T>,
) -> Result<MarginReport> {
    require_kind(rho.map(), MapKind::ScalarTrace)?;
    let ctx = alpha_context(rho.map().clone(), rho.rho().clone(), alpha)?;
    let a = hermitian_input(a, "A")?;
    let b = hermitian_input(b, "B")?;
    let ia = re(&ctx.skew_information(&a)?);
    let ib = re(&ctx.skew_information(&b)?);
    let rc = re(&ctx.correlation(&a, &b)?);
    let mut m = MarginSet::new();
    m.value("corr_cauchy_schwarz", ia * ib - rc * rc, ia * ib);
    Ok(m.finish(CheckId::ClassicalCorrCs.name()))
}

/// `Var(A) − Cov(A,B) Var(B)⁻¹ Cov(B,A) ⪰ 0` with the classical variance.
pub fn check_variance_covariance_classical<T: RealScalar>(
    rho: &DensityElement<T>,
    a: &BlockDiagonalElement<T>,
    b: &BlockDiagonalElement<T>,
) -> Result<MarginReport> {
    let ctx = classical_context(rho)?;
    let var_a = ctx.variance(a)?;
    let var_b_inv = ctx.map().codomain_inverse(&ctx.variance(b)?, "Var(B)")?;
    let projected = BlockDiagonalElement::product(&[&ctx.covariance(a, b)?, &var_b_inv, &ctx.covariance(b, a)?])?;
    let mut m = MarginSet::new();
    m.psd_between("variance_covariance", &var_a, &projected)?;
    Ok(m.finish(CheckId::VarianceCovariance.name()))
}

/// `[[Var(A), Cov(A,B)], [Cov(B,A), Var(B)]] ⪰ 0` over the codomain.
pub fn check_var_cov_matrix<T: RealScalar>(
    ctx: &MeasureContext<T>,
    a: &BlockDiagonalElement<T>,
    b: &BlockDiagonalElement<T>,
) -> Result<MarginReport> {
    require_positive_f(ctx)?;
    let block = operator_block2x2(
        &ctx.variance(a)?,
        &ctx.covariance(a, b)?,
        &ctx.covariance(b, a)?,
        &ctx.variance(b)?,
    )?;
    let mut m = MarginSet::on_range(ctx.map());
    m.psd("var_cov_matrix", &block)?;
    Ok(m.finish(CheckId::VarCovMatrix.name()))
}

/// `½Φ(f(ρ)[A,B])`.
fn half_commutator<T: RealScalar>(
    ctx: &MeasureContext<T>,
    a: &BlockDiagonalElement<T>,
    b: &BlockDiagonalElement<T>,
) -> Result<BlockDiagonalElement<T>> {
    Ok(ctx.phi_of(&[ctx.f_rho(), &a.commutator(b)?])?.scale(T::lit(0.5)))
}

/// Both Schrödinger-type block matrices for a map with commutative range.
pub fn check_schrodinger_commutative<T: RealScalar>(
    ctx: &MeasureContext<T>,
    a: &BlockDiagonalElement<T>,
    b: &BlockDiagonalElement<T>,
) -> Result<MarginReport> {
    if !ctx.map().has_commutative_range() {
        return Err(Error::NonCommutativeRange(ctx.map().name()));
    }
    ctx.require_positive_functions()?;
    let a = hermitian_input(a, "A")?;
    let b = hermitian_input(b, "B")?;
    let var_a = ctx.variance(&a)?;
    let var_b = ctx.variance(&b)?;
    let re_cov = ctx.covariance(&a, &b)?.real_part();
    let k = half_commutator(ctx, &a, &b)?;
    let with_cov = operator_block2x2(&var_a, &re_cov.try_add(&k)?, &re_cov.try_sub(&k)?, &var_b)?;
    let without = operator_block2x2(&var_a, &k, &k.scale(-T::one()), &var_b)?;
    let mut m = MarginSet::on_range(ctx.map());
    m.psd("with_covariance", &with_cov)?;
    m.psd("commutator_only", &without)?;
    Ok(m.finish(CheckId::SchrodingerCommutative.name()))
}

/// `Φ(A* B⁻¹ A) ⪰ Φ(A)* Φ(B)⁻¹ Φ(A)`.
pub fn check_kadison<T: RealScalar>(
    map: &TracialMap,
    a: &BlockDiagonalElement<T>,
    b: &BlockDiagonalElement<T>,
) -> Result<MarginReport> {
    kadison_check(map, a, b)
}

/// `[[Var(A), ½Φ(f(ρ)[A,B])], [−½Φ(f(ρ)[A,B]), Var(B)]] ⪰ 0` for any tracial map.
pub fn check_heisenberg_general<T: RealScalar>(
    ctx: &MeasureContext<T>,
    a: &BlockDiagonalElement<T>,
    b: &BlockDiagonalElement<T>,
) -> Result<MarginReport> {
    ctx.require_positive_functions()?;
    let a = hermitian_input(a, "A")?;
    let b = hermitian_input(b, "B")?;
    let k = half_commutator(ctx, &a, &b)?;
    let block = operator_block2x2(&ctx.variance(&a)?, &k, &k.scale(-T::one()), &ctx.variance(&b)?)?;
    let mut m = MarginSet::on_range(ctx.map());
    m.psd("heisenberg", &block)?;
    Ok(m.finish(CheckId::HeisenbergGeneral.name()))
}

/// `Φ(f(ρ)g(ρ)A²) ⪰ Φ(f(ρ)Ag(ρ)A)` and `I(A) ⪰ 0` for Hermitian `A`.
pub fn check_skew_positivity<T: RealScalar>(ctx: &MeasureContext<T>, a: &BlockDiagonalElement<T>) -> Result<MarginReport> {
    ctx.require_same_monotone()?;
    let a = hermitian_input(a, "A")?;
    let fg = ctx.function_of_rho(&ctx.pair().product())?;
    let lhs = ctx.phi_of(&[&fg, &a, &a])?;
    let rhs = ctx.phi_of(&[ctx.f_rho(), &a, ctx.g_rho(), &a])?;
    let mut m = MarginSet::on_range(ctx.map());
    m.psd_between("product_order", &lhs, &rhs)?;
    m.psd("skew_information", &ctx.skew_information(&a)?)?;
    Ok(m.finish(CheckId::SkewPositivity.name()))
}

/// `I(A) + I(A*) ⪰ 0` for arbitrary `A`, cross-checked against the skew
/// information of `[[0, A], [A*, 0]]` at `ρ ⊕ ρ` under the doubled map.
pub fn check_skew_sum_nonneg<T: RealScalar>(ctx: &MeasureContext<T>, a: &BlockDiagonalElement<T>) -> Result<MarginReport> {
    ctx.require_same_monotone()?;
    let sum = ctx.skew_information(a)?.try_add(&ctx.skew_information(&a.adjoint())?)?;
    let mut m = MarginSet::on_range(ctx.map());
    m.psd("skew_sum", &sum)?;
    if ctx.rho().shape().total_dim() * 2 <= MAX_TOTAL_DIM {
        let psi = TracialMap::doubling(ctx.map().clone())?;
        let zero = BlockDiagonalElement::zeros(ctx.rho().shape());
        let rho2 = operator_block2x2(ctx.rho(), &zero, &zero, ctx.rho())?;
        let a2 = operator_block2x2(&zero, a, &a.adjoint(), &zero)?;
        let mut doubled = MeasureContext::new(psi.clone(), rho2, ctx.pair().clone())?;
        if ctx.same_monotone_waived() {
            doubled = doubled.waive_same_monotone();
        }
        let skew2 = doubled.skew_information(&a2)?;
        let [corner, ..] = split_block2x2(&skew2)?;
        let half = sum.scale(T::lit(0.5));
        let scale = corner.frobenius_norm().max(half.frobenius_norm());
        m.identity("doubling_agreement", corner.distance(&half), scale);
        m.psd("doubling_skew", &psi.compress_to_range(&skew2)?)?;
    }
    Ok(m.finish(CheckId::SkewSum.name()))
}

/// `[[I(A), Re Corr(A,B)], [Re Corr(A,B), I(B)]] ⪰ 0` for Hermitian `A`, `B`.
pub fn check_corr_cs_matrix<T: RealScalar>(
    ctx: &MeasureContext<T>,
    a: &BlockDiagonalElement<T>,
    b: &BlockDiagonalElement<T>,
) -> Result<MarginReport> {
    ctx.require_same_monotone()?;
    let a = hermitian_input(a, "A")?;
    let b = hermitian_input(b, "B")?;
    let r = ctx.correlation(&a, &b)?.real_part();
    let block = operator_block2x2(&ctx.skew_information(&a)?, &r, &r, &ctx.skew_information(&b)?)?;
    let mut m = MarginSet::on_range(ctx.map());
    m.psd("corr_matrix", &block)?;
    Ok(m.finish(CheckId::CorrCsMatrix.name()))
}

/// `‖I(B)‖ I(A) ⪰ |Re Corr(A,B)|²` with the operator norm, and
/// `I(A) I(B) ⪰ |Re Corr(A,B)|²` when `Φ` has commutative range.
pub fn check_corr_cs_norm<T: RealScalar>(
    ctx: &MeasureContext<T>,
    a: &BlockDiagonalElement<T>,
    b: &BlockDiagonalElement<T>,
) -> Result<MarginReport> {
    ctx.require_same_monotone()?;
    let a = hermitian_input(a, "A")?;
    let b = hermitian_input(b, "B")?;
    let ia = ctx.skew_information(&a)?;
    let ib = ctx.skew_information(&b)?;
    let r = ctx.correlation(&a, &b)?.real_part();
    let r_sq = r.adjoint().try_mul(&r)?;
    let norm_ib = ib.hermitize().max_eigenvalue()?.max(T::zero());
    let mut m = MarginSet::on_range(ctx.map());
    m.psd_between("operator_norm", &ia.scale(norm_ib), &r_sq)?;
    if ctx.map().has_commutative_range() {
        m.psd_between("commutative", &ia.try_mul(&ib)?, &r_sq)?;
    }
    Ok(m.finish(CheckId::CorrCsNorm.name()))
}

/// `I(A) I(B) ⪰ |Corr′(A,B)|²` for the center expectation, together with the
/// module law `Corr′(A, BC) = Corr′(A, B) C` for central `C`.
///
/// `A` and `B` must be Hermitian, or normal when `f = g`.
pub fn check_conditional_expectation_cs<T: RealScalar>(
    ctx: &MeasureContext<T>,
    a: &BlockDiagonalElement<T>,
    b: &BlockDiagonalElement<T>,
    c: &BlockDiagonalElement<T>,
) -> Result<MarginReport> {
    require_kind(ctx.map(), MapKind::CenterExpectation)?;
    ctx.require_same_monotone()?;
    let tol = T::tol(HERMITIAN_INPUT_TOL);
    let (a, b) = if ctx.pair().f == ctx.pair().g {
        for (x, name) in [(a, "A"), (b, "B")] {
            if !x.is_normal(tol) {
                return Err(Error::Precondition(format!("{name} must be normal")));
            }
        }
        (a.clone(), b.clone())
    } else {
        (hermitian_input(a, "A")?, hermitian_input(b, "B")?)
    };
    if !c.is_central(tol) {
        return Err(Error::Precondition("C must be central".into()));
    }
    let ia = ctx.skew_information(&a)?;
    let ib = ctx.skew_information(&b)?;
    let s = ctx.symmetric_correlation(&a, &b)?;
    let mut m = MarginSet::on_range(ctx.map());
    m.psd_between("cauchy_schwarz", &ia.try_mul(&ib)?, &s.adjoint().try_mul(&s)?)?;
    let lhs = ctx.symmetric_correlation(&a, &b.try_mul(c)?)?;
    let rhs = s.try_mul(c)?;
    let scale = lhs.frobenius_norm().max(rhs.frobenius_norm());
    m.identity("module_law", lhs.distance(&rhs), scale);
    Ok(m.finish(CheckId::ConditionalExpectationCs.name()))
}

/// With `h = √(fg)`:
/// `½(Φ(fA*gA) + Φ(fAgA*)) ⪰ Φ(hA*hA) ⪰ Φ(fA*g) Φ(fg)⁻¹ Φ(gAf)`,
/// and for Hermitian `A` also `I^{f,g}(A) ⪯ I^{h,h}(A) ⪯ Var^{fg,1}(A)`.
pub fn check_chain<T: RealScalar>(ctx: &MeasureContext<T>, a: &BlockDiagonalElement<T>) -> Result<MarginReport> {
    ctx.require_positive_functions()?;
    let (f, g) = (ctx.f_rho(), ctx.g_rho());
    let h_fn = ctx.pair().geometric_mean();
    let h = ctx.function_of_rho(&h_fn)?;
    let fg = ctx.function_of_rho(&ctx.pair().product())?;
    let a_star = a.adjoint();
    let mean = ctx
        .phi_of(&[f, &a_star, g, a])?
        .try_add(&ctx.phi_of(&[f, a, g, &a_star])?)?
        .scale(T::lit(0.5));
    let geometric = ctx.phi_of(&[&h, &a_star, &h, a])?;
    let inverse = ctx.map().codomain_inverse(&ctx.phi(&fg)?, "Φ(f(ρ)g(ρ))")?;
    let projection = BlockDiagonalElement::product(&[
        &ctx.phi_of(&[f, &a_star, g])?,
        &inverse,
        &ctx.phi_of(&[g, a, f])?,
    ])?;
    let mut m = MarginSet::on_range(ctx.map());
    m.psd_between("mean_vs_geometric", &mean, &geometric)?;
    m.psd_between("geometric_vs_projection", &geometric, &projection)?;
    if let Ok(a) = hermitian_input(a, "A") {
        let skew = ctx.skew_information(&a)?;
        let skew_h = ctx.with_pair(FunctionPair::new(h_fn.clone(), h_fn))?.skew_information(&a)?;
        let var = ctx
            .with_pair(FunctionPair::new(ctx.pair().product(), crate::functions::ScalarFunction::Constant(1.0)))?
            .variance(&a)?;
        m.psd_between("skew_vs_geometric_skew", &skew_h, &skew)?;
        m.psd_between("geometric_skew_vs_variance", &var, &skew_h)?;
    }
    Ok(m.finish(CheckId::Chain.name()))
}

/// `I^α(A) ⪯ I^{1/2}(A) ⪯ Var(A)` for a density `ρ` and Hermitian `A`.
pub fn check_alpha_chain<T: RealScalar>(
    rho: &DensityElement<T>,
    alpha: f64,
    a: &BlockDiagonalElement<T>,
) -> Result<MarginReport> {
    let a = hermitian_input(a, "A")?;
    let ctx = alpha_context(rho.map().clone(), rho.rho().clone(), alpha)?;
    let skew_alpha = ctx.skew_information(&a)?;
    let skew_half = ctx.with_pair(FunctionPair::alpha(0.5))?.skew_information(&a)?;
    let var = ctx.with_pair(FunctionPair::classical())?.variance(&a)?;
    let mut m = MarginSet::on_range(rho.map());
    m.psd_between("alpha_vs_half", &skew_half, &skew_alpha)?;
    m.psd_between("half_vs_variance", &var, &skew_half)?;
    Ok(m.finish(CheckId::AlphaChain.name()))
}

/// `C = ⊕ᵢ cᵢ I` from complex coefficients.
pub fn central_element<T: RealScalar>(
    shape: &crate::algebra::AlgebraShape,
    coefficients: &[Complex<T>],
) -> Result<BlockDiagonalElement<T>> {
    BlockDiagonalElement::central(shape, coefficients)
}
