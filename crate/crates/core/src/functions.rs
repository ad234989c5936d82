//! Real functions applied to a Hermitian `ρ` by spectral calculus, and the
//! same-monotonicity test for pairs of them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::RealScalar;

/// Slack allowed in `(f(x) − f(y))(g(x) − g(y)) ≥ 0`.
pub const SAME_MONOTONE_TOL: f64 = 1e-12;

/// Interior grid points added to the spectrum by the numeric monotonicity test.
pub const MONOTONE_GRID_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Real,
    NonNegative,
    Positive,
}

impl Domain {
    pub fn contains(self, x: f64) -> bool {
        match self {
            Domain::Real => x.is_finite(),
            Domain::NonNegative => x >= 0.0,
            Domain::Positive => x > 0.0,
        }
    }

    fn meet(self, other: Domain) -> Domain {
        use Domain::*;
        match (self, other) {
            (Positive, _) | (_, Positive) => Positive,
            (NonNegative, _) | (_, NonNegative) => NonNegative,
            _ => Real,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    Unknown,
}

impl Monotonicity {
    fn flip(self) -> Self {
        match self {
            Monotonicity::Increasing => Monotonicity::Decreasing,
            Monotonicity::Decreasing => Monotonicity::Increasing,
            other => other,
        }
    }

    fn of_sign(s: f64) -> Self {
        if s > 0.0 {
            Monotonicity::Increasing
        } else if s < 0.0 {
            Monotonicity::Decreasing
        } else {
            Monotonicity::Constant
        }
    }
}

/// A continuous real function of one variable.
///
/// Parameters are stored in `f64`; evaluation happens in any [`RealScalar`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ScalarFunction {
    /// `x^p` on `x ≥ 0`, with `x⁰ = 1` everywhere including `0⁰`.
    Power(f64),
    Constant(f64),
    Identity,
    Exp,
    /// Natural logarithm on `x > 0`.
    Log,
    /// `c₀ + c₁x + c₂x² + …`
    Polynomial(Vec<f64>),
    /// `a·x + b`
    Affine(f64, f64),
    /// Pointwise product.
    Product(Box<ScalarFunction>, Box<ScalarFunction>),
    /// Pointwise square root of a nonnegative function.
    Sqrt(Box<ScalarFunction>),
}

impl ScalarFunction {
    pub fn product(f: ScalarFunction, g: ScalarFunction) -> Self {
        ScalarFunction::Product(Box::new(f), Box::new(g))
    }

    pub fn sqrt(f: ScalarFunction) -> Self {
        ScalarFunction::Sqrt(Box::new(f))
    }

    pub fn domain(&self) -> Domain {
        match self {
            ScalarFunction::Power(p) if *p < 0.0 => Domain::Positive,
            ScalarFunction::Power(_) => Domain::NonNegative,
            ScalarFunction::Log => Domain::Positive,
            ScalarFunction::Constant(_)
            | ScalarFunction::Identity
            | ScalarFunction::Exp
            | ScalarFunction::Polynomial(_)
            | ScalarFunction::Affine(..) => Domain::Real,
            ScalarFunction::Product(f, g) => f.domain().meet(g.domain()),
            ScalarFunction::Sqrt(f) => f.domain(),
        }
    }

    /// Whether arguments in `[−ε, 0)` may be snapped to zero before evaluation.
    pub fn wants_nonnegative(&self) -> bool {
        self.domain() != Domain::Real
    }

    pub fn eval<T: RealScalar>(&self, x: T) -> Result<T> {
        let violation = || Error::DomainViolation {
            function: self.to_string(),
            value: x.as_f64(),
        };
        if !self.domain().contains(x.as_f64()) {
            return Err(violation());
        }
        let y = match self {
            ScalarFunction::Power(p) => {
                if *p == 0.0 {
                    T::one()
                } else if *p == 1.0 {
                    x
                } else {
                    x.powf(T::lit(*p))
                }
            }
            ScalarFunction::Constant(c) => T::lit(*c),
            ScalarFunction::Identity => x,
            ScalarFunction::Exp => x.exp(),
            ScalarFunction::Log => x.ln(),
            ScalarFunction::Polynomial(c) => c.iter().rev().fold(T::zero(), |acc, &ck| acc * x + T::lit(ck)),
            ScalarFunction::Affine(a, b) => T::lit(*a) * x + T::lit(*b),
            ScalarFunction::Product(f, g) => f.eval(x)? * g.eval(x)?,
            ScalarFunction::Sqrt(f) => {
                let v = f.eval(x)?;
                if v < T::zero() {
                    return Err(violation());
                }
                v.sqrt()
            }
        };
        if y.is_finite() {
            Ok(y)
        } else {
            Err(violation())
        }
    }

    /// Monotonicity on `[lo, hi]`, decided from the formula alone.
    pub fn monotonicity_on(&self, lo: f64, hi: f64) -> Monotonicity {
        if lo == hi {
            return Monotonicity::Constant;
        }
        match self {
            ScalarFunction::Power(p) => Monotonicity::of_sign(*p),
            ScalarFunction::Constant(_) => Monotonicity::Constant,
            ScalarFunction::Identity | ScalarFunction::Exp | ScalarFunction::Log => Monotonicity::Increasing,
            ScalarFunction::Affine(a, _) => Monotonicity::of_sign(*a),
            ScalarFunction::Polynomial(c) => polynomial_monotonicity(c, lo),
            ScalarFunction::Sqrt(f) => f.monotonicity_on(lo, hi),
            ScalarFunction::Product(f, g) => match (f.as_constant(), g.as_constant()) {
                (Some(c), _) => scale_monotonicity(g.monotonicity_on(lo, hi), c),
                (_, Some(c)) => scale_monotonicity(f.monotonicity_on(lo, hi), c),
                _ => Monotonicity::Unknown,
            },
        }
    }

    fn as_constant(&self) -> Option<f64> {
        match self {
            ScalarFunction::Constant(c) => Some(*c),
            ScalarFunction::Power(p) if *p == 0.0 => Some(1.0),
            ScalarFunction::Polynomial(c) if c.iter().skip(1).all(|&x| x == 0.0) => {
                Some(c.first().copied().unwrap_or(0.0))
            }
            ScalarFunction::Affine(a, b) if *a == 0.0 => Some(*b),
            _ => None,
        }
    }
}

fn scale_monotonicity(m: Monotonicity, c: f64) -> Monotonicity {
    if c > 0.0 {
        m
    } else if c < 0.0 {
        m.flip()
    } else {
        Monotonicity::Constant
    }
}

fn polynomial_monotonicity(c: &[f64], lo: f64) -> Monotonicity {
    let tail = c.get(1..).unwrap_or(&[]);
    if tail.iter().all(|&x| x == 0.0) {
        return Monotonicity::Constant;
    }
    if tail.len() == 1 {
        return Monotonicity::of_sign(tail[0]);
    }
    // on x ≥ 0 every monomial of positive degree is nondecreasing
    if lo >= 0.0 {
        if tail.iter().all(|&x| x >= 0.0) {
            return Monotonicity::Increasing;
        }
        if tail.iter().all(|&x| x <= 0.0) {
            return Monotonicity::Decreasing;
        }
    }
    Monotonicity::Unknown
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            ScalarFunction::Power(p) => write!(f, "pow:{p}"),
            ScalarFunction::Constant(c) => write!(f, "const:{c}"),
            ScalarFunction::Identity => f.write_str("id"),
            ScalarFunction::Exp => f.write_str("exp"),
            ScalarFunction::Log => f.write_str("log"),
            ScalarFunction::Polynomial(c) => write!(f, "poly:{}", list(c)),
            ScalarFunction::Affine(a, b) => write!(f, "affine:{a},{b}"),
            ScalarFunction::Product(a, b) => write!(f, "({a})*({b})"),
            ScalarFunction::Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

fn parse_err(s: &str, why: &str) -> Error {
    Error::Parse(format!("function `{s}`: {why}"))
}

fn parse_numbers(s: &str, args: &str) -> Result<Vec<f64>> {
    args.split(',')
        .map(|t| {
            let v: f64 = t.trim().parse().map_err(|_| parse_err(s, &format!("`{t}` is not a number")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(s, "parameters must be finite"))
            }
        })
        .collect()
}

/// Splits `(left)*(right)` at the top-level `*`.
fn split_product(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

fn strip_parens(s: &str) -> &str {
    let t = s.trim();
    if t.starts_with('(') && t.ends_with(')') {
        let inner = &t[1..t.len() - 1];
        let mut depth = 0i32;
        for ch in inner.chars() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth < 0 {
                        return t;
                    }
                }
                _ => {}
            }
        }
        if depth == 0 {
            return inner;
        }
    }
    t
}

impl FromStr for ScalarFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = strip_parens(s);
        if let Some((a, b)) = split_product(t) {
            return Ok(ScalarFunction::product(a.parse()?, b.parse()?));
        }
        if let Some(inner) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            return Ok(ScalarFunction::sqrt(inner.parse()?));
        }
        let (head, args) = match t.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a)),
            None => (t, None),
        };
        let one = |name: &str| -> Result<f64> {
            let v = parse_numbers(s, args.ok_or_else(|| parse_err(s, &format!("{name} needs a parameter")))?)?;
            match v.as_slice() {
                [x] => Ok(*x),
                _ => Err(parse_err(s, &format!("{name} takes exactly one parameter"))),
            }
        };
        let no_args = |f: ScalarFunction| match args {
            None => Ok(f),
            Some(_) => Err(parse_err(s, "takes no parameters")),
        };
        match head {
            "pow" => Ok(ScalarFunction::Power(one("pow")?)),
            "const" => Ok(ScalarFunction::Constant(one("const")?)),
            "id" => no_args(ScalarFunction::Identity),
            "exp" => no_args(ScalarFunction::Exp),
            "log" => no_args(ScalarFunction::Log),
            "poly" => {
                let c = parse_numbers(s, args.ok_or_else(|| parse_err(s, "poly needs coefficients"))?)?;
                Ok(ScalarFunction::Polynomial(c))
            }
            "affine" => {
                let v = parse_numbers(s, args.ok_or_else(|| parse_err(s, "affine needs a,b"))?)?;
                match v.as_slice() {
                    [a, b] => Ok(ScalarFunction::Affine(*a, *b)),
                    _ => Err(parse_err(s, "affine takes exactly two parameters")),
                }
            }
            _ => Err(parse_err(s, "unknown function")),
        }
    }
}

impl TryFrom<String> for ScalarFunction {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ScalarFunction> for String {
    fn from(f: ScalarFunction) -> String {
        f.to_string()
    }
}

/// How a pair was shown to be same-monotone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SameMonotone {
    /// Both functions have compatible symbolic monotonicity on the interval.
    Symbolic,
    /// The pointwise inequality held on the spectrum and a grid of its enclosing interval.
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionPair {
    pub f: ScalarFunction,
    pub g: ScalarFunction,
}

impl FunctionPair {
    pub fn new(f: ScalarFunction, g: ScalarFunction) -> Self {
        Self { f, g }
    }

    /// `(x^{1−α}, x^α)`.
    pub fn alpha(alpha: f64) -> Self {
        Self::new(ScalarFunction::Power(1.0 - alpha), ScalarFunction::Power(alpha))
    }

    /// `(x, 1)`, giving the classical variance and covariance.
    pub fn classical() -> Self {
        Self::new(ScalarFunction::Identity, ScalarFunction::Constant(1.0))
    }

    pub fn same_monotone_on(&self, points: &[f64]) -> Result<bool> {
        let fv = points.iter().map(|&x| self.f.eval(x)).collect::<Result<Vec<_>>>()?;
        let gv = points.iter().map(|&x| self.g.eval(x)).collect::<Result<Vec<_>>>()?;
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if (fv[i] - fv[j]) * (gv[i] - gv[j]) < -SAME_MONOTONE_TOL {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Certifies `(f(x) − f(y))(g(x) − g(y)) ≥ 0` on the given spectrum, first
    /// symbolically and otherwise on the spectrum plus a uniform grid of its hull.
    pub fn certify_same_monotone(&self, spectrum: &[f64]) -> Result<SameMonotone> {
        let lo = spectrum.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = spectrum.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if spectrum.is_empty() || lo == hi {
            return Ok(SameMonotone::Symbolic);
        }
        use Monotonicity::*;
        match (self.f.monotonicity_on(lo, hi), self.g.monotonicity_on(lo, hi)) {
            (Constant, _) | (_, Constant) | (Increasing, Increasing) | (Decreasing, Decreasing) => {
                return Ok(SameMonotone::Symbolic)
            }
            _ => {}
        }
        let mut points = spectrum.to_vec();
        let steps = MONOTONE_GRID_POINTS + 1;
        points.extend((1..steps).map(|k| lo + (hi - lo) * k as f64 / steps as f64));
        if self.same_monotone_on(&points)? {
            Ok(SameMonotone::Numeric)
        } else {
            Err(Error::NotSameMonotone {
                f: self.f.to_string(),
                g: self.g.to_string(),
            })
        }
    }

    pub fn product(&self) -> ScalarFunction {
        ScalarFunction::product(self.f.clone(), self.g.clone())
    }

    /// `√(fg)`.
    pub fn geometric_mean(&self) -> ScalarFunction {
        ScalarFunction::sqrt(self.product())
    }
}

impl fmt::Display for FunctionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.f, self.g)
    }
}
