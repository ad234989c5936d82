//! Real scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar underlying the complex matrices (`f32` or `f64`).
///
/// Tolerances throughout the crate are written as `f64` literals and routed
/// through [`RealScalar::tol`], which never lets a threshold drop below a few
/// ulps of the concrete type.
pub trait RealScalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Multiple of machine epsilon used as the floor for relative tolerances.
    const EPS_FLOOR: f64;

    /// Converts an `f64` literal. Panics only for values not representable at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// A relative tolerance, floored at `EPS_FLOOR * epsilon` for narrow types.
    #[inline]
    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(Self::EPS_FLOOR);
        Self::lit(x).max(floor)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl RealScalar for f32 {
    const EPS_FLOOR: f64 = 64.0;
}

impl RealScalar for f64 {
    const EPS_FLOOR: f64 = 16.0;
}

/// `max(1, x)`, the normalization used for relative tolerances.
#[inline]
pub fn unit_floor<T: RealScalar>(x: T) -> T {
    x.max(T::one())
}
