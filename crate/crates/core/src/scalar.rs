//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar usable by the solvers (implemented for `f32` and `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(Self::nan)
    }

    /// Converts to `f64` for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// A tolerance of `x`, floored at a small multiple of machine epsilon so that
    /// tolerances tuned for `f64` stay meaningful in lower precision.
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(64.0))
    }

    /// Square root of machine epsilon scaled up; used where `f64` tolerances of order
    /// `1e-6..1e-9` would be below the attainable accuracy of the type.
    fn loose_tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon().sqrt() * Self::lit(4.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub(crate) fn pi<T: Real>() -> T {
    T::PI()
}

pub(crate) fn two_pi<T: Real>() -> T {
    T::PI() + T::PI()
}

/// `x` reduced into `[0, 2π)`.
pub(crate) fn reduce_angle<T: Real>(x: T) -> T {
    let tp = two_pi::<T>();
    let r = x % tp;
    if r < T::zero() {
        r + tp
    } else {
        r
    }
}

