//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the simulator is generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the value is unrepresentable,
    /// which never happens for the finite constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Wraps an angle in degrees into `[0, 360)`.
pub fn wrap_deg<T: Scalar>(deg: T) -> T {
    let full = T::lit(360.0);
    let r = deg % full;
    let r = if r < T::zero() { r + full } else { r };
    // `-tiny % 360 + 360` can round up to exactly 360.
    if r >= full {
        T::zero()
    } else {
        r
    }
}

/// Unsigned angular distance between two bearings, folded to `[0, 180]`.
pub fn angular_distance<T: Scalar>(a: T, b: T) -> T {
    let d = wrap_deg(a - b);
    let half = T::lit(180.0);
    if d > half {
        T::lit(360.0) - d
    } else {
        d
    }
}
