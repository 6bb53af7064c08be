//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::RealField;
use num_traits::FromPrimitive;

/// Real scalar type the geometry is generic over (`f32` or `f64`).
pub trait Real: RealField + Copy + FromPrimitive {}

impl<T> Real for T where T: RealField + Copy + FromPrimitive {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts `x` to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_subset().unwrap_or(f64::NAN)
}
