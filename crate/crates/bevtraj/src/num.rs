//! Scalar abstraction for the geometry and statistics code.
//!
//! Everything numeric in the core is generic over [`Real`] so the same
//! routines run in `f32` or `f64`. The pipeline instantiates `f64` (the
//! crate root exposes concrete aliases); `f32` stays available for callers
//! that trade precision for footprint.

use std::fmt::Debug;

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by the geometry, kinematics and statistics
/// routines.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for lifting an `f64` literal into a generic scalar.
#[inline]
pub fn real<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("literal representable in scalar type")
}
