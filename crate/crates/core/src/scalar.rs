//! Scalar abstraction: every numeric routine in this crate is generic over a
//! floating point type so the same code runs at f32 and f64 precision.

/// Floating point scalar: f32 or f64.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + std::fmt::Debug
    + std::fmt::Display
    + std::iter::Sum
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an f64 constant into the working scalar type.
///
/// Panics only if the target type cannot represent finite f64 values at all,
/// which no `Real` implementor does.
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 constant converts to any Real scalar")
}
