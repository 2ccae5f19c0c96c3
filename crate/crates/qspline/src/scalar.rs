//! Scalar abstraction: the numeric kernels are generic over the floating
//! point type through [`Scalar`], with `f64` as the working default.

use num_traits::{Float, FromPrimitive};

/// Floating point scalar usable throughout the crate: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + num_traits::NumAssignOps
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal into the working scalar type.
///
/// Panics if the value is not representable, which cannot happen for the
/// finite constants this crate feeds it.
pub(crate) fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite literal representable in scalar type")
}

/// Lossy view of a scalar as `f64`, used for diagnostics and reports.
pub(crate) fn approx_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `n` uniformly spaced values covering `[a, b]` inclusive.
pub fn linspace<T: Scalar>(a: T, b: T, n: usize) -> Vec<T> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (b - a) / real::<T>((n - 1) as f64);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                a + step * real::<T>(i as f64)
            }
        })
        .collect()
}
