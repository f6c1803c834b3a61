//! Scalar abstraction: the numerical core is generic over the working
//! floating-point type.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the toolkit computes with (`f32` or `f64`).
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

/// Lower an `f64` literal into the working scalar type.
pub(crate) fn lit<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("literal not representable in scalar type")
}

/// `x^n` for `x >= 0` and real `n`, computed as `exp(n ln x)` with the
/// `x = 0` case mapped to `0`. Non-integer exponents (n = 9.65, 27.9)
/// make the log route the defined one on the nonnegative cone.
pub(crate) fn powx<F: Real>(x: F, n: F) -> F {
    if x <= F::zero() {
        F::zero()
    } else {
        (n * x.ln()).exp()
    }
}
