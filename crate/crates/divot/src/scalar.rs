//! Scalar abstraction: every numeric routine in this crate is generic over
//! the floating-point type through [`Real`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
///
/// The solver's default tolerances assume `f64`; `f32` works but needs
/// correspondingly looser settings.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + 'static
{
    /// Converts an `f64` constant into `Self`. Used for literals in formulas.
    fn c(value: f64) -> Self {
        Self::from_f64(value).expect("constant not representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
