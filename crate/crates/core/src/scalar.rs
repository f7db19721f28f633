use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type the optical models are evaluated in: `f32` or `f64`.
///
/// High-finesse cavities have linewidths around 1e-7 of the optical
/// frequency, so anything that searches for resonances wants `f64`. The
/// matrix algebra itself is happy in either.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Sum + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
