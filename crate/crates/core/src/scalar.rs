use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type used by bound formulas and Monte Carlo estimates.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    fn of(x: usize) -> Self {
        Self::from_usize(x).expect("representable")
    }

    fn of_f64(x: f64) -> Self {
        Self::from_f64(x).expect("representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `ln k! = Σ ln i`, summed so it never overflows.
pub fn ln_factorial<T: Scalar>(k: usize) -> T {
    (2..=k).fold(T::zero(), |acc, i| acc + T::of(i).ln())
}
