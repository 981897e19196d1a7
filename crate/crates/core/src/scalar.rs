//! Scalar abstraction so the simulation kernels run on `f32` or `f64`.

use std::fmt::{Debug, Display};

/// Floating-point scalar used throughout the simulator.
///
/// All model state (potentials, currents, times) is expressed in this type.
/// `f64` is the default choice for experiments; `f32` is available for
/// memory-bound population runs.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::NumAssignOps
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Shorthand conversion from an `f64` literal. Panics only for values
    /// outside the target type's range, which never happens for the model
    /// constants used here.
    fn from_f64_lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Lossy widening to `f64`, used for reporting and histogram binning.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub fn lit<S: Scalar>(x: f64) -> S {
    S::from_f64_lit(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_roundtrip() {
        assert_eq!(lit::<f64>(0.25), 0.25);
        assert_eq!(lit::<f32>(0.25), 0.25f32);
    }
}
