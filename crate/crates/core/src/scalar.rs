//! Floating-point abstraction for the numerical core.

use num_traits::{Float, FromPrimitive};

/// Scalar type the solver and kernel machinery are generic over.
///
/// `f32` and `f64` both satisfy the bound; the acceptance tolerances in this
/// workspace assume `f64`.
pub trait Scalar:
    Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite literal converts to scalar")
    }

    /// Lossy view as `f64`, used for error reporting and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_roundtrip() {
        assert_eq!(f64::lit(0.5), 0.5);
        assert_eq!(f32::lit(0.5), 0.5f32);
        assert_eq!(1.25f64.as_f64(), 1.25);
    }
}
