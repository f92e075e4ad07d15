//! Floating-point abstraction the solver core is generic over.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, NumCast};

/// Scalar type for all field values, phases, and energies: `f32` or `f64`.
///
/// The verification tolerances shipped with the crate are calibrated for
/// `f64`; `f32` instantiations are suitable for quick exploration only.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssignOps
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Convert from any primitive number, panicking if the value cannot be
    /// represented. Intended for literals and grid indices.
    fn cast<T: NumCast>(value: T) -> Self {
        NumCast::from(value).expect("numeric literal representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
