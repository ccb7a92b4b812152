//! Floating-point scalar abstraction shared by the continuous modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + FromStr
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; panics only on non-representable input, which
    /// cannot happen for the finite constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Absolute slack used by separation and ball-membership comparisons at
    /// grid spacing `delta`.
    #[inline]
    fn sep_tolerance(delta: Self) -> Self {
        let eps = Self::epsilon() * Self::lit(16.0);
        eps.min(delta / Self::lit(1024.0))
    }

    /// Floor of `self / cell` as a cell index.
    #[inline]
    fn cell(self, cell: Self) -> i64 {
        (self / cell).floor().to_i64().expect("cell index fits in i64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
