//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the simulator is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Converts a count or index into this scalar type.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Speed of light in mm·GHz (mm per ns).
pub const SPEED_OF_LIGHT_MM_GHZ: f64 = 299.792_458;

/// Free-space wavenumber in rad/mm at `f_ghz`.
#[inline]
pub fn wavenumber<T: Real>(f_ghz: T) -> T {
    T::TAU() * f_ghz / T::lit(SPEED_OF_LIGHT_MM_GHZ)
}

/// Free-space wavelength in mm at `f_ghz`.
#[inline]
pub fn wavelength<T: Real>(f_ghz: T) -> T {
    T::lit(SPEED_OF_LIGHT_MM_GHZ) / f_ghz
}
