//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All state, moment and map types are generic over a real field `T`
//! (`f32` or `f64`); complex entries are `Complex<T>`.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable as the base field of all matrices in this crate.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Default + Send + Sync {
    /// Default verdict tolerance for exact finite-excitation states.
    fn default_tol() -> Self;

    /// Default verdict tolerance for inputs carrying truncation error.
    fn truncation_tol() -> Self;

    /// Unit roundoff of the type, as `f64`.
    fn unit_roundoff() -> f64;
}

impl Real for f64 {
    fn default_tol() -> Self {
        1e-9
    }
    fn truncation_tol() -> Self {
        1e-6
    }
    fn unit_roundoff() -> f64 {
        f64::EPSILON
    }
}

impl Real for f32 {
    fn default_tol() -> Self {
        1e-4
    }
    fn truncation_tol() -> Self {
        1e-3
    }
    fn unit_roundoff() -> f64 {
        f32::EPSILON as f64
    }
}

/// Complex number over `T`.
pub type C<T> = Complex<T>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts a scalar back to `f64` (for reports and logging).
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A validation tolerance: the requested `f64` value, floored at a few
/// hundred ulps of `T` so single-precision builds stay usable.
#[inline]
pub fn tol<T: Real>(requested: f64) -> T {
    lit(requested.max(256.0 * T::unit_roundoff()))
}

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(lit(re), lit(im))
}

#[inline]
pub fn real<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// `|z|` for a complex scalar.
#[inline]
pub fn modulus<T: Real>(z: C<T>) -> T {
    z.norm_sqr().sqrt()
}
