//! Scalar abstraction shared by the measure, path, stochastic-integral and
//! Dyson modules.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Real floating point type the core math is written against (f32 or f64).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
    + crate::cameron_martin::PathScalar<R = Self>
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Real 3-vector.
pub type Vec3<T> = [T; 3];
/// Complex 3-vector.
pub type CVec3<T> = [Complex<T>; 3];

#[inline]
pub fn dot<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm<T: Real>(a: &Vec3<T>) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub fn cross<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn sub<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale<T: Real>(s: T, a: &Vec3<T>) -> Vec3<T> {
    [s * a[0], s * a[1], s * a[2]]
}

/// `k · z` for a real frequency and a complex point.
#[inline]
pub fn rdot_c<T: Real>(k: &Vec3<T>, z: &CVec3<T>) -> Complex<T> {
    z[0] * k[0] + z[1] * k[1] + z[2] * k[2]
}

/// Complex embedding `c·x + shift`.
#[inline]
pub fn embed<T: Real>(c: Complex<T>, x: &Vec3<T>, shift: &Vec3<T>) -> CVec3<T> {
    [
        c * x[0] + shift[0],
        c * x[1] + shift[1],
        c * x[2] + shift[2],
    ]
}

/// The fixed branch `√i = e^{iπ/4}`.
#[inline]
pub fn sqrt_i<T: Real>() -> Complex<T> {
    Complex::from_polar(T::one(), T::FRAC_PI_4())
}

/// `√(iħ) = √ħ·e^{iπ/4}`.
#[inline]
pub fn sqrt_i_hbar<T: Real>(hbar: T) -> Complex<T> {
    sqrt_i::<T>() * hbar.sqrt()
}
