//! Scalar abstraction shared by the numerical core.
//!
//! Everything that is pure linear algebra is written against [`Real`], which
//! `f32` and `f64` implement. Simulation, statistics and file formats work in
//! `f64`.

use std::fmt::LowerExp;

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::ToPrimitive;

/// Real scalar usable by the numerical core.
pub trait Real: RealField + Copy + ToPrimitive + LowerExp {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<R: Real>(x: f64) -> R {
    nalgebra::convert(x)
}

#[inline]
pub fn to_f64<R: Real>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A tolerance of `base`, widened for scalars whose precision cannot reach it.
#[inline]
pub fn tol<R: Real>(base: f64) -> R {
    let eps = to_f64(R::default_epsilon());
    lit(base.max(1e3 * eps))
}

#[inline]
pub fn polar<R: Real>(modulus: R, phase: R) -> Complex<R> {
    Complex::new(modulus * phase.cos(), modulus * phase.sin())
}

#[inline]
pub fn modulus<R: Real>(z: Complex<R>) -> R {
    z.re.hypot(z.im)
}

#[inline]
pub fn phase<R: Real>(z: Complex<R>) -> R {
    z.im.atan2(z.re)
}

/// Principal square root of a complex number.
pub fn csqrt<R: Real>(z: Complex<R>) -> Complex<R> {
    let r = modulus(z);
    if r == R::zero() {
        return Complex::new(R::zero(), R::zero());
    }
    let half: R = lit(0.5);
    let re = ((r + z.re) * half).sqrt();
    let im = ((r - z.re) * half).sqrt();
    Complex::new(re, if z.im < R::zero() { -im } else { im })
}

#[inline]
pub fn cexp<R: Real>(z: Complex<R>) -> Complex<R> {
    polar(z.re.exp(), z.im)
}

#[inline]
pub fn c<R: Real>(re: f64, im: f64) -> Complex<R> {
    Complex::new(lit(re), lit(im))
}
