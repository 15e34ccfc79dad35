//! Scalar abstraction shared by every numerical module.
//!
//! All numerics are generic over a real field `T` (in practice `f32` or
//! `f64`); operators act on `Complex<T>` vectors.

use nalgebra::{ComplexField, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};

/// Real scalar type the engine is generic over.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug + LowerExp + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug + LowerExp + Send + Sync + 'static
{
}

/// Complex scalar over `T`.
pub type Cx<T> = Complex<T>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Cx<T> {
    Complex::new(real(re), real(im))
}

#[inline]
pub fn cr<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn czero<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Cx<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub fn ci<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::one())
}

#[inline]
pub fn cabs<T: Real>(z: Cx<T>) -> T {
    z.re.hypot(z.im)
}

/// Argument in `(-pi, pi]`; the negative real axis (including `-0.0`
/// imaginary parts) maps to `+pi`.
#[inline]
pub fn carg<T: Real>(z: Cx<T>) -> T {
    if z.im == T::zero() && z.re < T::zero() {
        return T::pi();
    }
    z.im.atan2(z.re)
}

/// Principal square root with branch cut on `(-inf, 0]`, continuous from
/// above: `sqrt(-x) = i sqrt(x)` for `x > 0`.
pub fn csqrt<T: Real>(z: Cx<T>) -> Cx<T> {
    let two = real::<T>(2.0);
    if z.re == T::zero() && z.im == T::zero() {
        return czero();
    }
    let r = cabs(z);
    let w = ((r + z.re.abs()) / two).sqrt();
    if z.re >= T::zero() {
        Complex::new(w, z.im / (two * w))
    } else if z.im >= T::zero() {
        Complex::new(z.im.abs() / (two * w), w)
    } else {
        Complex::new(z.im.abs() / (two * w), -w)
    }
}

#[inline]
pub fn cexp<T: Real>(z: Cx<T>) -> Cx<T> {
    let m = z.re.exp();
    Complex::new(m * z.im.cos(), m * z.im.sin())
}

#[inline]
pub fn cscale<T: Real>(z: Cx<T>, s: T) -> Cx<T> {
    Complex::new(z.re * s, z.im * s)
}

#[inline]
pub fn is_finite_c<T: Real>(z: Cx<T>) -> bool {
    let f = |x: T| to_f64(x).is_finite();
    f(z.re) && f(z.im)
}

/// Machine epsilon of `T`.
#[inline]
pub fn eps<T: Real>() -> T {
    T::default_epsilon()
}

/// `exp(z) - 1` without cancellation for small `|z|`.
pub fn cexpm1<T: Real>(z: Cx<T>) -> Cx<T> {
    if cabs(z) < real(0.5) {
        // Taylor series; 24 terms reach double precision for |z| < 1/2.
        let mut term = z;
        let mut sum = z;
        for k in 2..30 {
            term = term * z / cr(real::<T>(k as f64));
            sum += term;
            if cabs(term) <= eps::<T>() * cabs(sum) {
                break;
            }
        }
        sum
    } else {
        cexp(z) - cone()
    }
}

/// `phi_1(z) = (exp(z) - 1) / z`, with `phi_1(0) = 1`.
pub fn phi1<T: Real>(z: Cx<T>) -> Cx<T> {
    if cabs(z) < real(0.5) {
        let mut term = cone::<T>();
        let mut sum = cone::<T>();
        for k in 2..32 {
            term = term * z / cr(real::<T>(k as f64));
            sum += term;
            if cabs(term) <= eps::<T>() * cabs(sum) {
                break;
            }
        }
        sum
    } else {
        cexpm1(z) / z
    }
}

#[allow(dead_code)]
pub(crate) fn complex_field_sqrt<T: Real>(z: Cx<T>) -> Cx<T> {
    ComplexField::sqrt(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_sqrt_branch() {
        let s = csqrt(cx::<f64>(-4.0, 0.0));
        assert_eq!(s, Complex::new(0.0, 2.0));
        let s = csqrt(Complex::new(-4.0f64, -0.0));
        assert_eq!(s, Complex::new(0.0, 2.0));
        let s = csqrt(cx::<f64>(1.0, 2.0));
        let back = s * s;
        assert!((back - cx(1.0, 2.0)).norm() < 1e-15);
        assert!((s.re - 1.272_019_649_514_069).abs() < 1e-12);
        assert!((s.im - 0.786_151_377_757_423).abs() < 1e-12);
    }

    #[test]
    fn arg_convention() {
        assert_eq!(carg(Complex::new(-1.0f64, -0.0)), std::f64::consts::PI);
        assert!((carg(cx::<f64>(0.0, -1.0)) + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn phi1_small_and_large() {
        let z = cx::<f64>(1e-9, 0.0);
        assert!((phi1(z) - cx(1.0 + 5e-10, 0.0)).norm() < 1e-15);
        let z = cx::<f64>(-3.0, 1.0);
        let direct = (z.exp() - 1.0) / z;
        assert!((phi1(z) - direct).norm() < 1e-14);
    }
}
