//! Scalar backends: exact rationals for identity checking, `f64` for
//! Fredholm numerics. Everything downstream is generic over [`Scalar`].

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// Field operations required by the kernel computations.
///
/// Two implementations are provided: [`BigRational`] (exact; equality checks
/// demand literal equality) and [`f64`] (fast; comparisons go through
/// tolerances).
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact and `==` is a meaningful check.
    const EXACT: bool;

    /// Short backend tag used in reports ("rational" or "float").
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    /// `num/den` with `den != 0`.
    fn from_ratio(num: i64, den: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// Integer power; negative exponents require a nonzero base.
    fn powi(&self, exp: i64) -> Self;
    /// Magnitude as `f64`, used for pivot selection and diagnostics.
    fn abs_f64(&self) -> f64;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn powi(&self, exp: i64) -> Self {
        f64::powi(*self, exp as i32)
    }
    fn abs_f64(&self) -> f64 {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const NAME: &'static str = "rational";

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn powi(&self, exp: i64) -> Self {
        if exp == 0 {
            return Scalar::one();
        }
        let e = exp.unsigned_abs() as u32;
        let p = num::pow::pow(self.clone(), e as usize);
        if exp < 0 {
            <BigRational as Scalar>::one() / p
        } else {
            p
        }
    }
    fn abs_f64(&self) -> f64 {
        ToPrimitive::to_f64(&self.abs()).unwrap_or(f64::INFINITY)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Sum of a scalar iterator (avoids the `Sum` bound on `Scalar`).
pub fn sum<S: Scalar>(iter: impl IntoIterator<Item = S>) -> S {
    iter.into_iter().fold(S::zero(), |a, b| a + b)
}

/// Product of a scalar iterator.
pub fn product<S: Scalar>(iter: impl IntoIterator<Item = S>) -> S {
    iter.into_iter().fold(S::one(), |a, b| a * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_powi_negative() {
        let x = <BigRational as Scalar>::from_ratio(3, 2);
        let inv2 = x.powi(-2);
        assert_eq!(inv2, <BigRational as Scalar>::from_ratio(4, 9));
    }

    #[test]
    fn float_ratio() {
        assert_eq!(<f64 as Scalar>::from_ratio(1, 4), 0.25);
    }
}
