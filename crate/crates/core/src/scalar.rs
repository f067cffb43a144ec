//! The number field every computation runs over.
//!
//! Two fields are supported: exact rationals ([`Rational`], the default) and
//! binary floating point (`f64`) with a tolerance. Code in this crate is
//! generic over [`Scalar`] and never mixes the two; which one is used is
//! fixed when a model is loaded.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Complex number with [`Scalar`] parts.
pub type Complex<S> = num_complex::Complex<S>;

/// Default relative pivot tolerance and absolute comparison tolerance in
/// float mode.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Which field a model's numbers live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NumericMode {
    Exact,
    Float,
}

impl NumericMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NumericMode::Exact => "exact",
            NumericMode::Float => "float",
        }
    }
}

impl Display for NumericMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tolerances used in float mode. Ignored entirely by exact scalars.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    /// Zero test for elimination residuals, relative to the largest pivot
    /// magnitude seen so far.
    pub pivot: f64,
    /// Absolute tolerance when comparing probabilities and checking model
    /// normalization.
    pub compare: f64,
}

impl Tolerance {
    pub fn uniform(eps: f64) -> Self {
        Tolerance {
            pivot: eps,
            compare: eps,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::uniform(DEFAULT_TOLERANCE)
    }
}

/// A field element. Implemented for [`Rational`] and `f64`.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + Debug + Display + PartialOrd + Send + Sync + 'static
{
    const MODE: NumericMode;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn from_int(value: i64) -> Self {
        Self::from_ratio(value, 1)
    }

    fn to_f64(&self) -> f64;

    /// The exact value, when the field is the rationals.
    fn to_rational(&self) -> Option<Rational>;

    /// Nearest element of this field.
    fn from_rational(value: &Rational) -> Self;

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    fn mul_ref(&self, rhs: &Self) -> Self;

    fn add_ref(&self, rhs: &Self) -> Self;

    fn sub_ref(&self, rhs: &Self) -> Self;

    /// `self += a * b`
    fn add_product(&mut self, a: &Self, b: &Self);

    /// `self -= a * b`
    fn sub_product(&mut self, a: &Self, b: &Self);

    fn is_negative(&self) -> bool;

    /// Zero test used by elimination: exact equality for rationals,
    /// `|x| <= tol.pivot * scale` for floats.
    fn is_negligible(&self, scale: f64, tol: &Tolerance) -> bool;

    /// Equality used for probability comparisons and normalization checks.
    fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool;

    fn is_exact() -> bool {
        Self::MODE == NumericMode::Exact
    }
}

impl Scalar for Rational {
    const MODE: NumericMode = NumericMode::Exact;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn add_product(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self += a * b;
    }

    fn sub_product(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self -= a * b;
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn is_negligible(&self, _scale: f64, _tol: &Tolerance) -> bool {
        self.is_zero()
    }

    fn approx_eq(&self, other: &Self, _tol: &Tolerance) -> bool {
        self == other
    }
}

impl Scalar for f64 {
    const MODE: NumericMode = NumericMode::Float;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<Rational> {
        None
    }

    fn from_rational(value: &Rational) -> Self {
        ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn sub_product(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }

    fn is_negative(&self) -> bool {
        *self < 0.0
    }

    fn is_negligible(&self, scale: f64, tol: &Tolerance) -> bool {
        self.abs() <= tol.pivot * scale
    }

    fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool {
        (self - other).abs() <= tol.compare
    }
}

/// Dot product of two equally long slices.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc.add_product(x, y);
    }
    acc
}

pub fn sum<'a, S: Scalar>(values: impl IntoIterator<Item = &'a S>) -> S {
    let mut acc = S::zero();
    for v in values {
        acc = acc.add_ref(v);
    }
    acc
}

/// Largest magnitude in a slice, zero for an empty slice.
pub fn max_magnitude<S: Scalar>(values: &[S]) -> f64 {
    values.iter().map(Scalar::magnitude).fold(0.0, f64::max)
}

/// `|z|^2` for a complex number.
pub fn norm_sqr<S: Scalar>(z: &Complex<S>) -> S {
    let mut acc = z.re.mul_ref(&z.re);
    acc.add_product(&z.im, &z.im);
    acc
}

pub fn is_one<S: Scalar>(value: &S, tol: &Tolerance) -> bool {
    value.approx_eq(&S::one(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn rational_arithmetic_is_exact() {
        let third = Rational::from_ratio(1, 3);
        let total = sum(&[third.clone(), third.clone(), third]);
        assert!(total.is_one());
        assert_eq!(Rational::from_ratio(2, 4).to_string(), "1/2");
    }

    #[test]
    fn float_negligible_is_relative() {
        let tol = Tolerance::default();
        assert!(1e-12_f64.is_negligible(1.0, &tol));
        assert!(!1e-6_f64.is_negligible(1.0, &tol));
        assert!(1e-6_f64.is_negligible(1e4, &tol));
    }

    #[test]
    fn sub_product_matches_definition() {
        let mut x = Rational::from_int(5);
        x.sub_product(&Rational::from_int(2), &Rational::from_ratio(3, 2));
        assert_eq!(x, Rational::from_int(2));
    }
}
