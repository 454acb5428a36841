//! Dual numbers and the scalar arithmetic they share with `f64`.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic shared by `f64` and (nested) dual numbers.
///
/// Evaluators written against this trait run unchanged on plain floats and
/// on dual numbers of any nesting depth, which is how every derivative in
/// this crate is produced.
pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(c: f64) -> Self;

    /// Standard (real) part, with all derivative information discarded.
    fn re(&self) -> f64;

    /// True when the value and every derivative component are finite.
    fn all_finite(&self) -> bool;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn scale(self, c: f64) -> Self {
        self * Self::from_f64(c)
    }

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn asinh(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, e: f64) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(c: f64) -> Self {
        c
    }

    #[inline]
    fn re(&self) -> f64 {
        *self
    }

    #[inline]
    fn all_finite(&self) -> bool {
        self.is_finite()
    }

    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }

    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }

    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }

    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }

    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }

    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }

    #[inline]
    fn asinh(self) -> Self {
        f64::asinh(self)
    }

    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }

    #[inline]
    fn powf(self, e: f64) -> Self {
        f64::powf(self, e)
    }
}

/// A dual number `re + eps * d` with `d^2 = 0`.
///
/// Nesting (`Dual<Dual<f64>>`, ...) yields exact mixed higher derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

/// First-order dual scalar.
pub type D1 = Dual<f64>;
/// Second-order (nested) dual scalar.
pub type D2 = Dual<D1>;
/// Third-order (nested) dual scalar.
pub type D3 = Dual<D2>;

impl<T: Scalar> Dual<T> {
    #[inline]
    pub fn new(re: T, eps: T) -> Self {
        Dual { re, eps }
    }

    /// Lift a value with zero derivative part.
    #[inline]
    pub fn constant(re: T) -> Self {
        Dual {
            re,
            eps: T::zero(),
        }
    }

    /// Lift a value seeded with unit derivative part.
    #[inline]
    pub fn seeded(re: T) -> Self {
        Dual { re, eps: T::one() }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;

    #[inline]
    fn add(self, rhs: Self) -> Self {
        Dual::new(self.re + rhs.re, self.eps + rhs.eps)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;

    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Dual::new(self.re - rhs.re, self.eps - rhs.eps)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;

    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Dual::new(
            self.re * rhs.re,
            self.re * rhs.eps + self.eps * rhs.re,
        )
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;

    #[inline]
    fn div(self, rhs: Self) -> Self {
        let value = self.re / rhs.re;
        Dual::new(value, (self.eps - value * rhs.eps) / rhs.re)
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    #[inline]
    fn from_f64(c: f64) -> Self {
        Dual::constant(T::from_f64(c))
    }

    #[inline]
    fn re(&self) -> f64 {
        self.re.re()
    }

    #[inline]
    fn all_finite(&self) -> bool {
        self.re.all_finite() && self.eps.all_finite()
    }

    #[inline]
    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.eps * self.re.cos())
    }

    #[inline]
    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -(self.eps * self.re.sin()))
    }

    #[inline]
    fn exp(self) -> Self {
        let value = self.re.exp();
        Dual::new(value, self.eps * value)
    }

    #[inline]
    fn ln(self) -> Self {
        Dual::new(self.re.ln(), self.eps / self.re)
    }

    #[inline]
    fn sqrt(self) -> Self {
        let root = self.re.sqrt();
        Dual::new(root, self.eps / root.scale(2.0))
    }

    /// `|u|` with derivative `sign(u) u'`; the sign at `u = 0` is taken as 0.
    #[inline]
    fn abs(self) -> Self {
        let sign = if self.re.re() > 0.0 {
            1.0
        } else if self.re.re() < 0.0 {
            -1.0
        } else {
            0.0
        };
        Dual::new(self.re.abs(), self.eps.scale(sign))
    }

    #[inline]
    fn asinh(self) -> Self {
        let slope = (self.re * self.re + T::one()).sqrt();
        Dual::new(self.re.asinh(), self.eps / slope)
    }

    #[inline]
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        Dual::new(
            self.re.powi(n),
            self.eps * self.re.powi(n - 1).scale(n as f64),
        )
    }

    #[inline]
    fn powf(self, e: f64) -> Self {
        Dual::new(
            self.re.powf(e),
            self.eps * self.re.powf(e - 1.0).scale(e),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(re: f64, eps: f64) -> D1 {
        Dual::new(re, eps)
    }

    #[test]
    fn product_rule() {
        let x = D1::seeded(3.0);
        let y = x * x;
        assert_eq!(y.re, 9.0);
        assert_eq!(y.eps, 6.0);
    }

    #[test]
    fn quotient_rule() {
        // d/dx (1 / x) = -1 / x^2
        let x = D1::seeded(4.0);
        let y = D1::one() / x;
        assert!((y.re - 0.25).abs() < 1e-15);
        assert!((y.eps + 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn transcendental_derivatives() {
        let x = D1::seeded(0.7);
        assert!((x.sin().eps - 0.7f64.cos()).abs() < 1e-15);
        assert!((x.exp().eps - 0.7f64.exp()).abs() < 1e-15);
        assert!((x.ln().eps - 1.0 / 0.7).abs() < 1e-15);
        assert!((x.sqrt().eps - 0.5 / 0.7f64.sqrt()).abs() < 1e-15);
        assert!((x.asinh().eps - 1.0 / (0.7f64 * 0.7 + 1.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn integer_and_real_powers() {
        let x = D1::seeded(2.0);
        assert_eq!(x.powi(3).re, 8.0);
        assert_eq!(x.powi(3).eps, 12.0);
        assert_eq!(x.powi(0), D1::one());
        let y = x.powf(0.5);
        assert!((y.eps - 0.5 / 2.0f64.sqrt()).abs() < 1e-15);
        // negative exponents follow the same chain rule
        let z = x.powi(-2);
        assert!((z.re - 0.25).abs() < 1e-15);
        assert!((z.eps + 2.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn nested_duals_give_second_derivative() {
        // f(x) = x^3, f''(2) = 12: seed both levels.
        let x: D2 = Dual::new(D1::seeded(2.0), D1::one());
        let y = x * x * x;
        assert_eq!(y.re.re, 8.0);
        assert_eq!(y.re.eps, 12.0); // f'
        assert_eq!(y.eps.eps, 12.0); // f''
    }

    #[test]
    fn abs_kink_uses_zero_sign() {
        assert_eq!(d(0.0, 1.0).abs().eps, 0.0);
        assert_eq!(d(-2.0, 1.0).abs().eps, -1.0);
    }

    #[test]
    fn finiteness_check_sees_derivative_part() {
        let x = d(0.0, 1.0).sqrt();
        assert!(x.re.is_finite());
        assert!(!x.all_finite());
    }
}
