//! Forward-mode dual numbers with a bounded nesting tower.
//!
//! `Dual<T>` carries a value together with a directional derivative along a
//! single seed direction.  Nesting duals yields higher derivatives: the tower
//! `f64 -> D1 -> D2 -> D3 -> D4` supports differentiation up to order four,
//! which covers every operation chain in this crate (exterior derivative of a
//! pulled-back exterior derivative still fits).  `Real::CAN_LIFT` guards the
//! top of the tower so exceeding it is a reported error, not a wrong answer.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<T> {
    pub val: T,
    pub der: T,
}

pub type D1 = Dual<f64>;
pub type D2 = Dual<D1>;
pub type D3 = Dual<D2>;
pub type D4 = Dual<D3>;

impl<T: Real> Dual<T> {
    pub fn new(val: T, der: T) -> Self {
        Dual { val, der }
    }

    pub fn constant(val: T) -> Self {
        Dual { val, der: T::from_f64(0.0) }
    }

    pub fn variable(val: T) -> Self {
        Dual { val, der: T::from_f64(1.0) }
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual::new(self.val + o.val, self.der + o.der)
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual::new(self.val - o.val, self.der - o.der)
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual::new(self.val * o.val, self.val * o.der + self.der * o.val)
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        Dual::new(
            self.val / o.val,
            (self.der * o.val - self.val * o.der) / (o.val * o.val),
        )
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.val, -self.der)
    }
}

/// A scalar field body supplied as plain code instead of a parsed expression.
///
/// Each method is the same function instantiated at one level of the dual
/// tower; use [`crate::native_body!`] to generate an implementation from a
/// single generic function item.
pub trait NativeBody: Send + Sync {
    fn name(&self) -> &str;
    fn eval_f64(&self, p: &[f64]) -> Result<f64>;
    fn eval_d1(&self, p: &[D1]) -> Result<D1>;
    fn eval_d2(&self, p: &[D2]) -> Result<D2>;
    fn eval_d3(&self, p: &[D3]) -> Result<D3>;
    fn eval_d4(&self, p: &[D4]) -> Result<D4>;
}

/// Wraps a generic `fn eval<T: Real>(&[T]) -> Result<T>` into a [`NativeBody`].
#[macro_export]
macro_rules! native_body {
    ($name:expr, $f:path) => {{
        struct Body;
        impl $crate::dual::NativeBody for Body {
            fn name(&self) -> &str {
                $name
            }
            fn eval_f64(&self, p: &[f64]) -> $crate::error::Result<f64> {
                $f(p)
            }
            fn eval_d1(&self, p: &[$crate::dual::D1]) -> $crate::error::Result<$crate::dual::D1> {
                $f(p)
            }
            fn eval_d2(&self, p: &[$crate::dual::D2]) -> $crate::error::Result<$crate::dual::D2> {
                $f(p)
            }
            fn eval_d3(&self, p: &[$crate::dual::D3]) -> $crate::error::Result<$crate::dual::D3> {
                $f(p)
            }
            fn eval_d4(&self, p: &[$crate::dual::D4]) -> $crate::error::Result<$crate::dual::D4> {
                $f(p)
            }
        }
        std::sync::Arc::new(Body) as std::sync::Arc<dyn $crate::dual::NativeBody>
    }};
}

/// Scalar arithmetic shared by `f64` and every dual level.
///
/// Branching decisions (domain checks, series-fallback switches) must use
/// [`Real::value`], which strips all derivative parts.
pub trait Real:
    Copy
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + std::fmt::Debug
{
    /// Next level of the tower; `Self` at the top.
    type Lift: Real;
    const CAN_LIFT: bool;

    fn from_f64(x: f64) -> Self;
    /// Underlying value with every derivative part dropped.
    fn value(self) -> f64;
    fn lift_const(self) -> Self::Lift;
    fn lift_var(self) -> Self::Lift;
    fn der_part(l: Self::Lift) -> Self;
    fn call_native(body: &dyn NativeBody, p: &[Self]) -> Result<Self>
    where
        Self: Sized;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn powi(self, n: i64) -> Self {
        let mut acc = Self::from_f64(1.0);
        let mut base = if n < 0 { Self::from_f64(1.0) / self } else { self };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }
}

impl Real for f64 {
    type Lift = D1;
    const CAN_LIFT: bool = true;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn value(self) -> f64 {
        self
    }
    fn lift_const(self) -> D1 {
        Dual::constant(self)
    }
    fn lift_var(self) -> D1 {
        Dual::variable(self)
    }
    fn der_part(l: D1) -> f64 {
        l.der
    }
    fn call_native(body: &dyn NativeBody, p: &[f64]) -> Result<f64> {
        body.eval_f64(p)
    }

    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

macro_rules! impl_real_dual {
    ($t:ty, $inner:ty, $lift:ty, $can:expr, $call:ident, $lift_impl:expr, $der_impl:expr) => {
        impl Real for $t {
            type Lift = $lift;
            const CAN_LIFT: bool = $can;

            fn from_f64(x: f64) -> Self {
                Dual::constant(<$inner>::from_f64(x))
            }
            fn value(self) -> f64 {
                self.val.value()
            }
            fn lift_const(self) -> Self::Lift {
                ($lift_impl)(self, false)
            }
            fn lift_var(self) -> Self::Lift {
                ($lift_impl)(self, true)
            }
            fn der_part(l: Self::Lift) -> Self {
                ($der_impl)(l)
            }
            fn call_native(body: &dyn NativeBody, p: &[Self]) -> Result<Self> {
                body.$call(p)
            }

            fn sin(self) -> Self {
                Dual::new(self.val.sin(), self.der * self.val.cos())
            }
            fn cos(self) -> Self {
                Dual::new(self.val.cos(), -(self.der * self.val.sin()))
            }
            fn tan(self) -> Self {
                let c = self.val.cos();
                Dual::new(self.val.tan(), self.der / (c * c))
            }
            fn exp(self) -> Self {
                let e = self.val.exp();
                Dual::new(e, self.der * e)
            }
            fn ln(self) -> Self {
                Dual::new(self.val.ln(), self.der / self.val)
            }
            fn sqrt(self) -> Self {
                let s = self.val.sqrt();
                Dual::new(s, self.der / (s + s))
            }
            fn abs(self) -> Self {
                if self.val.value() < 0.0 {
                    -self
                } else {
                    self
                }
            }
        }
    };
}

impl_real_dual!(
    D1,
    f64,
    D2,
    true,
    eval_d1,
    |x: D1, var: bool| if var { Dual::variable(x) } else { Dual::constant(x) },
    |l: D2| l.der
);
impl_real_dual!(
    D2,
    D1,
    D3,
    true,
    eval_d2,
    |x: D2, var: bool| if var { Dual::variable(x) } else { Dual::constant(x) },
    |l: D3| l.der
);
impl_real_dual!(
    D3,
    D2,
    D4,
    true,
    eval_d3,
    |x: D3, var: bool| if var { Dual::variable(x) } else { Dual::constant(x) },
    |l: D4| l.der
);
// Top of the tower: lifting is refused at runtime via CAN_LIFT.
impl_real_dual!(
    D4,
    D3,
    D4,
    false,
    eval_d4,
    |x: D4, _var: bool| x,
    |_l: D4| D4::from_f64(0.0)
);

/// Generic power with the sign conventions used by the expression language:
/// a negative base is only legal with an integer exponent.
pub fn pow<T: Real>(base: T, exponent: T, context: &str) -> Result<T> {
    let b = base.value();
    let e = exponent.value();
    let int_exp = (e - e.round()).abs() < 1e-12;
    if b > 0.0 {
        Ok((exponent * base.ln()).exp())
    } else if int_exp {
        Ok(base.powi(e.round() as i64))
    } else if b == 0.0 && e > 0.0 {
        Ok(T::from_f64(0.0))
    } else {
        Err(Error::DomainError {
            context: context.to_string(),
            message: format!("{b} ^ {e}: non-integer exponent with non-positive base"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_exact() {
        let a = D1::new(1.7, 0.3);
        let b = D1::new(-2.2, 5.0);
        let p = a * b;
        assert_eq!(p.der, a.val * b.der + b.val * a.der);
    }

    #[test]
    fn chain_rule_through_two_levels() {
        // d^2/dx^2 sin(x^2) at x = 0.7 via nested duals.
        let x = 0.7_f64;
        let xx = Dual::variable(Dual::variable(x));
        let y = (xx * xx).sin();
        let second = y.der.der;
        let expected = 2.0 * (x * x).cos() - 4.0 * x * x * (x * x).sin();
        assert!((second - expected).abs() < 1e-12);
    }

    #[test]
    fn pow_negative_base_integer_exponent() {
        let v = pow(D1::variable(-2.0), D1::constant(3.0), "test").unwrap();
        assert_eq!(v.val, -8.0);
        assert_eq!(v.der, 12.0); // d/dx x^3 = 3x^2
    }

    #[test]
    fn pow_negative_base_fractional_exponent_rejected() {
        assert!(pow(-2.0_f64, 0.5, "test").is_err());
    }
}
