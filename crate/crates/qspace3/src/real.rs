//! Scalar types used by the numerical kernels.
//!
//! [`Mp`] is a binary multiprecision float. [`Real`] abstracts over `f64`
//! and [`Mp`] so that the tridiagonal eigensolver can run in either.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::ops::EstimatedLog2;
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

type Inner = FBig<HalfEven, 2>;

/// Largest working precision (bits) any adaptive kernel may request.
pub const MAX_BITS: usize = 16384;

/// Binary multiprecision float with an explicit working precision.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Mp(Inner);

impl fmt::Debug for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mp({:e}; {} bits)", self.to_f64(), self.bits())
    }
}

impl Mp {
    /// Exact conversion of a finite `f64`, carried at `bits` precision.
    pub fn from_f64(x: f64, bits: usize) -> Mp {
        assert!(x.is_finite(), "non-finite value {x} cannot be lifted");
        let v = Inner::try_from(x).expect("finite f64 converts exactly");
        Mp(v.with_precision(bits.max(53)).value())
    }

    pub fn from_i64(n: i64, bits: usize) -> Mp {
        Mp(Inner::from(n).with_precision(bits.max(64)).value())
    }

    pub fn zero(bits: usize) -> Mp {
        Mp::from_f64(0.0, bits)
    }

    pub fn one(bits: usize) -> Mp {
        Mp::from_f64(1.0, bits)
    }

    pub fn bits(&self) -> usize {
        self.0.precision()
    }

    /// Re-rounds to a new precision (exact when increasing).
    pub fn with_bits(&self, bits: usize) -> Mp {
        Mp(self.0.clone().with_precision(bits.max(53)).value())
    }

    /// Nearest `f64`; saturates to ±inf or 0 outside the `f64` range.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    pub fn is_zero(&self) -> bool {
        self.0 == Inner::ZERO
    }

    pub fn is_negative(&self) -> bool {
        self.0 < Inner::ZERO
    }

    pub fn abs(&self) -> Mp {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Square root; the argument must be non-negative.
    pub fn sqrt(&self) -> Mp {
        assert!(!self.is_negative(), "square root of a negative multiprecision value");
        if self.is_zero() {
            return self.clone();
        }
        Mp(self.0.sqrt())
    }

    pub fn powi(&self, n: i64) -> Mp {
        if n == 0 {
            return Mp::one(self.bits());
        }
        Mp(self.0.powi(n.into()))
    }

    /// Estimate of log2|x|; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (lo, hi) = self.0.log2_bounds();
        0.5 * (lo as f64 + hi as f64)
    }

    /// A constant carried at the same precision as `self`.
    pub fn lift(&self, x: f64) -> Mp {
        Mp::from_f64(x, self.bits())
    }
}

macro_rules! mp_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<Mp> for Mp {
            type Output = Mp;
            fn $method(self, rhs: Mp) -> Mp {
                Mp(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a Mp> for Mp {
            type Output = Mp;
            fn $method(self, rhs: &'a Mp) -> Mp {
                Mp(self.0 $op &rhs.0)
            }
        }
        impl<'a> $tr<Mp> for &'a Mp {
            type Output = Mp;
            fn $method(self, rhs: Mp) -> Mp {
                Mp(&self.0 $op rhs.0)
            }
        }
        impl<'a, 'b> $tr<&'b Mp> for &'a Mp {
            type Output = Mp;
            fn $method(self, rhs: &'b Mp) -> Mp {
                Mp(&self.0 $op &rhs.0)
            }
        }
    };
}

mp_binop!(Add, add, +);
mp_binop!(Sub, sub, -);
mp_binop!(Mul, mul, *);
mp_binop!(Div, div, /);

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

impl Neg for &Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0.clone())
    }
}

/// Field operations shared by `f64` and [`Mp`].
pub trait Real:
    Clone
    + PartialOrd
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    /// Constant with the precision of `self`.
    fn lift(&self, x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    fn powi(&self, n: i64) -> Self;
    fn bits(&self) -> usize;
}

impl Real for f64 {
    fn lift(&self, x: f64) -> f64 {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> f64 {
        f64::sqrt(*self)
    }
    fn abs(&self) -> f64 {
        f64::abs(*self)
    }
    fn powi(&self, n: i64) -> f64 {
        match i32::try_from(n) {
            Ok(k) => f64::powi(*self, k),
            Err(_) => f64::powf(*self, n as f64),
        }
    }
    fn bits(&self) -> usize {
        53
    }
}

impl Real for Mp {
    fn lift(&self, x: f64) -> Mp {
        Mp::lift(self, x)
    }
    fn to_f64(&self) -> f64 {
        Mp::to_f64(self)
    }
    fn sqrt(&self) -> Mp {
        Mp::sqrt(self)
    }
    fn abs(&self) -> Mp {
        Mp::abs(self)
    }
    fn powi(&self, n: i64) -> Mp {
        Mp::powi(self, n)
    }
    fn bits(&self) -> usize {
        Mp::bits(self)
    }
}

/// Rounds a bit count up to the next multiple of 64.
pub(crate) fn round_bits(bits: f64) -> usize {
    let b = bits.max(64.0).ceil() as usize;
    b.div_ceil(64) * 64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_round_trip_is_exact() {
        for x in [0.1, -3.25, 1e-300, 6.02e23] {
            assert_eq!(Mp::from_f64(x, 200).to_f64(), x);
        }
    }

    #[test]
    fn extra_precision_survives_cancellation() {
        let big = Mp::from_f64(2.0, 256).powi(120);
        let one = big.lift(1.0);
        let r = (&big + &one) - &big;
        assert_eq!(r.to_f64(), 1.0);
        assert_eq!((2f64.powi(120) + 1.0) - 2f64.powi(120), 0.0);
    }

    #[test]
    fn negative_powers_and_log2() {
        let q = Mp::from_f64(1.5, 128);
        let v = q.powi(-7);
        assert!((v.to_f64() - 1.5f64.powi(-7)).abs() < 1e-16);
        assert!((Mp::from_f64(1024.0, 64).log2_abs() - 10.0).abs() < 1e-3);
        assert_eq!(Mp::zero(64).log2_abs(), f64::NEG_INFINITY);
    }

    #[test]
    fn round_bits_steps() {
        assert_eq!(round_bits(1.0), 64);
        assert_eq!(round_bits(65.0), 128);
        assert_eq!(round_bits(128.0), 128);
    }
}
