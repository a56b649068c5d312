//! Exact scalar types usable as arc weights.
//!
//! Every closure algorithm is written once against [`Scalar`]. Integer
//! weights (`i32`, `i64`, `i128`) select the tight-closure semantics and
//! rational weights (`Ratio<i32>`, `Ratio<i64>`, `Ratio<i128>`) select the
//! strong-closure semantics. Floating point is deliberately not supported:
//! every equality the algorithms rely on is exact.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Zero};

/// An exact, totally ordered number with overflow-checked arithmetic.
pub trait Scalar:
    Clone
    + Ord
    + Debug
    + Display
    + Zero
    + One
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// The largest value of the domain that does not exceed `self / 2`.
    ///
    /// Over the rationals this is the exact half; over the integers it is
    /// `⌊self / 2⌋`. `None` signals that the result is not representable.
    fn floor_half(&self) -> Option<Self>;

    /// `self / 2` when it belongs to the domain.
    fn exact_half(&self) -> Option<Self>;

    /// Converts a machine integer, `None` if it does not fit.
    fn from_i64(value: i64) -> Option<Self>;

    /// `true` when the value has no fractional part.
    fn is_integral(&self) -> bool;

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

/// Integer weights: the domain where tightening is meaningful.
pub trait IntegerScalar: Scalar + Integer {}

/// Rational weights: halving is always exact (barring overflow).
pub trait RationalScalar: Scalar {}

macro_rules! integer_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn floor_half(&self) -> Option<Self> {
                Some(self.div_floor(&2))
            }

            fn exact_half(&self) -> Option<Self> {
                self.is_even().then(|| self / 2)
            }

            fn from_i64(value: i64) -> Option<Self> {
                <$t>::try_from(value).ok()
            }

            fn is_integral(&self) -> bool {
                true
            }
        }

        impl IntegerScalar for $t {}
    )*};
}

integer_scalar!(i32, i64, i128);

macro_rules! rational_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for Ratio<$t> {
            fn floor_half(&self) -> Option<Self> {
                self.exact_half()
            }

            fn exact_half(&self) -> Option<Self> {
                let (numer, denom) = (self.numer(), self.denom());
                if numer.is_even() {
                    // gcd(numer / 2, denom) stays 1, so the ratio stays reduced.
                    Some(Ratio::new_raw(numer / 2, *denom))
                } else {
                    <$t>::checked_mul(*denom, 2).map(|d| Ratio::new_raw(*numer, d))
                }
            }

            fn from_i64(value: i64) -> Option<Self> {
                <$t>::try_from(value).ok().map(Ratio::from_integer)
            }

            fn is_integral(&self) -> bool {
                Ratio::is_integer(self)
            }
        }

        impl RationalScalar for Ratio<$t> {}
    )*};
}

rational_scalar!(i32, i64, i128);
