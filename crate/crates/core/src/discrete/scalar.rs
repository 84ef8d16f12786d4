use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

/// Exact rational used for small enumerations.
pub type Rational = Ratio<i128>;

pub fn rational(num: i64, den: i64) -> Rational {
    Ratio::new(num as i128, den as i128)
}

/// Field operations shared by `f64` and [`Rational`], so each enumeration
/// is written once and run in either arithmetic.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn to_f64(&self) -> f64;

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }

    fn powu(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(q: &Rational) -> Self {
        *q.numer() as f64 / *q.denom() as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }
    fn from_rational(q: &Rational) -> Self {
        *q
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}
