//! Floating point scalar abstraction shared by the numerical modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use ndarray::LinalgScalar;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Real scalar used by fields, transforms, samplers and integrators.
///
/// Implemented for `f32` and `f64`.
pub trait Real:
    Float
    + NumAssign
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + LinalgScalar
    + Default
    + Debug
    + Display
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count.
    #[inline]
    fn count(k: usize) -> Self {
        Self::from_usize(k).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Pairwise summation, used for order-independent reductions over samples.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    const LEAF: usize = 64;
    if xs.len() <= LEAF {
        let mut s = T::zero();
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `pairwise_sum` of `f` over `xs` without materializing the mapped values.
pub fn pairwise_map_sum<T: Real, U: Copy>(xs: &[U], f: &impl Fn(U) -> T) -> T {
    const LEAF: usize = 64;
    if xs.len() <= LEAF {
        let mut s = T::zero();
        for &x in xs {
            s += f(x);
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_map_sum(&xs[..mid], f) + pairwise_map_sum(&xs[mid..], f)
}
