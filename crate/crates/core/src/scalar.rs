//! Scalar abstraction shared by every numerical routine in the crate.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};

/// Real floating-point type the solvers are generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal; panics only if the target cannot represent finite values.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
}

pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub(crate) fn imag_unit<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::one())
}

/// `(e^z - 1) / z`, continuous through `z = 0`.
pub fn exprel<T: Real>(z: Cx<T>) -> Cx<T> {
    if z.norm() < T::lit(1e-3) {
        // Taylor series; five terms reach double precision for |z| < 1e-3.
        let mut term = Complex::new(T::one(), T::zero());
        let mut sum = term;
        for n in 2..8 {
            term = term * z / T::lit(n as f64);
            sum += term;
        }
        sum
    } else {
        (z.exp() - T::one()) / z
    }
}

/// `∫_a^b e^{s (x - x0)} dx`, evaluated without forming large intermediate exponentials.
pub fn exp_segment_integral<T: Real>(s: Cx<T>, x0: T, a: T, b: T) -> Cx<T> {
    let len = b - a;
    if len <= T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    (s * (a - x0)).exp() * exprel(s * len) * len
}

/// Relative distance `|a - b| / max(|b|, floor)`.
pub fn rel_diff<T: Real>(a: Cx<T>, b: Cx<T>, floor: T) -> T {
    (a - b).norm() / b.norm().max(floor)
}
