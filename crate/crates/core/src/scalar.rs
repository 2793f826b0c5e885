//! Scalar abstraction shared by every numerical routine.
//!
//! All model code is written against [`Real`], a floating-point real type,
//! and works on `Complex<T>` values. `f64` is the reference precision; the
//! tolerances pinned in the test suites assume it.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point type the model is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Default
        + Sum
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into the working precision.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in working precision")
}

/// Builds a complex number from `f64` parts.
#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(real(re), real(im))
}

/// Lossy conversion of a working-precision real to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Scale below which residuals fall back to absolute differences.
pub const ABS_FLOOR: f64 = 1e-14;

/// Normalizes an absolute residual by the magnitude of the terms it came
/// from, falling back to the absolute value when the scale underflows.
pub fn normalize<T: Real>(abs_residual: T, scale: T) -> T {
    if scale <= real(ABS_FLOOR) {
        abs_residual
    } else {
        abs_residual / scale
    }
}

/// `|lhs - rhs| / (|lhs| + |rhs|)` with the absolute fallback.
pub fn rel_diff<T: Real>(lhs: Complex<T>, rhs: Complex<T>) -> T {
    normalize((lhs - rhs).norm(), lhs.norm() + rhs.norm())
}

/// Normalized residual of a sum of terms that should cancel.
pub fn cancellation_residual<T: Real>(terms: &[Complex<T>]) -> T {
    let total: Complex<T> = terms.iter().copied().sum();
    let scale: T = terms.iter().map(|t| t.norm()).sum();
    normalize(total.norm(), scale)
}

/// Kahan-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum<T: Real> {
    sum: Complex<T>,
    comp: Complex<T>,
}

impl<T: Real> KahanSum<T> {
    pub fn new() -> Self {
        Self {
            sum: Complex::new(T::zero(), T::zero()),
            comp: Complex::new(T::zero(), T::zero()),
        }
    }

    pub fn add(&mut self, value: Complex<T>) {
        let y = value - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex<T> {
        self.sum
    }
}

/// Sums terms in descending order of magnitude with compensation.
///
/// Ties are broken by original position so the result does not depend on
/// how the terms were produced.
pub fn compensated_sum<T: Real>(terms: &[Complex<T>]) -> Complex<T> {
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&i, &j| {
        terms[j]
            .norm()
            .partial_cmp(&terms[i].norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let mut acc = KahanSum::new();
    for i in order {
        acc.add(terms[i]);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_term() {
        let big = cx::<f64>(1e16, 0.0);
        let terms = [big, cx(1.0, 0.0), -big, cx(1.0, 0.0)];
        assert_eq!(compensated_sum(&terms), cx(2.0, 0.0));
    }

    #[test]
    fn normalize_falls_back_to_absolute() {
        assert_eq!(normalize(1e-20_f64, 0.0), 1e-20);
        assert_eq!(normalize(1.0_f64, 4.0), 0.25);
    }

    #[test]
    fn cancellation_residual_is_scale_free() {
        let a = [cx::<f64>(1.0, 2.0), cx(-1.0, -2.0 + 1e-10)];
        let b: Vec<_> = a.iter().map(|z| z * 2f64.powi(27)).collect();
        let ra = cancellation_residual(&a);
        let rb = cancellation_residual(&b);
        assert_eq!(ra, rb);
        assert!(ra > 1e-12);
    }
}
