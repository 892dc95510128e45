use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point element type used throughout the estimators: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a count into `Self`.
    #[inline]
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Mean computed as `first + Σ(x − first)/n`.
///
/// A sample of identical values returns that value bit-for-bit.
pub(crate) fn shifted_mean<T: Scalar>(values: impl IntoIterator<Item = T>) -> Option<T> {
    let mut iter = values.into_iter();
    let first = iter.next()?;
    let mut acc = T::zero();
    let mut n = 1usize;
    for v in iter {
        acc += v - first;
        n += 1;
    }
    Some(first + acc / T::count(n))
}

/// Sample standard deviation (denominator `n − 1`).
pub(crate) fn sample_sd<T: Scalar>(values: &[T]) -> T {
    let n = values.len();
    if n < 2 {
        return T::zero();
    }
    let mean = values.iter().copied().sum::<T>() / T::count(n);
    let ss: T = values.iter().map(|&v| (v - mean) * (v - mean)).sum();
    (ss / T::count(n - 1)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_mean_is_exact_on_constant_input() {
        let v = vec![0.1f64; 3];
        assert_eq!(shifted_mean(v).unwrap().to_bits(), 0.1f64.to_bits());
        assert_eq!(shifted_mean(Vec::<f64>::new()), None);
        assert!((shifted_mean(vec![1.0f64, 2.0, 6.0]).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn sample_sd_matches_hand_value() {
        let sd = sample_sd(&[2.0f64, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert!((sd - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert_eq!(sample_sd(&[1.0f32]), 0.0);
    }
}
