//! Quartic (biweight) kernel and the rule-of-thumb bandwidth.

use crate::error::{FcarError, Result};
use crate::scalar::{sample_sd, Scalar};

/// Scale constant of the rule-of-thumb bandwidth `h = c · sd(U) · n^{-1/5}`.
pub const ROT_SCALE: f64 = 2.5;

/// `K(x) = (15/16)(1 − x²)²` on `[−1, 1]`, zero elsewhere.
#[inline]
pub fn quartic_kernel<T: Scalar>(x: T) -> T {
    if x.abs() <= T::one() {
        let s = T::one() - x * x;
        T::lit(15.0 / 16.0) * s * s
    } else {
        T::zero()
    }
}

/// `K_h(u) = K(u/h)/h`.
#[inline]
pub fn scaled_kernel<T: Scalar>(u: T, h: T) -> T {
    quartic_kernel(u / h) / h
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelMoments {
    /// `∫ K`
    pub mass: f64,
    /// `μ₂ = ∫ x² K(x) dx`
    pub mu2: f64,
    /// `ν₀ = ∫ K²(x) dx`
    pub nu0: f64,
}

/// The quartic kernel together with its support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub name: &'static str,
    pub support: (f64, f64),
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self::quartic()
    }
}

impl KernelSpec {
    pub fn quartic() -> Self {
        Self { name: "quartic", support: (-1.0, 1.0) }
    }

    pub fn eval(&self, x: f64) -> f64 {
        quartic_kernel(x)
    }
}

/// Moments of the kernel by composite Simpson quadrature over its support.
pub fn kernel_moments(spec: &KernelSpec) -> KernelMoments {
    let (lo, hi) = spec.support;
    let simpson = |f: &dyn Fn(f64) -> f64| {
        let m = 2000;
        let h = (hi - lo) / m as f64;
        let mut s = f(lo) + f(hi);
        for i in 1..m {
            let x = lo + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    };
    KernelMoments {
        mass: simpson(&|x| spec.eval(x)),
        mu2: simpson(&|x| x * x * spec.eval(x)),
        nu0: simpson(&|x| spec.eval(x).powi(2)),
    }
}

/// Rule-of-thumb bandwidth `2.5 · sd(U) · n^{-1/5}` with the sample standard
/// deviation.
pub fn rot_bandwidth<T: Scalar>(delay: &[T]) -> Result<T> {
    let n = delay.len();
    if n < 2 {
        return Err(FcarError::SeriesTooShort { needed: 1, got: n });
    }
    let sd = sample_sd(delay);
    if !(sd > T::zero()) {
        return Err(FcarError::DegenerateDelay);
    }
    Ok(T::lit(ROT_SCALE) * sd * T::count(n).powf(T::lit(-0.2)))
}
