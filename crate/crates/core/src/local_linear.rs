//! Kernel-weighted local-linear fit of one varying coefficient.
//!
//! For a target point `u` the model `Y_t ≈ {β₀ + β₁(U_t − u)} X_{t-γ}` is
//! fitted by weighted least squares with quartic weights `K_h(U_t − u)`;
//! the estimate of the coefficient at `u` is `β₀`.

use crate::error::{FcarError, Result};
use crate::kernel::scaled_kernel;
use crate::linalg::CONDITION_LIMIT;
use crate::scalar::Scalar;
use crate::series::RegressionFrame;

/// Maximum number of bandwidth doublings before the ratio fallback.
pub const MAX_DOUBLINGS: u32 = 8;
/// No observation within this many bandwidths of `u` is an error.
pub const SUPPORT_RADIUS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalEstimate<T> {
    pub value: T,
    /// Bandwidth actually used after any doubling.
    pub bandwidth: T,
    pub doublings: u32,
    /// The weighted ratio `Σw X Y / Σw X²` was returned instead of a
    /// local-linear intercept.
    pub fallback: bool,
}

#[derive(Debug, Clone, Copy)]
struct Sums<T> {
    s00: T,
    s01: T,
    s11: T,
    t0: T,
    t1: T,
    support: usize,
}

fn weighted_sums<T: Scalar>(u: T, x: &[T], delay: &[T], y: &[T], h: T) -> Sums<T> {
    let mut s = Sums {
        s00: T::zero(),
        s01: T::zero(),
        s11: T::zero(),
        t0: T::zero(),
        t1: T::zero(),
        support: 0,
    };
    for ((&xt, &ut), &yt) in x.iter().zip(delay).zip(y) {
        let z = ut - u;
        let w = scaled_kernel(z, h);
        if w > T::zero() {
            s.support += 1;
            let wx = w * xt;
            let wxx = wx * xt;
            s.s00 += wxx;
            s.s01 += wxx * z;
            s.s11 += wxx * z * z;
            s.t0 += wx * yt;
            s.t1 += wx * z * yt;
        }
    }
    s
}

fn condition_2x2<T: Scalar>(s: &Sums<T>) -> T {
    let tr = s.s00 + s.s11;
    let disc = ((s.s00 - s.s11) * (s.s00 - s.s11) + T::lit(4.0) * s.s01 * s.s01).sqrt();
    let hi = (tr + disc) / T::lit(2.0);
    let lo = (tr - disc) / T::lit(2.0);
    if !(lo > T::zero()) || !hi.is_finite() {
        T::infinity()
    } else {
        hi / lo
    }
}

/// Local-linear estimate of the coefficient on `x` at `u`.
///
/// `min_support` is the minimum number of rows with positive weight; below
/// it, or when the 2×2 system is ill conditioned, the bandwidth is doubled
/// up to [`MAX_DOUBLINGS`] times before falling back to a weighted ratio.
pub fn local_linear_fit<T: Scalar>(
    u: T,
    x: &[T],
    delay: &[T],
    y: &[T],
    h: T,
    min_support: usize,
) -> Result<LocalEstimate<T>> {
    if x.len() != delay.len() || y.len() != delay.len() {
        return Err(FcarError::DimensionMismatch(format!(
            "regressor {}, delay {}, response {}",
            x.len(),
            delay.len(),
            y.len()
        )));
    }
    if !(h > T::zero()) || !h.is_finite() {
        return Err(FcarError::InvalidArgument(format!("bandwidth must be positive, got {h}")));
    }
    let radius = T::lit(SUPPORT_RADIUS) * h;
    if !u.is_finite() || !delay.iter().any(|&ut| (ut - u).abs() <= radius) {
        return Err(FcarError::NoSupport(u.as_f64()));
    }

    let mut bandwidth = h;
    let mut last = weighted_sums(u, x, delay, y, bandwidth);
    for doublings in 0..=MAX_DOUBLINGS {
        if doublings > 0 {
            bandwidth *= T::lit(2.0);
            last = weighted_sums(u, x, delay, y, bandwidth);
        }
        let s = &last;
        if s.support >= min_support && condition_2x2(s) <= T::lit(CONDITION_LIMIT) {
            let det = s.s00 * s.s11 - s.s01 * s.s01;
            let value = (s.s11 * s.t0 - s.s01 * s.t1) / det;
            return Ok(LocalEstimate { value, bandwidth, doublings, fallback: false });
        }
    }
    let value = if last.s00 > T::zero() { last.t0 / last.s00 } else { T::zero() };
    Ok(LocalEstimate { value, bandwidth, doublings: MAX_DOUBLINGS, fallback: true })
}

/// Minimum positive-weight rows for an order-`p` model: `max(5, p + 2)`.
pub fn min_support(p: usize) -> usize {
    (p + 2).max(5)
}

/// Local-linear estimate of `m_γ(u)` against the response vector `y`
/// (pseudo-responses for SBLL, exact partial residuals for the oracle).
pub fn local_linear_at<T: Scalar>(
    u: T,
    frame: &RegressionFrame<T>,
    y: &[T],
    gamma: usize,
    h: T,
) -> Result<LocalEstimate<T>> {
    frame.check_gamma(gamma)?;
    local_linear_fit(u, frame.regressor(gamma), frame.delay(), y, h, min_support(frame.p()))
}
