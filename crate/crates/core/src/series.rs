//! Time-series container and lag embedding.
//!
//! A [`RegressionFrame`] is the row view used by every estimator: for each
//! usable time `t` it holds the response `X_t`, the lagged regressors
//! `X_{t-1}, …, X_{t-p}` and the delay variable `U_t = X_{t-d}`. Rows start
//! at the first time for which every lag is observed, i.e. the first
//! `max(p, d)` observations are consumed as pre-sample values.

use crate::error::{FcarError, Result};
use crate::scalar::Scalar;

/// Ordered observations with optional strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    values: Vec<T>,
    timestamps: Option<Vec<i64>>,
}

impl<T: Scalar> TimeSeries<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        make_series(values, None)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn timestamps(&self) -> Option<&[i64]> {
        self.timestamps.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The first `len` observations (timestamps truncated alongside).
    pub fn prefix(&self, len: usize) -> Result<Self> {
        let len = len.min(self.len());
        make_series(
            self.values[..len].to_vec(),
            self.timestamps.as_ref().map(|ts| ts[..len].to_vec()),
        )
    }

    /// A copy of the series with `extra` values appended. Timestamps are dropped.
    pub fn extended(&self, extra: &[T]) -> Result<Self> {
        let mut values = self.values.clone();
        values.extend_from_slice(extra);
        make_series(values, None)
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

/// Validates and wraps a sequence of observations.
pub fn make_series<T: Scalar>(values: Vec<T>, timestamps: Option<Vec<i64>>) -> Result<TimeSeries<T>> {
    if values.is_empty() {
        return Err(FcarError::EmptySeries);
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(FcarError::NonFiniteValue(i));
    }
    if let Some(ts) = &timestamps {
        if ts.len() != values.len() || ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FcarError::NonMonotoneTimestamps);
        }
    }
    Ok(TimeSeries { values, timestamps })
}

/// Closed interval `[a, b]` spanned by the delay variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayRange<T> {
    pub a: T,
    pub b: T,
    /// Set when `a == b` (constant delay variable).
    pub degenerate: bool,
}

impl<T: Scalar> DelayRange<T> {
    /// Clamps `u` into `[a, b]`, reporting whether clamping occurred.
    pub fn clamp(&self, u: T) -> (T, bool) {
        if u < self.a {
            (self.a, true)
        } else if u > self.b {
            (self.b, true)
        } else {
            (u, false)
        }
    }

    pub fn contains(&self, u: T) -> bool {
        u >= self.a && u <= self.b
    }
}

/// Lag-embedded rows of a series for an FCAR(p) model with delay `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFrame<T> {
    response: Vec<T>,
    // regressors[α - 1][i] = X_{t_i - α}
    regressors: Vec<Vec<T>>,
    delay: Vec<T>,
    p: usize,
    d: usize,
    t0: usize,
}

impl<T: Scalar> RegressionFrame<T> {
    pub fn response(&self) -> &[T] {
        &self.response
    }

    /// Column holding `X_{t-alpha}`, `alpha` in `1..=p`.
    pub fn regressor(&self, alpha: usize) -> &[T] {
        &self.regressors[alpha - 1]
    }

    pub fn delay(&self) -> &[T] {
        &self.delay
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// One-based time index of the first row (`max(p, d) + 1`).
    pub fn t0(&self) -> usize {
        self.t0
    }

    pub fn rows(&self) -> usize {
        self.response.len()
    }

    pub fn delay_range(&self) -> DelayRange<T> {
        delay_range(self)
    }

    pub(crate) fn check_gamma(&self, gamma: usize) -> Result<()> {
        if gamma == 0 || gamma > self.p {
            Err(FcarError::GammaOutOfRange { gamma, p: self.p })
        } else {
            Ok(())
        }
    }
}

/// Builds the lag-embedded frame; rows run over `t = max(p,d)+1 ..= n`.
pub fn lag_frame<T: Scalar>(series: &TimeSeries<T>, p: usize, d: usize) -> Result<RegressionFrame<T>> {
    if p == 0 || d == 0 {
        return Err(FcarError::InvalidArgument("p and d must be positive".into()));
    }
    let x = series.values();
    let n = x.len();
    let lead = p.max(d);
    if n <= lead + p {
        return Err(FcarError::SeriesTooShort { needed: lead + p, got: n });
    }
    let rows = lead..n;
    let response = x[rows.clone()].to_vec();
    let regressors = (1..=p)
        .map(|alpha| rows.clone().map(|t| x[t - alpha]).collect())
        .collect();
    let delay = rows.map(|t| x[t - d]).collect();
    Ok(RegressionFrame {
        response,
        regressors,
        delay,
        p,
        d,
        t0: lead + 1,
    })
}

/// Empirical range of the delay column.
pub fn delay_range<T: Scalar>(frame: &RegressionFrame<T>) -> DelayRange<T> {
    let mut a = T::infinity();
    let mut b = T::neg_infinity();
    for &u in frame.delay() {
        a = a.min(u);
        b = b.max(u);
    }
    DelayRange { a, b, degenerate: !(a < b) }
}
