//! Spline-backfitted local-linear (SBLL) estimation.
//!
//! Stage one pre-estimates every coefficient function with piecewise
//! constants ([`SplinePrefit`]). Stage two refits each `m_γ` by local-linear
//! smoothing of the pseudo-response `Ŷ_γ`, which subtracts the
//! pre-estimated contributions of all other lags. The oracle smoother runs
//! the same second stage on responses built from the true functions.

use std::ops::Deref;
use std::sync::Arc;

use crate::error::{FcarError, Result};
use crate::kernel::rot_bandwidth;
use crate::local_linear::{local_linear_at, LocalEstimate};
use crate::scalar::{sample_sd, Scalar};
use crate::series::{lag_frame, DelayRange, RegressionFrame, TimeSeries};
use crate::spline::{partial_residuals, SplinePrefit};

/// A coefficient function `u ↦ m(u)`.
pub type CoefficientFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Optional overrides for the two smoothing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbllOptions<T> {
    /// Local-linear bandwidth; the rule of thumb is used when `None`.
    pub bandwidth: Option<T>,
    /// Number of interior spline knots; `knot_count` is used when `None`.
    pub interior_knots: Option<usize>,
}

impl<T> Default for SbllOptions<T> {
    fn default() -> Self {
        Self { bandwidth: None, interior_knots: None }
    }
}

/// Coefficient value at a (possibly clamped) point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientValue<T> {
    pub value: T,
    /// `u` was outside `[a, b]` and moved to the nearest end.
    pub clamped: bool,
    pub fallback: bool,
}

fn evaluate_clamped<T: Scalar>(
    range: &DelayRange<T>,
    frame: &RegressionFrame<T>,
    y: &[T],
    gamma: usize,
    h: T,
    u: T,
) -> Result<CoefficientValue<T>> {
    let (uc, clamped) = range.clamp(u);
    let LocalEstimate { value, fallback, .. } = local_linear_at(uc, frame, y, gamma, h)?;
    Ok(CoefficientValue { value, clamped, fallback })
}

/// Fitted SBLL coefficient functions, without in-sample residuals.
#[derive(Debug, Clone)]
pub struct SbllEstimator<T> {
    frame: RegressionFrame<T>,
    prefit: SplinePrefit<T>,
    range: DelayRange<T>,
    bandwidth: T,
    pseudo: Vec<Vec<T>>,
}

impl<T: Scalar> SbllEstimator<T> {
    pub fn fit(series: &TimeSeries<T>, p: usize, d: usize, opts: &SbllOptions<T>) -> Result<Self> {
        let frame = lag_frame(series, p, d)?;
        Self::from_frame(frame, opts)
    }

    pub fn from_frame(frame: RegressionFrame<T>, opts: &SbllOptions<T>) -> Result<Self> {
        let range = frame.delay_range();
        if range.degenerate {
            return Err(FcarError::DegenerateDelay);
        }
        let prefit = SplinePrefit::fit(&frame, opts.interior_knots)?;
        let bandwidth = match opts.bandwidth {
            Some(h) if h > T::zero() && h.is_finite() => h,
            Some(h) => return Err(FcarError::InvalidArgument(format!("bandwidth must be positive, got {h}"))),
            None => rot_bandwidth(frame.delay())?,
        };
        let pseudo = (1..=frame.p())
            .map(|gamma| prefit.pseudo_responses(&frame, gamma))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { frame, prefit, range, bandwidth, pseudo })
    }

    /// `m̃_{SBLL,γ}(u)` with `u` clamped into `[a, b]`.
    pub fn coefficient(&self, gamma: usize, u: T) -> Result<CoefficientValue<T>> {
        self.frame.check_gamma(gamma)?;
        evaluate_clamped(&self.range, &self.frame, &self.pseudo[gamma - 1], gamma, self.bandwidth, u)
    }

    /// All `p` coefficients at `u`, plus whether `u` was clamped.
    pub fn coefficients(&self, u: T) -> Result<(Vec<T>, bool)> {
        let mut clamped = false;
        let values = (1..=self.p())
            .map(|gamma| {
                let c = self.coefficient(gamma, u)?;
                clamped |= c.clamped;
                Ok(c.value)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((values, clamped))
    }

    /// One-step prediction `Σ_α m̃_α(x_{t-d}) x_{t-α}` given the history
    /// `x_1, …, x_{t-1}`.
    pub fn predict_next(&self, history: &[T]) -> Result<(T, bool)> {
        let p = self.p();
        let t = history.len();
        if t < p.max(self.d()) {
            return Err(FcarError::SeriesTooShort { needed: p.max(self.d()), got: t });
        }
        let (coef, clamped) = self.coefficients(history[t - self.d()])?;
        let mut value = T::zero();
        for (alpha, c) in coef.iter().enumerate() {
            value += *c * history[t - alpha - 1];
        }
        Ok((value, clamped))
    }

    pub fn frame(&self) -> &RegressionFrame<T> {
        &self.frame
    }

    pub fn prefit(&self) -> &SplinePrefit<T> {
        &self.prefit
    }

    pub fn delay_range(&self) -> DelayRange<T> {
        self.range
    }

    pub fn bandwidth(&self) -> T {
        self.bandwidth
    }

    pub fn pseudo_responses(&self, gamma: usize) -> &[T] {
        &self.pseudo[gamma - 1]
    }

    pub fn p(&self) -> usize {
        self.frame.p()
    }

    pub fn d(&self) -> usize {
        self.frame.d()
    }
}

/// In-sample fitted values and residuals of an SBLL fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals<T> {
    pub fitted: Vec<T>,
    pub residuals: Vec<T>,
    pub mean: T,
    pub sd: T,
    /// Mean squared residual.
    pub mse: T,
}

/// SBLL estimator together with its in-sample residuals.
#[derive(Debug, Clone)]
pub struct SbllFit<T> {
    estimator: SbllEstimator<T>,
    residuals: Residuals<T>,
}

impl<T: Scalar> SbllFit<T> {
    pub fn estimator(&self) -> &SbllEstimator<T> {
        &self.estimator
    }

    pub fn fitted(&self) -> &[T] {
        &self.residuals.fitted
    }

    pub fn residuals(&self) -> &[T] {
        &self.residuals.residuals
    }

    pub fn residual_summary(&self) -> &Residuals<T> {
        &self.residuals
    }

    pub fn into_estimator(self) -> SbllEstimator<T> {
        self.estimator
    }
}

impl<T> Deref for SbllFit<T> {
    type Target = SbllEstimator<T>;
    fn deref(&self) -> &SbllEstimator<T> {
        &self.estimator
    }
}

/// Fitted values `Σ_γ m̃_γ(U_t) X_{t-γ}` and residuals `X_t − fitted`.
pub fn fitted_and_residuals<T: Scalar>(estimator: &SbllEstimator<T>) -> Result<Residuals<T>> {
    let frame = estimator.frame();
    let mut fitted = Vec::with_capacity(frame.rows());
    for (i, &u) in frame.delay().iter().enumerate() {
        let mut v = T::zero();
        for gamma in 1..=frame.p() {
            v += estimator.coefficient(gamma, u)?.value * frame.regressor(gamma)[i];
        }
        fitted.push(v);
    }
    let residuals: Vec<T> = frame.response().iter().zip(&fitted).map(|(&y, &f)| y - f).collect();
    let n = T::count(residuals.len());
    let mean = residuals.iter().copied().sum::<T>() / n;
    let mse = residuals.iter().map(|&r| r * r).sum::<T>() / n;
    let sd = sample_sd(&residuals);
    Ok(Residuals { fitted, residuals, mean, sd, mse })
}

/// Full SBLL pipeline on `series` with order `p` and delay `d`.
pub fn sbll_fit<T: Scalar>(series: &TimeSeries<T>, p: usize, d: usize, opts: &SbllOptions<T>) -> Result<SbllFit<T>> {
    let estimator = SbllEstimator::fit(series, p, d, opts)?;
    let residuals = fitted_and_residuals(&estimator)?;
    Ok(SbllFit { estimator, residuals })
}

/// Oracle local-linear smoother for `m_γ`, built from the true functions of
/// all other lags.
#[derive(Debug, Clone)]
pub struct OracleSmoother<T> {
    frame: RegressionFrame<T>,
    range: DelayRange<T>,
    response: Vec<T>,
    gamma: usize,
    bandwidth: T,
}

impl<T: Scalar> OracleSmoother<T> {
    /// `m̃_{O,γ}(u)` with `u` clamped into `[a, b]`.
    pub fn evaluate(&self, u: T) -> Result<CoefficientValue<T>> {
        evaluate_clamped(&self.range, &self.frame, &self.response, self.gamma, self.bandwidth, u)
    }

    /// `Y_{γ,t} = X_t − Σ_{α≠γ} m_α(U_t) X_{t-α}`.
    pub fn response(&self) -> &[T] {
        &self.response
    }
}

pub fn oracle_fit<T: Scalar>(
    frame: &RegressionFrame<T>,
    true_fns: &[CoefficientFn<T>],
    gamma: usize,
    h: T,
) -> Result<OracleSmoother<T>> {
    frame.check_gamma(gamma)?;
    if true_fns.len() != frame.p() {
        return Err(FcarError::DimensionMismatch(format!(
            "{} true functions for p = {}",
            true_fns.len(),
            frame.p()
        )));
    }
    let delay = frame.delay();
    let response = partial_residuals(frame, gamma, |i, alpha| true_fns[alpha - 1](delay[i]));
    Ok(OracleSmoother {
        frame: frame.clone(),
        range: frame.delay_range(),
        response,
        gamma,
        bandwidth: h,
    })
}
