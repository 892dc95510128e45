//! Multi-step forecasting from a fitted FCAR model.
//!
//! * naive: iterate the fitted coefficient functions on predicted values;
//! * bootstrap: as naive, plus a resampled centred residual at every step,
//!   averaged over `B` simulated paths;
//! * multistage: refit the whole SBLL pipeline after each step on the
//!   series extended by the predictions so far.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{FcarError, Result};
use crate::scalar::{shifted_mean, Scalar};
use crate::sbll::{SbllEstimator, SbllFit, SbllOptions};
use crate::series::TimeSeries;

/// Default number of bootstrap paths.
pub const DEFAULT_BOOTSTRAP_PATHS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Naive,
    Bootstrap,
    Multistage,
    /// Linear autoregression baseline.
    Ar,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::Bootstrap => "bootstrap",
            Method::Multistage => "multistage",
            Method::Ar => "ar",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = FcarError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "naive" => Ok(Method::Naive),
            "bootstrap" => Ok(Method::Bootstrap),
            "multistage" => Ok(Method::Multistage),
            "ar" => Ok(Method::Ar),
            other => Err(FcarError::InvalidArgument(format!("unknown forecast method '{other}'"))),
        }
    }
}

/// Point forecasts for horizons `1..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult<T> {
    pub method: Method,
    pub point: Vec<T>,
    /// Bootstrap paths, `B × M`.
    pub paths: Option<Vec<Vec<T>>>,
    /// Per horizon: some evaluated delay argument fell outside `[a, b]`.
    pub clamped: Vec<bool>,
}

impl<T> ForecastResult<T> {
    pub fn horizon(&self) -> usize {
        self.point.len()
    }
}

fn check_horizon(m: usize) -> Result<()> {
    if m == 0 {
        Err(FcarError::InvalidArgument("forecast horizon must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Iterates `estimator` for `horizon` steps from `history`, adding
/// `noise(j)` at step `j`. Returns the appended values and clamp flags.
fn iterate_path<T: Scalar>(
    estimator: &SbllEstimator<T>,
    history: &[T],
    horizon: usize,
    mut noise: impl FnMut() -> T,
) -> Result<(Vec<T>, Vec<bool>)> {
    let mut path = history.to_vec();
    let mut clamped = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let (value, c) = estimator.predict_next(&path)?;
        path.push(value + noise());
        clamped.push(c);
    }
    Ok((path.split_off(history.len()), clamped))
}

/// Naive predictor: the within-sample coefficient functions are evaluated at
/// predicted delay values; no spline refit.
pub fn forecast_naive<T: Scalar>(fit: &SbllEstimator<T>, series: &TimeSeries<T>, horizon: usize) -> Result<ForecastResult<T>> {
    check_horizon(horizon)?;
    let (point, clamped) = iterate_path(fit, series.values(), horizon, T::zero)?;
    Ok(ForecastResult { method: Method::Naive, point, paths: None, clamped })
}

/// Residuals minus their mean.
pub fn centered_residuals<T: Scalar>(residuals: &[T]) -> Vec<T> {
    if residuals.is_empty() {
        return Vec::new();
    }
    let mean = residuals.iter().copied().sum::<T>() / T::count(residuals.len());
    residuals.iter().map(|&r| r - mean).collect()
}

/// Random stream for bootstrap path `b` under `seed`.
pub fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// Bootstrap predictor with `paths` simulated futures. Every step of every
/// path adds one centred within-sample residual drawn with replacement; the
/// point forecast is the mean across paths.
pub fn forecast_bootstrap<T: Scalar>(
    fit: &SbllFit<T>,
    series: &TimeSeries<T>,
    horizon: usize,
    paths: usize,
    seed: u64,
) -> Result<ForecastResult<T>> {
    bootstrap_with_residuals(fit, series, horizon, paths, seed, fit.residuals())
}

/// [`forecast_bootstrap`] with an explicit residual pool (centred here).
///
/// Path `b` draws from its own stream `(seed, b)`, so paths may be simulated
/// in any order or in parallel.
pub fn bootstrap_with_residuals<T: Scalar>(
    estimator: &SbllEstimator<T>,
    series: &TimeSeries<T>,
    horizon: usize,
    paths: usize,
    seed: u64,
    residuals: &[T],
) -> Result<ForecastResult<T>> {
    check_horizon(horizon)?;
    if paths == 0 {
        return Err(FcarError::InvalidArgument("number of bootstrap paths must be at least 1".into()));
    }
    let pool = centered_residuals(residuals);
    if pool.is_empty() {
        return Err(FcarError::InvalidArgument("no residuals to resample".into()));
    }
    let simulated = (0..paths)
        .into_par_iter()
        .map(|b| {
            let mut rng = path_rng(seed, b as u64);
            iterate_path(estimator, series.values(), horizon, || pool[rng.random_range(0..pool.len())])
        })
        .collect::<Result<Vec<_>>>()?;

    let mut clamped = vec![false; horizon];
    for (_, c) in &simulated {
        for (acc, &flag) in clamped.iter_mut().zip(c) {
            *acc |= flag;
        }
    }
    let paths: Vec<Vec<T>> = simulated.into_iter().map(|(p, _)| p).collect();
    let point = (0..horizon)
        .map(|j| shifted_mean(paths.iter().map(|p| p[j])).expect("at least one path"))
        .collect();
    Ok(ForecastResult { method: Method::Bootstrap, point, paths: Some(paths), clamped })
}

/// Multistage predictor: before step `j` the full SBLL pipeline is refitted
/// on the observed series extended by the `j − 1` earlier predictions.
pub fn forecast_multistage<T: Scalar>(
    series: &TimeSeries<T>,
    p: usize,
    d: usize,
    horizon: usize,
    opts: &SbllOptions<T>,
) -> Result<ForecastResult<T>> {
    check_horizon(horizon)?;
    let mut history = series.values().to_vec();
    let mut point = Vec::with_capacity(horizon);
    let mut clamped = Vec::with_capacity(horizon);
    for step in 1..=horizon {
        let annotate = |e: FcarError| FcarError::AtStep { step, source: Box::new(e) };
        let augmented = TimeSeries::new(history.clone()).map_err(annotate)?;
        let estimator = SbllEstimator::fit(&augmented, p, d, opts).map_err(annotate)?;
        let (value, c) = estimator.predict_next(&history).map_err(annotate)?;
        history.push(value);
        point.push(value);
        clamped.push(c);
    }
    Ok(ForecastResult { method: Method::Multistage, point, paths: None, clamped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbll::sbll_fit;

    fn wavy(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| 0.6 * (i as f64 * 0.83).sin() + 0.3 * (i as f64 * 0.37).cos() + 0.05 * ((i * i) % 7) as f64)
            .collect()
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Naive, Method::Bootstrap, Method::Multistage, Method::Ar] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("mystery".parse::<Method>().is_err());
    }

    #[test]
    fn naive_constant_coefficient_is_geometric() {
        let phi = 0.97;
        let mut x = vec![1.0f64];
        for _ in 0..60 {
            x.push(phi * x.last().unwrap());
        }
        let series = TimeSeries::new(x.clone()).unwrap();
        let fit = sbll_fit(&series, 1, 1, &SbllOptions::default()).unwrap();
        let f = forecast_naive(&fit, &series, 10).unwrap();
        let xn = *x.last().unwrap();
        for (m, v) in f.point.iter().enumerate() {
            assert!((v - phi.powi(m as i32 + 1) * xn).abs() < 1e-10);
        }
        // predicted delay values fall below the sample minimum
        assert!(f.clamped.iter().all(|&c| c));
    }

    #[test]
    fn short_horizon_uses_observed_delay() {
        let series = TimeSeries::new(wavy(120)).unwrap();
        let fit = sbll_fit(&series, 2, 3, &SbllOptions::default()).unwrap();
        let f = forecast_naive(&fit, &series, 3).unwrap();
        // M ≤ d: delay arguments are observed values inside [a, b]
        assert!(f.clamped.iter().all(|&c| !c));
    }

    #[test]
    fn bootstrap_is_deterministic_and_b1_is_its_path() {
        let series = TimeSeries::new(wavy(150)).unwrap();
        let fit = sbll_fit(&series, 2, 1, &SbllOptions::default()).unwrap();
        let a = forecast_bootstrap(&fit, &series, 6, 40, 99).unwrap();
        let b = forecast_bootstrap(&fit, &series, 6, 40, 99).unwrap();
        assert_eq!(a, b);
        let paths = a.paths.as_ref().unwrap();
        assert_eq!(paths.len(), 40);
        for j in 0..6 {
            let col: Vec<f64> = paths.iter().map(|p| p[j]).collect();
            assert_eq!(a.point[j], shifted_mean(col).unwrap());
        }
        let one = forecast_bootstrap(&fit, &series, 6, 1, 5).unwrap();
        assert_eq!(one.point, one.paths.as_ref().unwrap()[0]);
        let other = forecast_bootstrap(&fit, &series, 6, 40, 100).unwrap();
        assert_ne!(a.point, other.point);
    }

    #[test]
    fn zero_residuals_reduce_to_naive() {
        let series = TimeSeries::new(wavy(120)).unwrap();
        let fit = sbll_fit(&series, 2, 1, &SbllOptions::default()).unwrap();
        let naive = forecast_naive(&fit, &series, 8).unwrap();
        let zeros = vec![0.0; 50];
        for (paths, seed) in [(1, 0), (7, 3), (64, 12345)] {
            let boot = bootstrap_with_residuals(&fit, &series, 8, paths, seed, &zeros).unwrap();
            for (a, b) in boot.point.iter().zip(&naive.point) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn centred_pool_has_zero_mean() {
        let r = centered_residuals(&[0.3, -0.1, 0.25, 0.7, -0.05]);
        assert!(r.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn multistage_matches_naive_at_first_step() {
        let series = TimeSeries::new(wavy(100)).unwrap();
        let opts = SbllOptions::default();
        let fit = sbll_fit(&series, 2, 2, &opts).unwrap();
        let naive = forecast_naive(&fit, &series, 1).unwrap();
        let multi = forecast_multistage(&series, 2, 2, 1, &opts).unwrap();
        assert_eq!(naive.point, multi.point);
    }

    #[test]
    fn multistage_errors_carry_step() {
        let series = TimeSeries::new(vec![0.0f64; 30]).unwrap();
        let err = forecast_multistage(&series, 2, 1, 3, &SbllOptions::default()).unwrap_err();
        assert!(matches!(err, FcarError::AtStep { step: 1, .. }));
    }

    #[test]
    fn zero_horizon_rejected() {
        let series = TimeSeries::new(wavy(80)).unwrap();
        let fit = sbll_fit(&series, 1, 1, &SbllOptions::default()).unwrap();
        assert!(forecast_naive(&fit, &series, 0).is_err());
        assert!(forecast_bootstrap(&fit, &series, 3, 0, 1).is_err());
    }
}
