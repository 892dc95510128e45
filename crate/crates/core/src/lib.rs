//! Functional-coefficient autoregressive (FCAR) models: spline-backfitted
//! local-linear estimation, multi-step forecasting, simulation and
//! evaluation.
//!
//! The model is `X_t = Σ_{α=1}^p m_α(X_{t-d}) X_{t-α} + σ ε_t`. Estimation
//! first fits every `m_α` with piecewise constants on a uniform knot grid,
//! then refits each one by local-linear smoothing of a pseudo-response that
//! removes the other lags' pre-estimated contributions.
//!
//! ```
//! use fcar::{sbll_fit, forecast_naive, SbllOptions, TimeSeries64};
//!
//! let values: Vec<f64> = (0..200).map(|i| (i as f64 * 0.7).sin() + 0.2 * (i as f64 * 0.3).cos()).collect();
//! let series = TimeSeries64::new(values).unwrap();
//! let fit = sbll_fit(&series, 2, 1, &SbllOptions::default()).unwrap();
//! let forecast = forecast_naive(&fit, &series, 5).unwrap();
//! assert_eq!(forecast.point.len(), 5);
//! ```
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases fix the common double-precision case.

pub mod ar;
pub mod dgp;
pub mod error;
pub mod forecast;
pub mod kernel;
pub mod linalg;
pub mod local_linear;
pub mod metrics;
pub mod montecarlo;
pub mod sbll;
pub mod scalar;
pub mod series;
pub mod spline;

pub use ar::{fit_ar_ls, forecast_ar, select_ar_order, ArModel};
pub use dgp::{
    sigma_het, simulate, simulate_expar, simulate_setar, simulate_sine, DgpFamily, DgpKind, DgpSpec, ExparDecay,
    InitialState, NoiseModel, SimulatedSeries,
};
pub use error::{FcarError, Result};
pub use forecast::{
    bootstrap_with_residuals, forecast_bootstrap, forecast_multistage, forecast_naive, ForecastResult, Method,
};
pub use kernel::{kernel_moments, quartic_kernel, rot_bandwidth, KernelMoments, KernelSpec};
pub use linalg::{LeastSquares, Matrix};
pub use local_linear::{local_linear_at, local_linear_fit, LocalEstimate};
pub use metrics::{efficiency, kde, median, rmpe, rspe, Efficiency};
pub use montecarlo::{replication_seed, run_cell, run_replication, CellConfig, MonteCarloReport, ReplicationOutcome};
pub use sbll::{
    fitted_and_residuals, oracle_fit, sbll_fit, CoefficientFn, CoefficientValue, OracleSmoother, Residuals,
    SbllEstimator, SbllFit, SbllOptions,
};
pub use scalar::Scalar;
pub use series::{delay_range, lag_frame, make_series, DelayRange, RegressionFrame, TimeSeries};
pub use spline::{
    basis_matrix, build_knots, design_z, knot_count, pre_estimates, pseudo_responses, solve_lambda,
    solve_lambda_blocked, BasisMatrix, KnotGrid, SplinePrefit,
};

pub type TimeSeries64 = TimeSeries<f64>;
pub type RegressionFrame64 = RegressionFrame<f64>;
pub type SbllFit64 = SbllFit<f64>;
pub type SbllEstimator64 = SbllEstimator<f64>;
pub type SplinePrefit64 = SplinePrefit<f64>;
pub type ForecastResult64 = ForecastResult<f64>;
pub type ArModel64 = ArModel<f64>;
pub type DgpSpec64 = DgpSpec<f64>;
pub type SimulatedSeries64 = SimulatedSeries<f64>;
pub type MonteCarloReport64 = MonteCarloReport<f64>;
pub type SbllOptions64 = SbllOptions<f64>;
