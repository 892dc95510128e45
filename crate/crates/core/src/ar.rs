//! Linear autoregression baseline fitted by conditional least squares, with
//! AIC order selection.

use crate::error::{FcarError, Result};
use crate::forecast::{ForecastResult, Method};
use crate::linalg::{least_squares, Matrix};
use crate::scalar::Scalar;
use crate::series::TimeSeries;

/// `X_t = c + Σ φ_j X_{t-j} + e_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel<T> {
    pub order: usize,
    /// `φ_1, …, φ_q`.
    pub coefficients: Vec<T>,
    pub intercept: T,
    /// `RSS / n_eff`.
    pub sigma2: T,
    /// `n_eff · ln σ̂² + 2(q + 1)`.
    pub aic: T,
    pub n_eff: usize,
    pub ridged: bool,
}

impl<T: Scalar> ArModel<T> {
    /// One-step prediction from the end of `history`.
    pub fn predict_next(&self, history: &[T]) -> T {
        let t = history.len();
        let mut x = self.intercept;
        for (j, &phi) in self.coefficients.iter().enumerate() {
            x += phi * history[t - 1 - j];
        }
        x
    }

    /// In-sample fitted values for `t = q+1..n`, aligned with the series tail.
    pub fn fitted(&self, series: &TimeSeries<T>) -> Vec<T> {
        let v = series.values();
        (self.order..v.len()).map(|t| self.predict_next(&v[..t])).collect()
    }
}

/// Least squares of `X_t` on `(1, X_{t-1}, …, X_{t-q})` for `t = start+1..n`
/// (0-based response indices `start..n`), `start ≥ q`.
fn fit_rows<T: Scalar>(values: &[T], q: usize, start: usize) -> Result<ArModel<T>> {
    let rows: Vec<Vec<T>> = (start..values.len())
        .map(|t| std::iter::once(T::one()).chain((1..=q).map(|j| values[t - j])).collect())
        .collect();
    let y = &values[start..];
    let design = Matrix::from_rows(&rows)?;
    let ls = least_squares(&design, y)?;
    let rss: T = rows
        .iter()
        .zip(y)
        .map(|(row, &yt)| {
            let e = yt - row.iter().zip(&ls.coef).map(|(&a, &b)| a * b).sum::<T>();
            e * e
        })
        .sum();
    let n_eff = y.len();
    let sigma2 = rss / T::count(n_eff);
    let aic = T::count(n_eff) * sigma2.ln() + T::count(2 * (q + 1));
    Ok(ArModel {
        order: q,
        coefficients: ls.coef[1..].to_vec(),
        intercept: ls.coef[0],
        sigma2,
        aic,
        n_eff,
        ridged: ls.ridged,
    })
}

/// Conditional least-squares AR(`q`) fit on `t = q+1..n`. Needs `n > 2q + 2`.
pub fn fit_ar_ls<T: Scalar>(series: &TimeSeries<T>, q: usize) -> Result<ArModel<T>> {
    let n = series.len();
    if n <= 2 * q + 2 {
        return Err(FcarError::SeriesTooShort { needed: 2 * q + 2, got: n });
    }
    fit_rows(series.values(), q, q)
}

/// Fits `q = 1..=q_max` on the common sample `t = q_max+1..n` and returns the
/// minimum-AIC model (ties go to the smaller order).
pub fn select_ar_order<T: Scalar>(series: &TimeSeries<T>, q_max: usize) -> Result<ArModel<T>> {
    if q_max == 0 {
        return Err(FcarError::InvalidArgument("q_max must be at least 1".into()));
    }
    let n = series.len();
    if n <= 2 * q_max + 2 {
        return Err(FcarError::SeriesTooShort { needed: 2 * q_max + 2, got: n });
    }
    let mut best: Option<ArModel<T>> = None;
    for q in 1..=q_max {
        let model = fit_rows(series.values(), q, q_max)?;
        if best.as_ref().is_none_or(|b| model.aic < b.aic) {
            best = Some(model);
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// Iterated linear prediction for horizons `1..=M`.
pub fn forecast_ar<T: Scalar>(model: &ArModel<T>, series: &TimeSeries<T>, horizon: usize) -> Result<ForecastResult<T>> {
    if horizon == 0 {
        return Err(FcarError::InvalidArgument("forecast horizon must be at least 1".into()));
    }
    if series.len() < model.order {
        return Err(FcarError::SeriesTooShort { needed: model.order, got: series.len() });
    }
    let mut path = series.values().to_vec();
    for _ in 0..horizon {
        let x = model.predict_next(&path);
        path.push(x);
    }
    let point = path.split_off(series.len());
    Ok(ForecastResult { method: Method::Ar, point, paths: None, clamped: vec![false; horizon] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: Vec<f64>) -> TimeSeries<f64> {
        TimeSeries::new(v).unwrap()
    }

    #[test]
    fn geometric_series_is_exact() {
        let v: Vec<f64> = (0..30).map(|i| 0.5f64.powi(i)).collect();
        let m = fit_ar_ls(&ts(v), 1).unwrap();
        assert!((m.coefficients[0] - 0.5).abs() < 1e-10);
        assert!(m.intercept.abs() < 1e-10);
        assert!(m.sigma2 < 1e-10);
    }

    #[test]
    fn order_zero_is_mean_and_variance() {
        let v = vec![1.0, 3.0, 2.0, 6.0, 4.0, 2.0];
        let m = fit_ar_ls(&ts(v.clone()), 0).unwrap();
        let mean = v.iter().sum::<f64>() / 6.0;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 6.0;
        assert!((m.intercept - mean).abs() < 1e-12);
        assert!((m.sigma2 - var).abs() < 1e-12);
        assert_eq!(m.n_eff, 6);
        assert!((m.aic - (6.0 * var.ln() + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn too_short_rejected() {
        assert!(matches!(fit_ar_ls(&ts(vec![1.0, 2.0, 3.0, 4.0]), 1), Err(FcarError::SeriesTooShort { .. })));
        assert!(select_ar_order(&ts(vec![1.0; 10]), 0).is_err());
    }

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (0..n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            })
            .collect()
    }

    #[test]
    fn single_candidate_matches_common_sample_fit() {
        let v = ts(noise(50, 3));
        let sel = select_ar_order(&v, 1).unwrap();
        let direct = fit_ar_ls(&v, 1).unwrap();
        assert_eq!(sel.order, 1);
        assert_eq!(sel, direct);
    }

    #[test]
    fn selected_aic_is_minimal() {
        let v = ts(noise(120, 8));
        let sel = select_ar_order(&v, 6).unwrap();
        for q in 1..=6 {
            let cand = fit_rows(v.values(), q, 6).unwrap();
            assert!(sel.aic <= cand.aic);
            if q < sel.order {
                assert!(cand.aic > sel.aic);
            }
        }
    }

    #[test]
    fn forecasts_follow_recursion() {
        let model = ArModel {
            order: 1,
            coefficients: vec![0.5],
            intercept: 0.0,
            sigma2: 0.0,
            aic: 0.0,
            n_eff: 0,
            ridged: false,
        };
        let f = forecast_ar(&model, &ts(vec![3.0, 1.0]), 4).unwrap();
        assert_eq!(f.point, vec![0.5, 0.25, 0.125, 0.0625]);

        let constant = ArModel { order: 0, coefficients: vec![], intercept: 2.5, ..model.clone() };
        assert_eq!(forecast_ar(&constant, &ts(vec![1.0]), 3).unwrap().point, vec![2.5; 3]);

        let mean_reverting = ArModel { order: 2, coefficients: vec![0.4, 0.3], intercept: 1.2, ..model };
        let f = forecast_ar(&mean_reverting, &ts(vec![0.0, 10.0]), 200).unwrap();
        assert!((f.point[199] - 1.2 / 0.3).abs() < 1e-10);
    }

    #[test]
    fn fitted_values_align_with_tail() {
        let v = ts(noise(40, 1));
        let m = fit_ar_ls(&v, 2).unwrap();
        let f = m.fitted(&v);
        assert_eq!(f.len(), 38);
        assert!((f[0] - (m.intercept + m.coefficients[0] * v.values()[1] + m.coefficients[1] * v.values()[0])).abs() < 1e-14);
    }
}
