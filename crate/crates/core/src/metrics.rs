//! Forecast accuracy, oracle efficiency and a Gaussian density estimate.

use crate::error::{FcarError, Result};
use crate::scalar::{sample_sd, Scalar};

fn check_len(what: &str, a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(FcarError::ShapeMismatch(format!("{what}: {a} vs {b}")))
    }
}

/// Root mean prediction error per horizon over replications.
///
/// `forecasts[i][j]` and `actuals[i][j]` are replication `i`, horizon `j+1`.
pub fn rmpe<T: Scalar>(forecasts: &[Vec<T>], actuals: &[Vec<T>]) -> Result<Vec<T>> {
    check_len("replications", forecasts.len(), actuals.len())?;
    let Some(first) = forecasts.first() else {
        return Err(FcarError::ShapeMismatch("no replications".into()));
    };
    let m = first.len();
    let mut sums = vec![T::zero(); m];
    for (f, a) in forecasts.iter().zip(actuals) {
        check_len("horizons", f.len(), m)?;
        check_len("horizons", a.len(), m)?;
        for ((s, &fv), &av) in sums.iter_mut().zip(f).zip(a) {
            *s += (fv - av) * (fv - av);
        }
    }
    let reps = T::count(forecasts.len());
    Ok(sums.into_iter().map(|s| (s / reps).sqrt()).collect())
}

/// Absolute prediction error per horizon for a single forecast run.
pub fn rspe<T: Scalar>(forecast: &[T], actual: &[T]) -> Result<Vec<T>> {
    check_len("horizons", forecast.len(), actual.len())?;
    Ok(forecast.iter().zip(actual).map(|(&f, &a)| ((f - a) * (f - a)).sqrt()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Efficiency<T> {
    /// `+∞` when the SBLL errors are all zero.
    pub value: T,
    pub zero_denominator: bool,
}

/// `sqrt(Σ(oracle − truth)² / Σ(sbll − truth)²)`.
pub fn efficiency<T: Scalar>(oracle: &[T], sbll: &[T], truth: &[T]) -> Result<Efficiency<T>> {
    check_len("oracle/sbll", oracle.len(), sbll.len())?;
    check_len("sbll/truth", sbll.len(), truth.len())?;
    let sq = |v: &[T]| v.iter().zip(truth).map(|(&x, &t)| (x - t) * (x - t)).sum::<T>();
    let num = sq(oracle);
    let den = sq(sbll);
    if den > T::zero() {
        Ok(Efficiency { value: (num / den).sqrt(), zero_denominator: false })
    } else {
        Ok(Efficiency { value: T::infinity(), zero_denominator: true })
    }
}

/// Silverman's rule `1.06 · sd · n^{-1/5}`.
pub fn silverman_bandwidth<T: Scalar>(samples: &[T]) -> Result<T> {
    if samples.len() < 2 {
        return Err(FcarError::DegenerateSamples);
    }
    let sd = sample_sd(samples);
    if !(sd > T::zero()) {
        return Err(FcarError::DegenerateSamples);
    }
    Ok(T::lit(1.06) * sd * T::count(samples.len()).powf(T::lit(-0.2)))
}

/// Gaussian kernel density estimate evaluated on `grid`.
pub fn kde<T: Scalar>(samples: &[T], grid: &[T]) -> Result<Vec<T>> {
    let h = silverman_bandwidth(samples)?;
    let norm = T::one() / (T::count(samples.len()) * h * T::lit((2.0 * std::f64::consts::PI).sqrt()));
    Ok(grid
        .iter()
        .map(|&g| {
            let s: T = samples
                .iter()
                .map(|&x| {
                    let z = (g - x) / h;
                    (-z * z / T::lit(2.0)).exp()
                })
                .sum();
            s * norm
        })
        .collect())
}

/// Median of the finite values, `None` if there are none.
pub fn median<T: Scalar>(values: &[T]) -> Option<T> {
    let mut v: Vec<T> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let k = v.len();
    Some(if k % 2 == 1 { v[k / 2] } else { (v[k / 2 - 1] + v[k / 2]) / T::lit(2.0) })
}
