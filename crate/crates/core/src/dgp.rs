//! Seeded generators for the sine, EXPAR and SETAR functional-coefficient
//! processes used in the Monte Carlo studies.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{FcarError, Result};
use crate::scalar::Scalar;
use crate::sbll::CoefficientFn;
use crate::series::TimeSeries;

/// Iterations discarded before the returned sample.
pub const DEFAULT_BURN_IN: usize = 200;
/// Any state with `|X_t|` above this aborts the simulation.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// Conditional standard deviation
/// `0.1 (√p/2) [5 − exp(Σ|X_{t-α}|/p)] / [5 − exp(Σ|X_{t-α}|/p)]`.
///
/// Numerator and denominator are the same expression, so the value is
/// `0.05√p` everywhere; where the shared factor vanishes or overflows the
/// limit `0.05√p` is returned as well. Use [`NoiseModel::Custom`] for a
/// genuinely state-dependent scale.
pub fn sigma_het<T: Scalar>(lags: &[T], p: usize) -> T {
    let pf = T::count(p);
    let base = T::lit(0.1) * (pf.sqrt() / T::lit(2.0));
    let mean_abs = lags.iter().map(|v| v.abs()).sum::<T>() / pf;
    let factor = T::lit(5.0) - mean_abs.exp();
    if factor == T::zero() || !factor.is_finite() {
        return base;
    }
    base * factor / factor
}

/// Scale multiplying the standard-normal innovation.
#[derive(Clone)]
pub enum NoiseModel<T> {
    /// [`sigma_het`] of the last `p` values.
    Printed,
    /// `σ ≡ 1`.
    Unit,
    Constant(T),
    /// Any function of the lag vector `(X_{t-1}, …, X_{t-p})`.
    Custom(Arc<dyn Fn(&[T]) -> T + Send + Sync>),
}

impl<T: Scalar> NoiseModel<T> {
    pub fn scale(&self, lags: &[T], p: usize) -> T {
        match self {
            NoiseModel::Printed => sigma_het(lags, p),
            NoiseModel::Unit => T::one(),
            NoiseModel::Constant(s) => *s,
            NoiseModel::Custom(f) => f(lags),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for NoiseModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::Printed => f.write_str("Printed"),
            NoiseModel::Unit => f.write_str("Unit"),
            NoiseModel::Constant(s) => f.debug_tuple("Constant").field(s).finish(),
            NoiseModel::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// Standard-normal draws for the first `max(p, d)` values.
    StandardNormal,
    Zero,
}

/// Shape of the EXPAR decay term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExparDecay {
    /// `exp(−δu²)`: coefficients stay within `a_α ± |b_α|`.
    Squared,
    /// `exp(−δu)`: unbounded for negative `u`; most paths diverge with the
    /// default parameters.
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DgpKind<T> {
    /// `m_α(u) = a_α sin(ωπu)`
    Sine { a: Vec<T>, omega: T },
    /// `m_α(u) = a_α + b_α exp(−δu²)` (or `exp(−δu)`)
    Expar { a: Vec<T>, b: Vec<T>, delta: T, decay: ExparDecay },
    /// `m_α(u) = a_α` if `u < r_α`, else `b_α`
    Setar { a: Vec<T>, b: Vec<T>, r: Vec<T> },
    /// Constant coefficients (linear AR).
    Linear { coef: Vec<T> },
}

/// Family names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DgpFamily {
    Sine,
    Expar,
    Setar,
}

impl DgpFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            DgpFamily::Sine => "sine",
            DgpFamily::Expar => "expar",
            DgpFamily::Setar => "setar",
        }
    }

    /// Simulation example number (1, 2, 3).
    pub fn from_example(example: u32) -> Result<Self> {
        match example {
            1 => Ok(DgpFamily::Sine),
            2 => Ok(DgpFamily::Expar),
            3 => Ok(DgpFamily::Setar),
            other => Err(FcarError::InvalidArgument(format!("unknown example {other} (expected 1, 2 or 3)"))),
        }
    }
}

impl fmt::Display for DgpFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DgpFamily {
    type Err = FcarError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sine" => Ok(DgpFamily::Sine),
            "expar" => Ok(DgpFamily::Expar),
            "setar" => Ok(DgpFamily::Setar),
            other => Err(FcarError::InvalidArgument(format!("unknown process '{other}'"))),
        }
    }
}

/// A fully specified FCAR data-generating process.
#[derive(Debug, Clone)]
pub struct DgpSpec<T> {
    pub kind: DgpKind<T>,
    pub p: usize,
    pub d: usize,
    pub noise: NoiseModel<T>,
    pub init: InitialState,
    pub burn_in: usize,
}

fn lits<T: Scalar>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::lit(x)).collect()
}

fn alternating(p: usize) -> Vec<f64> {
    (0..p).map(|i| if i % 2 == 0 { 0.5 } else { -0.5 }).collect()
}

impl<T: Scalar> DgpSpec<T> {
    fn with_kind(kind: DgpKind<T>, p: usize, d: usize, noise: NoiseModel<T>) -> Result<Self> {
        let spec = Self { kind, p, d, noise, init: InitialState::StandardNormal, burn_in: DEFAULT_BURN_IN };
        spec.validate()?;
        Ok(spec)
    }

    pub fn sine(a: Vec<T>, omega: T, d: usize) -> Result<Self> {
        let p = a.len();
        Self::with_kind(DgpKind::Sine { a, omega }, p, d, NoiseModel::Printed)
    }

    pub fn expar(a: Vec<T>, b: Vec<T>, delta: T, d: usize) -> Result<Self> {
        let p = a.len();
        Self::with_kind(DgpKind::Expar { a, b, delta, decay: ExparDecay::Squared }, p, d, NoiseModel::Printed)
    }

    pub fn setar(a: Vec<T>, b: Vec<T>, r: Vec<T>, d: usize) -> Result<Self> {
        let p = a.len();
        Self::with_kind(DgpKind::Setar { a, b, r }, p, d, NoiseModel::Unit)
    }

    pub fn linear(coef: Vec<T>, d: usize, noise: NoiseModel<T>) -> Result<Self> {
        let p = coef.len();
        Self::with_kind(DgpKind::Linear { coef }, p, d, noise)
    }

    /// Default parameter sets for orders 4 and 10.
    pub fn example(family: DgpFamily, p: usize) -> Result<Self> {
        match (family, p) {
            (DgpFamily::Sine, 4) => Self::sine(lits(&alternating(4)), T::lit(4.5), 2),
            (DgpFamily::Sine, 10) => Self::sine(lits(&alternating(10)), T::lit(1.5), 2),
            (DgpFamily::Expar, 4) => Self::expar(
                lits(&[0.3, -0.35, 0.1, -0.2]),
                lits(&[0.2, -0.15, 0.4, -0.3]),
                T::lit(25.0),
                2,
            ),
            (DgpFamily::Expar, 10) => Self::expar(
                lits(&[0.3, -0.35, 0.1, -0.2, 0.35, -0.1, 0.2, -0.3, 0.25, -0.25]),
                lits(&[0.2, -0.15, 0.4, -0.3, 0.15, -0.4, 0.3, -0.2, 0.25, -0.25]),
                T::lit(5.0),
                2,
            ),
            (DgpFamily::Setar, 4) => Self::setar(
                lits(&[0.5, 0.2, 0.1, -0.4]),
                lits(&[0.4, -0.5, 0.5, -0.5]),
                lits(&[0.0, -0.1, -0.2, 0.0]),
                1,
            ),
            (DgpFamily::Setar, 10) => Self::setar(
                lits(&[0.5, 0.2, 0.1, -0.4, 0.4, -0.1, -0.2, -0.5, -0.25, 0.25]),
                lits(&[0.4, -0.5, 0.5, -0.5, 0.5, -0.5, 0.5, -0.4, 0.5, -0.5]),
                lits(&[0.0, -0.1, -0.2, 0.1, 0.2, 0.3, -0.3, 0.0, 0.1, 0.2]),
                1,
            ),
            (_, p) => Err(FcarError::UnsupportedOrder(p)),
        }
    }

    pub fn with_noise(mut self, noise: NoiseModel<T>) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_init(mut self, init: InitialState) -> Self {
        self.init = init;
        self
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_expar_decay(mut self, decay: ExparDecay) -> Self {
        if let DgpKind::Expar { decay: ref mut dcy, .. } = self.kind {
            *dcy = decay;
        }
        self
    }

    pub fn family(&self) -> Option<DgpFamily> {
        match self.kind {
            DgpKind::Sine { .. } => Some(DgpFamily::Sine),
            DgpKind::Expar { .. } => Some(DgpFamily::Expar),
            DgpKind::Setar { .. } => Some(DgpFamily::Setar),
            DgpKind::Linear { .. } => None,
        }
    }

    pub fn name(&self) -> &'static str {
        self.family().map_or("linear", |f| f.as_str())
    }

    fn validate(&self) -> Result<()> {
        if self.p == 0 || self.d == 0 {
            return Err(FcarError::InvalidArgument("p and d must be positive".into()));
        }
        let lens: Vec<usize> = match &self.kind {
            DgpKind::Sine { a, .. } => vec![a.len()],
            DgpKind::Expar { a, b, .. } => vec![a.len(), b.len()],
            DgpKind::Setar { a, b, r } => vec![a.len(), b.len(), r.len()],
            DgpKind::Linear { coef } => vec![coef.len()],
        };
        if lens.iter().any(|&l| l != self.p) {
            return Err(FcarError::DimensionMismatch(format!(
                "parameter vectors must have length p = {}, got {lens:?}",
                self.p
            )));
        }
        Ok(())
    }

    /// The coefficient function `m_α`, `alpha` in `1..=p`.
    pub fn coefficient(&self, alpha: usize, u: T) -> T {
        let i = alpha - 1;
        match &self.kind {
            DgpKind::Sine { a, omega } => a[i] * (*omega * T::lit(std::f64::consts::PI) * u).sin(),
            DgpKind::Expar { a, b, delta, decay } => {
                let arg = match decay {
                    ExparDecay::Squared => u * u,
                    ExparDecay::Linear => u,
                };
                a[i] + b[i] * (-*delta * arg).exp()
            }
            DgpKind::Setar { a, b, r } => {
                if u < r[i] {
                    a[i]
                } else {
                    b[i]
                }
            }
            DgpKind::Linear { coef } => coef[i],
        }
    }

    pub fn true_functions(&self) -> Vec<CoefficientFn<T>> {
        (1..=self.p)
            .map(|alpha| {
                let spec = self.clone();
                Arc::new(move |u| spec.coefficient(alpha, u)) as CoefficientFn<T>
            })
            .collect()
    }

    /// One recursion step from `history` (needs `max(p, d)` values).
    fn step(&self, history: &[T], innovation: T) -> T {
        let t = history.len();
        let u = history[t - self.d];
        let lags: Vec<T> = (1..=self.p).map(|alpha| history[t - alpha]).collect();
        let mut x = T::zero();
        for (alpha, &lag) in (1..=self.p).zip(&lags) {
            x += self.coefficient(alpha, u) * lag;
        }
        x + self.noise.scale(&lags, self.p) * innovation
    }
}

/// Generated series with everything needed to reproduce it.
#[derive(Debug, Clone)]
pub struct SimulatedSeries<T> {
    pub series: TimeSeries<T>,
    pub spec: DgpSpec<T>,
    pub seed: u64,
    /// The `max(p, d)` values immediately preceding the sample.
    pub presample: Vec<T>,
    /// Standard-normal innovations for each returned value.
    pub innovations: Vec<T>,
}

impl<T: Scalar> SimulatedSeries<T> {
    pub fn true_functions(&self) -> Vec<CoefficientFn<T>> {
        self.spec.true_functions()
    }

    /// Re-runs the recursion from the stored presample and innovations.
    pub fn replay(&self) -> Vec<T> {
        let mut history = self.presample.clone();
        for &e in &self.innovations {
            let x = self.spec.step(&history, e);
            history.push(x);
        }
        history.split_off(self.presample.len())
    }
}

/// Simulates `n` values after `spec.burn_in` discarded iterations.
pub fn simulate<T: Scalar>(spec: &DgpSpec<T>, n: usize, seed: u64) -> Result<SimulatedSeries<T>>
where
    StandardNormal: Distribution<T>,
{
    spec.validate()?;
    if n == 0 {
        return Err(FcarError::EmptySeries);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lead = spec.p.max(spec.d);
    let mut history: Vec<T> = match spec.init {
        InitialState::StandardNormal => (0..lead).map(|_| StandardNormal.sample(&mut rng)).collect(),
        InitialState::Zero => vec![T::zero(); lead],
    };
    let total = spec.burn_in + n;
    let mut innovations = Vec::with_capacity(n);
    for step in 0..total {
        let e: T = StandardNormal.sample(&mut rng);
        let x = spec.step(&history, e);
        if !x.is_finite() || x.abs() > T::lit(DIVERGENCE_LIMIT) {
            return Err(FcarError::NonFiniteState { seed, step });
        }
        history.push(x);
        if step >= spec.burn_in {
            innovations.push(e);
        }
    }
    let values = history.split_off(history.len() - n);
    let presample = history[history.len() - lead..].to_vec();
    Ok(SimulatedSeries {
        series: TimeSeries::new(values)?,
        spec: spec.clone(),
        seed,
        presample,
        innovations,
    })
}

pub fn simulate_sine<T: Scalar>(n: usize, d: usize, a: Vec<T>, omega: T, seed: u64) -> Result<SimulatedSeries<T>>
where
    StandardNormal: Distribution<T>,
{
    simulate(&DgpSpec::sine(a, omega, d)?, n, seed)
}

pub fn simulate_expar<T: Scalar>(
    n: usize,
    d: usize,
    a: Vec<T>,
    b: Vec<T>,
    delta: T,
    seed: u64,
) -> Result<SimulatedSeries<T>>
where
    StandardNormal: Distribution<T>,
{
    simulate(&DgpSpec::expar(a, b, delta, d)?, n, seed)
}

pub fn simulate_setar<T: Scalar>(
    n: usize,
    d: usize,
    a: Vec<T>,
    b: Vec<T>,
    r: Vec<T>,
    seed: u64,
) -> Result<SimulatedSeries<T>>
where
    StandardNormal: Distribution<T>,
{
    simulate(&DgpSpec::setar(a, b, r, d)?, n, seed)
}
