//! Seeded Monte Carlo replications: simulate, fit, forecast, score.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::ar::{forecast_ar, select_ar_order};
use crate::dgp::{simulate, DgpSpec};
use crate::error::{FcarError, Result};
use crate::forecast::{forecast_bootstrap, forecast_multistage, forecast_naive, Method, DEFAULT_BOOTSTRAP_PATHS};
use crate::metrics::{efficiency, rmpe, Efficiency};
use crate::sbll::{oracle_fit, sbll_fit, SbllFit, SbllOptions};
use crate::scalar::Scalar;
use crate::series::TimeSeries;

/// Multiplier separating replication seeds.
pub const SEED_STRIDE: u64 = 2_654_435_761;
/// Default maximum order for the AR baseline.
pub const DEFAULT_AR_QMAX: usize = 8;

/// `base + rep · 2654435761 (mod 2⁶⁴)`.
pub fn replication_seed(base: u64, rep: usize) -> u64 {
    base.wrapping_add((rep as u64).wrapping_mul(SEED_STRIDE))
}

/// Seed of the bootstrap resampler for a replication, kept apart from the
/// simulation stream of the same replication.
pub fn bootstrap_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

/// One `(process, n, p)` cell of a Monte Carlo study.
#[derive(Debug, Clone)]
pub struct CellConfig<T> {
    pub spec: DgpSpec<T>,
    pub n: usize,
    pub methods: Vec<Method>,
    pub horizon: usize,
    pub bootstrap_paths: usize,
    pub reps: usize,
    pub base_seed: u64,
    pub opts: SbllOptions<T>,
    /// Compute oracle efficiencies for every lag.
    pub efficiency: bool,
    pub ar_qmax: usize,
}

impl<T: Scalar> CellConfig<T> {
    pub fn new(spec: DgpSpec<T>, n: usize, reps: usize, base_seed: u64) -> Self {
        Self {
            spec,
            n,
            methods: vec![Method::Naive, Method::Bootstrap, Method::Multistage],
            horizon: 10,
            bootstrap_paths: DEFAULT_BOOTSTRAP_PATHS,
            reps,
            base_seed,
            opts: SbllOptions::default(),
            efficiency: true,
            ar_qmax: DEFAULT_AR_QMAX,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(FcarError::InvalidArgument("reps must be at least 1".into()));
        }
        if self.horizon == 0 && !self.methods.is_empty() {
            return Err(FcarError::InvalidArgument("forecast horizon must be at least 1".into()));
        }
        if self.n <= 2 * self.spec.p {
            return Err(FcarError::SeriesTooShort { needed: 2 * self.spec.p, got: self.n });
        }
        Ok(())
    }
}

/// Everything computed for one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationOutcome<T> {
    pub rep: usize,
    pub seed: u64,
    /// Held-out values `X_{n+1..n+M}`.
    pub actuals: Vec<T>,
    /// Point forecasts in the order of `CellConfig::methods`.
    pub forecasts: Vec<Vec<T>>,
    /// Per lag `γ = 1..=p`; empty when efficiencies are disabled.
    pub efficiency: Vec<Efficiency<T>>,
}

/// Oracle efficiency of every lag, evaluated at the sample delay values.
pub fn oracle_efficiencies<T: Scalar>(
    fit: &SbllFit<T>,
    true_fns: &[crate::sbll::CoefficientFn<T>],
) -> Result<Vec<Efficiency<T>>> {
    let frame = fit.frame();
    let delay = frame.delay();
    (1..=frame.p())
        .map(|gamma| {
            let oracle = oracle_fit(frame, true_fns, gamma, fit.bandwidth())?;
            let mut o = Vec::with_capacity(delay.len());
            let mut s = Vec::with_capacity(delay.len());
            for &u in delay {
                o.push(oracle.evaluate(u)?.value);
                s.push(fit.coefficient(gamma, u)?.value);
            }
            let truth: Vec<T> = delay.iter().map(|&u| true_fns[gamma - 1](u)).collect();
            efficiency(&o, &s, &truth)
        })
        .collect()
}

/// Runs replication `rep` of `cell`.
pub fn run_replication<T: Scalar>(cell: &CellConfig<T>, rep: usize) -> Result<ReplicationOutcome<T>>
where
    StandardNormal: Distribution<T>,
{
    let seed = replication_seed(cell.base_seed, rep);
    let wrap = |e: FcarError| FcarError::Replication { rep, seed, source: Box::new(e) };
    let (p, d, m) = (cell.spec.p, cell.spec.d, cell.horizon);

    let sim = simulate(&cell.spec, cell.n + m, seed).map_err(wrap)?;
    let observed = sim.series.prefix(cell.n).map_err(wrap)?;
    let actuals = sim.series.values()[cell.n..].to_vec();
    let fit = sbll_fit(&observed, p, d, &cell.opts).map_err(wrap)?;

    let forecasts = cell
        .methods
        .iter()
        .map(|method| forecast_point(*method, cell, &fit, &observed, seed))
        .collect::<Result<Vec<_>>>()
        .map_err(wrap)?;

    let efficiency = if cell.efficiency {
        oracle_efficiencies(&fit, &sim.true_functions()).map_err(wrap)?
    } else {
        Vec::new()
    };
    Ok(ReplicationOutcome { rep, seed, actuals, forecasts, efficiency })
}

fn forecast_point<T: Scalar>(
    method: Method,
    cell: &CellConfig<T>,
    fit: &SbllFit<T>,
    observed: &TimeSeries<T>,
    seed: u64,
) -> Result<Vec<T>> {
    let m = cell.horizon;
    let result = match method {
        Method::Naive => forecast_naive(fit, observed, m)?,
        Method::Bootstrap => forecast_bootstrap(fit, observed, m, cell.bootstrap_paths, bootstrap_seed(seed))?,
        Method::Multistage => forecast_multistage(observed, cell.spec.p, cell.spec.d, m, &cell.opts)?,
        Method::Ar => forecast_ar(&select_ar_order(observed, cell.ar_qmax)?, observed, m)?,
    };
    Ok(result.point)
}

/// Aggregated results of a cell.
#[derive(Debug, Clone)]
pub struct MonteCarloReport<T> {
    pub spec: DgpSpec<T>,
    pub n: usize,
    pub p: usize,
    pub reps: usize,
    pub base_seed: u64,
    pub methods: Vec<Method>,
    /// `rmpe[k][j]`: method `k`, horizon `j + 1`.
    pub rmpe: Vec<Vec<T>>,
    /// `efficiency[γ − 1][rep]`.
    pub efficiency: Vec<Vec<Efficiency<T>>>,
    pub replications: Vec<ReplicationOutcome<T>>,
}

impl<T: Scalar> MonteCarloReport<T> {
    pub fn rmpe_for(&self, method: Method) -> Option<&[T]> {
        self.methods.iter().position(|&m| m == method).map(|k| self.rmpe[k].as_slice())
    }

    /// Efficiency values of lag `gamma` across replications.
    pub fn efficiency_values(&self, gamma: usize) -> Vec<T> {
        self.efficiency.get(gamma - 1).map(|v| v.iter().map(|e| e.value).collect()).unwrap_or_default()
    }
}

/// Runs every replication of `cell` on the current rayon pool. Results are
/// collected by replication index, so they do not depend on scheduling.
pub fn run_cell<T: Scalar>(cell: &CellConfig<T>) -> Result<MonteCarloReport<T>>
where
    StandardNormal: Distribution<T>,
{
    cell.validate()?;
    let replications = (0..cell.reps)
        .into_par_iter()
        .map(|rep| run_replication(cell, rep))
        .collect::<Result<Vec<_>>>()?;

    let actuals: Vec<Vec<T>> = replications.iter().map(|r| r.actuals.clone()).collect();
    let rmpe = (0..cell.methods.len())
        .map(|k| {
            let f: Vec<Vec<T>> = replications.iter().map(|r| r.forecasts[k].clone()).collect();
            rmpe(&f, &actuals)
        })
        .collect::<Result<Vec<_>>>()?;
    let efficiency = if cell.efficiency {
        (0..cell.spec.p).map(|g| replications.iter().map(|r| r.efficiency[g]).collect()).collect()
    } else {
        Vec::new()
    };
    Ok(MonteCarloReport {
        spec: cell.spec.clone(),
        n: cell.n,
        p: cell.spec.p,
        reps: cell.reps,
        base_seed: cell.base_seed,
        methods: cell.methods.clone(),
        rmpe,
        efficiency,
        replications,
    })
}
