//! The four subcommands.

use std::path::Path;

use fcar::{
    forecast_ar, forecast_bootstrap, forecast_multistage, forecast_naive, kde, median, rspe, run_cell, sbll_fit,
    select_ar_order, CellConfig, DgpFamily, DgpSpec, ForecastResult, Method, MonteCarloReport, SbllOptions,
    TimeSeries,
};

use crate::config::{FitArgs, ForecastArgs, ReplicateArgs, SimulateArgs};
use crate::data::{load_irradiance_csv, LoadedSeries, Window};
use crate::error::{CliError, Result};
use crate::output::{ensure_dir, fmt_real, read_values, Table};
use crate::svg::{emit_svg_lines, Chart, Line};

const KDE_POINTS: usize = 200;

/// Lag whose efficiency density is plotted for each family.
pub fn plot_gamma(family: DgpFamily, p: usize) -> usize {
    match family {
        DgpFamily::Sine => 1,
        DgpFamily::Expar => p,
        DgpFamily::Setar => 3.min(p),
    }
}

fn load(input: &crate::config::InputArgs) -> Result<LoadedSeries> {
    let window = input.window.as_deref().map(Window::parse).transpose()?;
    let loaded = load_irradiance_csv(&input.input, window.as_ref())?;
    if loaded.dropped > 0 {
        eprintln!("dropped {} rows with clear-sky irradiance at or below 1 W/m2", loaded.dropped);
    }
    Ok(loaded)
}

fn cell_config(args: &SimulateArgs, family: DgpFamily, n: usize, p: usize, opts: SbllOptions<f64>) -> Result<CellConfig<f64>> {
    let spec = DgpSpec::example(family, p)?;
    let mut cell = CellConfig::new(spec, n, args.reps, args.seed);
    cell.methods = args.methods.clone();
    cell.horizon = args.horizon;
    cell.bootstrap_paths = args.paths;
    cell.ar_qmax = args.qmax;
    cell.opts = opts;
    Ok(cell)
}

fn efficiency_density(reports: &[(usize, MonteCarloReport<f64>)], gamma: usize) -> Vec<Line> {
    let samples: Vec<(usize, Vec<f64>)> = reports
        .iter()
        .map(|(n, r)| (*n, r.efficiency_values(gamma).into_iter().filter(|v| v.is_finite()).collect()))
        .collect();
    let all = samples.iter().flat_map(|(_, s)| s.iter().copied());
    let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if !(hi > lo) {
        return Vec::new();
    }
    let grid: Vec<f64> = (0..KDE_POINTS).map(|i| lo + (hi - lo) * i as f64 / (KDE_POINTS - 1) as f64).collect();
    samples
        .into_iter()
        .filter_map(|(n, s)| kde(&s, &grid).ok().map(|density| Line::new(format!("n = {n}"), grid.clone(), density)))
        .collect()
}

/// Runs every (process, n, p) cell. Failed cells are reported on stderr and
/// skipped; the outputs of the remaining cells are still written.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    args.validate()?;
    let opts = args.smoother.options()?;
    ensure_dir(&args.out)?;
    let mut rmpe_table = Table::new(&["dgp", "n", "p", "method", "M", "rmpe"]);
    let mut eff_table = Table::new(&["dgp", "n", "p", "gamma", "rep", "eff"]);
    let total = args.dgp.len() * args.n.len() * args.p.len();
    let mut failed = 0;

    for &family in &args.dgp {
        for &p in &args.p {
            let mut by_n = Vec::new();
            for &n in &args.n {
                let label = format!("{family} n={n} p={p}");
                let report = match cell_config(args, family, n, p, opts).and_then(|c| Ok(run_cell(&c)?)) {
                    Ok(r) => r,
                    Err(e) => {
                        eprintln!("cell {label} (seed {}) failed: {e}", args.seed);
                        failed += 1;
                        continue;
                    }
                };
                let cell = [family.to_string(), n.to_string(), p.to_string()];
                for (method, values) in report.methods.iter().zip(&report.rmpe) {
                    for (j, v) in values.iter().enumerate() {
                        let mut row = cell.to_vec();
                        row.extend([method.to_string(), (j + 1).to_string(), fmt_real(*v)]);
                        rmpe_table.push(row);
                    }
                }
                for (g, effs) in report.efficiency.iter().enumerate() {
                    for (rep, e) in effs.iter().enumerate() {
                        let mut row = cell.to_vec();
                        row.extend([(g + 1).to_string(), rep.to_string(), fmt_real(e.value)]);
                        eff_table.push(row);
                    }
                }
                let lines: Vec<Line> = report
                    .methods
                    .iter()
                    .zip(&report.rmpe)
                    .map(|(m, v)| Line::indexed(m.as_str(), v.clone()))
                    .collect();
                let chart = Chart::new(format!("RMPE, {label}"), "M", "RMPE");
                emit_svg_lines(&lines, &chart, &args.out.join(format!("rmpe_{family}_n{n}_p{p}.svg")))?;
                let gamma = plot_gamma(family, p);
                let med = median(&report.efficiency_values(gamma)).unwrap_or(f64::NAN);
                println!("{label}: median efficiency (gamma {gamma}) {med:.4}");
                by_n.push((n, report));
            }
            let gamma = plot_gamma(family, p);
            let lines = efficiency_density(&by_n, gamma);
            if !lines.is_empty() {
                let chart = Chart::new(format!("Efficiency density, {family} p={p}, gamma={gamma}"), "efficiency", "density");
                emit_svg_lines(&lines, &chart, &args.out.join(format!("efficiency_{family}_p{p}.svg")))?;
            }
        }
    }
    rmpe_table.write(&args.out.join("rmpe.csv"))?;
    eff_table.write(&args.out.join("efficiency.csv"))?;
    if failed > 0 {
        return Err(CliError::CellsFailed { failed, total });
    }
    Ok(())
}

pub fn cmd_replicate(args: &ReplicateArgs) -> Result<()> {
    cmd_simulate(&args.to_simulate()?)
}

/// In-sample summary of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSummary {
    pub model: &'static str,
    pub order: usize,
    pub n_eff: usize,
    pub mse: f64,
    pub aic: Option<f64>,
}

fn optional(v: Option<f64>) -> String {
    v.map(fmt_real).unwrap_or_default()
}

pub fn cmd_fit(args: &FitArgs) -> Result<Vec<FitSummary>> {
    let loaded = load(&args.input)?;
    let series = &loaded.series;
    let opts = args.smoother.options()?;
    let fit = sbll_fit(series, args.p, args.d, &opts)?;
    let ar = select_ar_order(series, args.qmax)?;
    let n = series.len();
    let values = series.values();

    let t0 = fit.frame().t0();
    let fcar: Vec<Option<f64>> = (0..n).map(|i| i.checked_sub(t0 - 1).map(|k| fit.fitted()[k])).collect();
    let ar_fitted = ar.fitted(series);
    let ar_col: Vec<Option<f64>> = (0..n).map(|i| i.checked_sub(ar.order).map(|k| ar_fitted[k])).collect();

    ensure_dir(&args.out)?;
    let mut table = Table::new(&["t", "observed", "fcar_fitted", "ar_fitted"]);
    let mut resid = Table::new(&["t", "fcar_residual", "ar_residual"]);
    for i in 0..n {
        let t = loaded.labels[i].clone();
        table.push(vec![t.clone(), fmt_real(values[i]), optional(fcar[i]), optional(ar_col[i])]);
        resid.push(vec![t, optional(fcar[i].map(|f| values[i] - f)), optional(ar_col[i].map(|f| values[i] - f))]);
    }
    table.write(&args.out.join("fit.csv"))?;
    resid.write(&args.out.join("residuals.csv"))?;

    let summaries = vec![
        FitSummary { model: "fcar", order: args.p, n_eff: fit.frame().rows(), mse: fit.residual_summary().mse, aic: None },
        FitSummary { model: "ar", order: ar.order, n_eff: ar.n_eff, mse: ar.sigma2, aic: Some(ar.aic) },
    ];
    let mut summary = Table::new(&["model", "order", "n_eff", "mse", "aic"]);
    for s in &summaries {
        summary.push(vec![s.model.into(), s.order.to_string(), s.n_eff.to_string(), fmt_real(s.mse), optional(s.aic)]);
        println!("{}: order {}, n_eff {}, in-sample MSE {:.6}", s.model, s.order, s.n_eff, s.mse);
    }
    summary.write(&args.out.join("fit_summary.csv"))?;

    let x: Vec<f64> = (1..=n).map(|t| t as f64).collect();
    let nan_for_none = |v: &[Option<f64>]| v.iter().map(|f| f.unwrap_or(f64::NAN)).collect::<Vec<_>>();
    let lines = vec![
        Line::new("observed", x.clone(), values.to_vec()),
        Line::new(format!("FCAR(p={}, d={})", args.p, args.d), x.clone(), nan_for_none(&fcar)),
        Line::new(format!("AR({})", ar.order), x, nan_for_none(&ar_col)),
    ];
    emit_svg_lines(&lines, &Chart::new("Observed and fitted", "t", "value"), &args.out.join("fit.svg"))?;
    Ok(summaries)
}

fn run_method(args: &ForecastArgs, series: &TimeSeries<f64>, method: Method) -> Result<ForecastResult<f64>> {
    let opts = args.smoother.options()?;
    Ok(match method {
        Method::Naive => forecast_naive(&sbll_fit(series, args.p, args.d, &opts)?.into_estimator(), series, args.horizon)?,
        Method::Bootstrap => {
            let fit = sbll_fit(series, args.p, args.d, &opts)?;
            forecast_bootstrap(&fit, series, args.horizon, args.paths, args.seed)?
        }
        Method::Multistage => forecast_multistage(series, args.p, args.d, args.horizon, &opts)?,
        Method::Ar => forecast_ar(&select_ar_order(series, args.qmax)?, series, args.horizon)?,
    })
}

pub fn cmd_forecast(args: &ForecastArgs) -> Result<Vec<ForecastResult<f64>>> {
    args.validate()?;
    let loaded = load(&args.input)?;
    let series = &loaded.series;
    let actuals = match &args.actuals {
        Some(path) => {
            let v = read_values(path)?;
            if v.len() < args.horizon {
                return Err(CliError::Config(format!("{} holds {} values, need {}", path.display(), v.len(), args.horizon)));
            }
            Some(v[..args.horizon].to_vec())
        }
        None => None,
    };
    let results = args.method.iter().map(|&m| run_method(args, series, m)).collect::<Result<Vec<_>>>()?;

    ensure_dir(&args.out)?;
    let mut table = Table::new(&["M", "point", "clamped", "method"]);
    for r in &results {
        for (j, (&v, &c)) in r.point.iter().zip(&r.clamped).enumerate() {
            table.push(vec![(j + 1).to_string(), fmt_real(v), c.to_string(), r.method.to_string()]);
        }
    }
    table.write(&args.out.join("forecast.csv"))?;

    if let Some(actual) = &actuals {
        write_rspe(&results, actual, &args.out.join("rspe.csv"))?;
    }
    forecast_plot(series.values(), &results, actuals.as_deref(), &args.out.join("forecast.svg"))?;
    Ok(results)
}

/// Per-horizon RSPE with one row per method and a final `best` row naming
/// the method with the smallest error in each column.
fn write_rspe(results: &[ForecastResult<f64>], actual: &[f64], path: &Path) -> Result<()> {
    let horizon = actual.len();
    let mut header = vec!["method".to_string()];
    header.extend((1..=horizon).map(|m| m.to_string()));
    let mut table = Table::new(&header);
    let errors = results.iter().map(|r| rspe(&r.point, actual)).collect::<fcar::Result<Vec<_>>>()?;
    for (r, e) in results.iter().zip(&errors) {
        let mut row = vec![r.method.to_string()];
        row.extend(e.iter().map(|&v| fmt_real(v)));
        table.push(row);
    }
    let mut best = vec!["best".to_string()];
    for j in 0..horizon {
        let k = (0..results.len())
            .min_by(|&a, &b| errors[a][j].total_cmp(&errors[b][j]))
            .expect("at least one method");
        best.push(results[k].method.to_string());
    }
    table.push(best);
    table.write(path)
}

fn forecast_plot(observed: &[f64], results: &[ForecastResult<f64>], actuals: Option<&[f64]>, path: &Path) -> Result<()> {
    let n = observed.len();
    let horizon = results.first().map_or(0, |r| r.horizon());
    let start = n.saturating_sub((3 * horizon).max(50));
    let future: Vec<f64> = (n + 1..=n + horizon).map(|t| t as f64).collect();
    let mut lines = vec![Line::new("observed", (start + 1..=n).map(|t| t as f64).collect(), observed[start..].to_vec())];
    if let Some(a) = actuals {
        lines.push(Line::new("actual", future.clone(), a.to_vec()));
    }
    for r in results {
        lines.push(Line::new(r.method.as_str(), future.clone(), r.point.clone()));
    }
    emit_svg_lines(&lines, &Chart::new("Forecasts", "t", "value"), path)
}
