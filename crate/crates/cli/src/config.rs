//! Command-line arguments and the flat `key = value` configuration file.
//!
//! File entries are spliced into the argument list as `--key value` right
//! after the subcommand, except for keys already given on the command line,
//! so explicit flags always win.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fcar::{DgpFamily, Method};

use crate::error::{io_err, CliError, Result};

const COMMANDS: &[&str] = &["simulate", "fit", "forecast", "replicate"];

#[derive(Parser, Debug, Clone)]
#[command(name = "fcar", version, about = "Functional-coefficient autoregression: fit, forecast and simulate")]
pub struct Cli {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Monte Carlo study over a grid of DGPs, lengths and orders.
    Simulate(SimulateArgs),
    /// Fit SBLL and the AR baseline to a series.
    Fit(FitArgs),
    /// Forecast a series with one or more methods.
    Forecast(ForecastArgs),
    /// Run the full length-by-order grid for one example DGP.
    Replicate(ReplicateArgs),
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct SmootherArgs {
    /// Local-linear bandwidth (default: rule of thumb).
    #[arg(long)]
    pub h: Option<f64>,
    /// Number of interior knots (default: from the sample size).
    #[arg(long)]
    pub knots: Option<usize>,
}

impl SmootherArgs {
    pub fn options(&self) -> Result<fcar::SbllOptions<f64>> {
        if let Some(h) = self.h {
            if !(h > 0.0 && h.is_finite()) {
                return Err(CliError::Config(format!("--h must be positive, got {h}")));
            }
        }
        Ok(fcar::SbllOptions { bandwidth: self.h, interior_knots: self.knots })
    }
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct SimulateArgs {
    #[arg(long, value_delimiter = ',', default_value = "sine")]
    pub dgp: Vec<DgpFamily>,
    #[arg(long, value_delimiter = ',', default_value = "75,150,250,500")]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "4,10")]
    pub p: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, value_delimiter = ',', default_value = "naive,bootstrap,multistage")]
    pub methods: Vec<Method>,
    /// Forecast horizon.
    #[arg(long = "M", default_value_t = 10)]
    pub horizon: usize,
    /// Bootstrap paths.
    #[arg(long = "B", default_value_t = 500)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest AR order tried when `ar` is among the methods.
    #[arg(long, default_value_t = 8)]
    pub qmax: usize,
    #[command(flatten)]
    pub smoother: SmootherArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Keep rows in `START,END` (timestamps, `HH:MM` times of day, or row numbers).
    #[arg(long)]
    pub window: Option<String>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    #[arg(long, default_value_t = 5)]
    pub d: usize,
    #[arg(long, default_value_t = 8)]
    pub qmax: usize,
    #[command(flatten)]
    pub smoother: SmootherArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_delimiter = ',', default_value = "naive")]
    pub method: Vec<Method>,
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    #[arg(long, default_value_t = 5)]
    pub d: usize,
    #[arg(long = "M", default_value_t = 10)]
    pub horizon: usize,
    #[arg(long = "B", default_value_t = 500)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub qmax: usize,
    /// CSV of the values that followed the input series.
    #[arg(long)]
    pub actuals: Option<PathBuf>,
    #[command(flatten)]
    pub smoother: SmootherArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct ReplicateArgs {
    /// 1 = sine, 2 = EXPAR, 3 = SETAR.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
    pub example: u32,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

impl ReplicateArgs {
    pub fn to_simulate(&self) -> Result<SimulateArgs> {
        Ok(SimulateArgs {
            dgp: vec![DgpFamily::from_example(self.example)?],
            n: vec![75, 150, 250, 500],
            p: vec![4, 10],
            reps: self.reps,
            methods: vec![Method::Naive, Method::Bootstrap, Method::Multistage],
            horizon: 10,
            paths: 500,
            seed: self.seed,
            qmax: 8,
            smoother: SmootherArgs { h: None, knots: None },
            out: self.out.clone(),
        })
    }
}

impl SimulateArgs {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(CliError::Config("--reps must be at least 1".into()));
        }
        if self.horizon == 0 {
            return Err(CliError::Config("--M must be at least 1".into()));
        }
        if self.dgp.is_empty() || self.n.is_empty() || self.p.is_empty() || self.methods.is_empty() {
            return Err(CliError::Config("--dgp, --n, --p and --methods must be non-empty".into()));
        }
        for &n in &self.n {
            for &p in &self.p {
                if n <= 2 * p {
                    return Err(CliError::Config(format!("n = {n} must exceed 2p = {}", 2 * p)));
                }
            }
        }
        Ok(())
    }
}

impl ForecastArgs {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(CliError::Config("--M must be at least 1".into()));
        }
        if self.method.is_empty() {
            return Err(CliError::Config("--method must name at least one method".into()));
        }
        Ok(())
    }
}

/// Parses a `key = value` file. `#` starts a comment; keys may use `_` or `-`.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::ParseError { line: i + 1, message: format!("expected key = value, got '{line}'") })?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(CliError::ParseError { line: i + 1, message: "empty key".into() });
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn flag_name(arg: &str) -> Option<&str> {
    let name = arg.strip_prefix("--")?;
    Some(name.split_once('=').map_or(name, |(k, _)| k))
}

/// Splices the config file named by `--config` into `args`.
pub fn merge_config_args(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let strings: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut config_path = None;
    for (i, a) in strings.iter().enumerate() {
        if a == "--config" {
            config_path = strings.get(i + 1).cloned();
        } else if let Some(v) = a.strip_prefix("--config=") {
            config_path = Some(v.to_string());
        }
    }
    let Some(config_path) = config_path else {
        return Ok(args);
    };
    let mut entries = read_config_file(Path::new(&config_path))?;
    let given: Vec<&str> = strings.iter().filter_map(|a| flag_name(a)).collect();
    let file_command = entries.remove("command");

    let mut out = args.clone();
    let position = match strings.iter().position(|a| COMMANDS.contains(&a.as_str())) {
        Some(pos) => pos + 1,
        None => {
            let command = file_command.ok_or_else(|| CliError::Config("no subcommand given".into()))?;
            let at = 1.min(out.len());
            out.insert(at, command.into());
            at + 1
        }
    };
    let mut injected = Vec::new();
    for (key, value) in entries {
        if key == "config" || given.contains(&key.as_str()) {
            continue;
        }
        injected.push(OsString::from(format!("--{key}")));
        injected.push(OsString::from(value));
    }
    out.splice(position..position, injected);
    Ok(out)
}

/// Parses the process arguments, honouring `--config`. Clap errors exit.
pub fn parse_args<I, S>(args: I) -> Result<Cli>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    let merged = merge_config_args(args.into_iter().map(Into::into).collect())?;
    Ok(Cli::parse_from(merged))
}

/// As [`parse_args`], but returns clap errors instead of exiting.
pub fn try_parse_args<I, S>(args: I) -> Result<Cli>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    let merged = merge_config_args(args.into_iter().map(Into::into).collect())?;
    Cli::try_parse_from(merged).map_err(|e| CliError::Config(e.to_string()))
}
