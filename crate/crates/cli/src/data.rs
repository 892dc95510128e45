//! CSV ingestion: clear-sky index series from irradiance files, or a plain
//! `value` column.

use std::path::Path;

use chrono::{DateTime, NaiveDateTime, NaiveTime, Timelike};
use fcar::{make_series, TimeSeries};

use crate::error::{csv_err, CliError, Result};

/// Rows whose clear-sky irradiance is at or below this (W/m²) are dropped.
pub const MIN_CLEARSKY: f64 = 1.0;

const TIMESTAMP_NAMES: &[&str] = &["timestamp", "time", "datetime", "date", "t"];
const INDEX_NAMES: &[&str] = &["index", "clearsky_index", "csi", "kt"];
const MEASURED_NAMES: &[&str] = &["measured", "ghi", "irradiance"];
const CLEARSKY_NAMES: &[&str] = &["clearsky", "clear_sky", "clearsky_ghi"];
const VALUE_NAMES: &[&str] = &["value", "x"];

/// A parsed timestamp: seconds (epoch for dates, since midnight for bare
/// times, verbatim for integers) and the time of day when known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stamp {
    pub value: i64,
    pub time_of_day: Option<i64>,
    bare_time: bool,
}

pub fn parse_stamp(s: &str) -> Option<Stamp> {
    let s = s.trim();
    if let Ok(v) = s.parse::<i64>() {
        return Some(Stamp { value: v, time_of_day: None, bare_time: false });
    }
    let from_naive = |dt: NaiveDateTime| {
        let tod = dt.time().num_seconds_from_midnight() as i64;
        Stamp { value: dt.and_utc().timestamp(), time_of_day: Some(tod), bare_time: false }
    };
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(from_naive(dt.naive_local()));
    }
    for fmt in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%dT%H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(from_naive(dt));
        }
    }
    for fmt in ["%H:%M:%S", "%H:%M"] {
        if let Ok(t) = NaiveTime::parse_from_str(s, fmt) {
            let tod = t.num_seconds_from_midnight() as i64;
            return Some(Stamp { value: tod, time_of_day: Some(tod), bare_time: true });
        }
    }
    None
}

/// Inclusive range of timestamps (or 1-based row numbers when the file has
/// no timestamp column). Bare `HH:MM` bounds match the time of day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start: Stamp,
    pub end: Stamp,
}

impl Window {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || CliError::Config(format!("window '{s}' must be START,END"));
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let start = parse_stamp(a).ok_or_else(bad)?;
        let end = parse_stamp(b).ok_or_else(bad)?;
        if start.bare_time != end.bare_time {
            return Err(CliError::Config(format!("window '{s}' mixes times of day and full timestamps")));
        }
        Ok(Self { start, end })
    }

    fn contains(&self, stamp: Option<Stamp>, row: usize) -> Result<bool> {
        let key = |bound: &Stamp, s: Option<Stamp>| -> Result<i64> {
            match s {
                None => Ok(row as i64),
                Some(s) if bound.bare_time => s
                    .time_of_day
                    .ok_or_else(|| CliError::Config("time-of-day window needs date-time stamps".into())),
                Some(s) => Ok(s.value),
            }
        };
        Ok(key(&self.start, stamp)? >= self.start.value && key(&self.end, stamp)? <= self.end.value)
    }
}

#[derive(Debug, Clone)]
pub struct LoadedSeries {
    pub series: TimeSeries<f64>,
    /// Row labels for output: the timestamp text, or the 1-based row number.
    pub labels: Vec<String>,
    /// Rows discarded because the clear-sky irradiance was at most 1 W/m².
    pub dropped: usize,
}

enum Layout {
    Index(usize),
    Ratio { measured: usize, clearsky: usize },
    Value(usize),
}

fn find(headers: &csv::StringRecord, names: &[&str]) -> Option<usize> {
    headers.iter().position(|h| names.contains(&h.trim().to_ascii_lowercase().as_str()))
}

fn number(record: &csv::StringRecord, col: usize, line: usize, what: &str) -> Result<f64> {
    let raw = record.get(col).unwrap_or("").trim();
    let v: f64 = raw
        .parse()
        .map_err(|_| CliError::ParseError { line, message: format!("{what} '{raw}' is not a number") })?;
    if !v.is_finite() {
        return Err(CliError::ParseError { line, message: format!("{what} is not finite") });
    }
    Ok(v)
}

/// Reads a clear-sky index series: the `index` column verbatim when present,
/// otherwise `measured / clearsky`, otherwise a `value` column.
pub fn load_irradiance_csv(path: &Path, window: Option<&Window>) -> Result<LoadedSeries> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(csv_err(path))?;
    let headers = reader.headers().map_err(csv_err(path))?.clone();
    let time_col = find(&headers, TIMESTAMP_NAMES);
    let layout = if let Some(c) = find(&headers, INDEX_NAMES) {
        Layout::Index(c)
    } else if let Some(m) = find(&headers, MEASURED_NAMES) {
        let c = find(&headers, CLEARSKY_NAMES).ok_or_else(|| CliError::MissingColumn("clearsky".into()))?;
        Layout::Ratio { measured: m, clearsky: c }
    } else if let Some(c) = find(&headers, VALUE_NAMES) {
        Layout::Value(c)
    } else {
        return Err(CliError::MissingColumn("index, measured/clearsky or value".into()));
    };

    let mut values = Vec::new();
    let mut stamps = Vec::new();
    let mut labels = Vec::new();
    let mut dropped = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err(path))?;
        let line = record.position().map_or(i + 2, |p| p.line() as usize);
        let row = i + 1;
        let stamp = match time_col {
            Some(c) => {
                let raw = record.get(c).unwrap_or("");
                Some(parse_stamp(raw).ok_or_else(|| CliError::ParseError {
                    line,
                    message: format!("unrecognised timestamp '{raw}'"),
                })?)
            }
            None => None,
        };
        if let Some(w) = window {
            if !w.contains(stamp, row)? {
                continue;
            }
        }
        let value = match layout {
            Layout::Index(c) | Layout::Value(c) => number(&record, c, line, "value")?,
            Layout::Ratio { measured, clearsky } => {
                let cs = number(&record, clearsky, line, "clearsky")?;
                if cs <= MIN_CLEARSKY {
                    dropped += 1;
                    continue;
                }
                let m = number(&record, measured, line, "measured")?;
                if m < 0.0 {
                    return Err(CliError::ParseError { line, message: format!("negative measured irradiance {m}") });
                }
                m / cs
            }
        };
        values.push(value);
        stamps.push(stamp);
        labels.push(match (time_col, stamp) {
            (Some(c), Some(_)) => record.get(c).unwrap_or("").trim().to_string(),
            _ => row.to_string(),
        });
    }
    if values.is_empty() {
        return Err(CliError::EmptyWindow);
    }
    let timestamps: Option<Vec<i64>> = stamps.iter().map(|s| s.map(|s| s.value)).collect();
    let series = make_series(values, timestamps)?;
    Ok(LoadedSeries { series, labels, dropped })
}
