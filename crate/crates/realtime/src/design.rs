//! U-MIDAS design matrices as seen on forecast day d - h.
//!
//! Every lag is anchored to the target reference period: lag k of a
//! regressor is the k-th period before the regressor period that contains
//! the target period end. A cell whose period exists in the store but has
//! no vintage released by the forecast day is masked; a row whose periods
//! are missing from the store altogether is dropped.

use std::io::Write;

use chrono::{Duration, NaiveDate};
use figas_text::calendar::{period_end, period_start, shift_period, Frequency};
use figas_text::indicators::SentimentSeries;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calendar::{assign_release_date, ReleaseCalendar};
use crate::error::{RealtimeError, Result};
use crate::transform::Transform;
use crate::vintage::VintageStore;

pub const INTERCEPT: &str = "intercept";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressorSpec {
    pub variable: String,
    pub first_lag: usize,
    pub last_lag: usize,
    pub transform: Transform,
}

impl RegressorSpec {
    pub fn new(variable: &str, first_lag: usize, last_lag: usize) -> Self {
        Self { variable: variable.to_string(), first_lag, last_lag, transform: Transform::default_for(variable) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignSpec {
    pub target: String,
    pub target_transform: Transform,
    /// Target lags 1..=target_lags.
    pub target_lags: usize,
    pub regressors: Vec<RegressorSpec>,
    /// Which release of the target is the dependent variable (0 = first).
    pub eval_release: usize,
    pub calendar: ReleaseCalendar,
}

impl DesignSpec {
    /// P = 4 (quarterly) or 6 lags of the target, CFNAI lags 0..=3,
    /// NFCI weekly lags 1..=4 and ADS weekly lags 0..=8; second release as target.
    pub fn standard(target: &str, target_frequency: Frequency) -> Self {
        Self {
            target: target.to_string(),
            target_transform: Transform::default_for(target),
            target_lags: if target_frequency == Frequency::Quarterly { 4 } else { 6 },
            regressors: vec![
                RegressorSpec::new("CFNAI", 0, 3),
                RegressorSpec::new("NFCI", 1, 4),
                RegressorSpec::new("ADS", 0, 8),
            ],
            eval_release: 1,
            calendar: ReleaseCalendar::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DropReason {
    /// The evaluation release of the target is not in the store.
    TargetMissing,
    /// A lag refers to a period the store has never seen.
    History(String),
    /// A sentiment series does not cover the forecast day.
    Sentiment(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub target: String,
    pub horizon: i64,
    /// Column names; `intercept` first, then target lags, regressors and sentiment.
    pub columns: Vec<String>,
    pub sentiment_columns: Vec<String>,
    /// Per row: target period end.
    pub periods: Vec<NaiveDate>,
    /// Per row: first release date d of the target period.
    pub release_dates: Vec<NaiveDate>,
    /// Per row: d - h.
    pub forecast_dates: Vec<NaiveDate>,
    /// Per row: date of the release used as the dependent variable.
    pub target_release_dates: Vec<NaiveDate>,
    pub y: Vec<f64>,
    /// Row-major cells; NaN where masked.
    pub x: Vec<Vec<f64>>,
    pub mask: Vec<Vec<bool>>,
    /// Latest release date among the vintages behind each cell.
    pub sources: Vec<Vec<Option<NaiveDate>>>,
    pub dropped: Vec<(NaiveDate, DropReason)>,
}

enum Cell {
    Value(f64, Option<NaiveDate>),
    Masked,
    Missing(String),
}

fn lag_name(variable: &str, k: usize) -> String {
    format!("{variable}_lag{k}")
}

pub fn sentiment_column(series: &SentimentSeries) -> String {
    format!("S_{}", series.name())
}

fn effective_frequency(store: &VintageStore, variable: &str) -> Result<Frequency> {
    match store.frequency(variable) {
        Some(Frequency::Daily) => Ok(Frequency::Weekly),
        Some(f) => Ok(f),
        None => Err(RealtimeError::InvalidArgument(format!("variable {variable} is not in the vintage store"))),
    }
}

/// Weekly mean of a daily variable; masked unless every stored day of the week is out.
fn weekly_from_daily(store: &VintageStore, variable: &str, week_end: NaiveDate, as_of: NaiveDate) -> Cell {
    let mut d = period_start(week_end, Frequency::Weekly);
    let (mut sum, mut n, mut source) = (0.0, 0usize, None::<NaiveDate>);
    let mut any = false;
    while d <= week_end {
        if store.has_period(variable, d) {
            any = true;
            match store.value_as_of(variable, d, as_of) {
                Some((rd, v)) => {
                    sum += v;
                    n += 1;
                    source = source.max(Some(rd));
                }
                None => return Cell::Masked,
            }
        }
        d += Duration::days(1);
    }
    if !any {
        return Cell::Missing(format!("{variable} week ending {week_end}"));
    }
    Cell::Value(sum / n as f64, source)
}

fn cell(
    store: &VintageStore,
    variable: &str,
    freq: Frequency,
    t: Transform,
    period: NaiveDate,
    as_of: NaiveDate,
) -> Cell {
    if store.frequency(variable) == Some(Frequency::Daily) {
        return weekly_from_daily(store, variable, period, as_of);
    }
    let prev_p = t.needs_previous().then(|| shift_period(period, freq, -1));
    // History is checked before availability so row retention never depends on h.
    for p in std::iter::once(period).chain(prev_p) {
        if !store.has_period(variable, p) {
            return Cell::Missing(format!("{variable} {p}"));
        }
    }
    let Some((rd, cur)) = store.value_as_of(variable, period, as_of) else {
        return Cell::Masked;
    };
    let Some(prev_p) = prev_p else {
        return Cell::Value(cur, Some(rd));
    };
    let Some((rd0, prev)) = store.value_as_of(variable, prev_p, as_of) else {
        return Cell::Masked;
    };
    match t.apply(cur, Some(prev)) {
        Ok(v) => Cell::Value(v, Some(rd.max(rd0))),
        // Zero level: treat the period as unusable history.
        Err(_) => Cell::Missing(format!("{variable} {period} (zero level)")),
    }
}

/// Design for one horizon `h` (days before the first release of each target period).
pub fn build_design(
    store: &VintageStore,
    sentiments: &[SentimentSeries],
    spec: &DesignSpec,
    h: i64,
) -> Result<DesignMatrix> {
    if h < 0 {
        return Err(RealtimeError::InvalidArgument("horizon must be non-negative".into()));
    }
    let target_freq = store
        .frequency(&spec.target)
        .ok_or_else(|| RealtimeError::InvalidArgument(format!("target {} is not in the vintage store", spec.target)))?;
    for s in sentiments {
        if s.frequency != Frequency::Daily {
            return Err(RealtimeError::InvalidArgument(format!("sentiment {} must be daily", s.name())));
        }
    }

    // (name, variable, frequency, transform, lag) per regressor column.
    let mut plan: Vec<(String, &str, Frequency, Transform, usize)> = Vec::new();
    for k in 1..=spec.target_lags {
        plan.push((lag_name(&spec.target, k), &spec.target, target_freq, spec.target_transform, k));
    }
    for r in &spec.regressors {
        let f = effective_frequency(store, &r.variable)?;
        if store.frequency(&r.variable) == Some(Frequency::Daily) && r.transform != Transform::Level {
            return Err(RealtimeError::InvalidArgument(format!("daily variable {} must enter in levels", r.variable)));
        }
        for k in r.first_lag..=r.last_lag {
            plan.push((lag_name(&r.variable, k), &r.variable, f, r.transform, k));
        }
    }
    let mut columns = vec![INTERCEPT.to_string()];
    columns.extend(plan.iter().map(|p| p.0.clone()));
    let sentiment_columns: Vec<String> = sentiments.iter().map(sentiment_column).collect();
    columns.extend(sentiment_columns.iter().cloned());
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = columns.iter().find(|c| !seen.insert(c.as_str())) {
        return Err(RealtimeError::InvalidArgument(format!("duplicate column {dup}")));
    }

    let mut out = DesignMatrix {
        target: spec.target.clone(),
        horizon: h,
        columns,
        sentiment_columns,
        periods: Vec::new(),
        release_dates: Vec::new(),
        forecast_dates: Vec::new(),
        target_release_dates: Vec::new(),
        y: Vec::new(),
        x: Vec::new(),
        mask: Vec::new(),
        sources: Vec::new(),
        dropped: Vec::new(),
    };

    'rows: for t in store.periods(&spec.target) {
        let Some((target_date, level)) = store.nth_release(&spec.target, t, spec.eval_release) else {
            out.dropped.push((t, DropReason::TargetMissing));
            continue;
        };
        let y = if spec.target_transform.needs_previous() {
            let prev_p = shift_period(t, target_freq, -1);
            match store.value_as_of(&spec.target, prev_p, target_date) {
                Some((_, prev)) => match spec.target_transform.apply(level, Some(prev)) {
                    Ok(v) => v,
                    Err(_) => {
                        out.dropped.push((t, DropReason::History(format!("{} {prev_p} (zero level)", spec.target))));
                        continue;
                    }
                },
                None => {
                    out.dropped.push((t, DropReason::History(format!("{} {prev_p}", spec.target))));
                    continue;
                }
            }
        } else {
            level
        };
        let d = assign_release_date(store, &spec.calendar, &spec.target, t);
        let f = d - Duration::days(h);

        let mut row = vec![1.0];
        let mut mask = vec![false];
        let mut src = vec![None];
        for (_, var, freq, tr, k) in &plan {
            let anchor = period_end(t, *freq);
            let p = shift_period(anchor, *freq, -(*k as i64));
            match cell(store, var, *freq, *tr, p, f) {
                Cell::Value(v, s) => {
                    row.push(v);
                    mask.push(false);
                    src.push(s);
                }
                Cell::Masked => {
                    row.push(f64::NAN);
                    mask.push(true);
                    src.push(None);
                }
                Cell::Missing(what) => {
                    out.dropped.push((t, DropReason::History(what)));
                    continue 'rows;
                }
            }
        }
        for s in sentiments {
            match s.value_at(f) {
                Some(v) => {
                    row.push(v);
                    mask.push(false);
                    src.push(Some(f));
                }
                None => {
                    out.dropped.push((t, DropReason::Sentiment(s.name())));
                    continue 'rows;
                }
            }
        }
        out.periods.push(t);
        out.release_dates.push(d);
        out.forecast_dates.push(f);
        out.target_release_dates.push(target_date);
        out.y.push(y);
        out.x.push(row);
        out.mask.push(mask);
        out.sources.push(src);
    }
    if out.y.is_empty() {
        return Err(RealtimeError::EmptyDesign(format!("{} at h = {h}: no usable rows", spec.target)));
    }
    Ok(out)
}

/// One design per horizon, built in parallel; order follows `horizons`.
pub fn build_designs(
    store: &VintageStore,
    sentiments: &[SentimentSeries],
    spec: &DesignSpec,
    horizons: &[i64],
) -> Vec<Result<DesignMatrix>> {
    horizons.par_iter().map(|&h| build_design(store, sentiments, spec, h)).collect()
}

/// A cell whose sources postdate its forecast day.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub period: NaiveDate,
    pub column: String,
    pub source: NaiveDate,
    pub forecast_date: NaiveDate,
}

impl DesignMatrix {
    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column_index(name)?;
        Some(self.x.iter().map(|r| r[j]).collect())
    }

    /// Columns with at least one masked cell; these are left out of estimation.
    pub fn masked_columns(&self) -> Vec<&str> {
        (0..self.columns.len()).filter(|&j| self.mask.iter().any(|m| m[j])).map(|j| self.columns[j].as_str()).collect()
    }

    /// Fully observed regressors other than the intercept and the sentiment columns.
    pub fn control_columns(&self) -> Vec<&str> {
        let masked = self.masked_columns();
        self.columns
            .iter()
            .map(String::as_str)
            .filter(|c| *c != INTERCEPT && !masked.contains(c) && !self.sentiment_columns.iter().any(|s| s == c))
            .collect()
    }

    /// Row-major block of the named columns for the selected rows.
    pub fn select(&self, rows: &[usize], cols: &[&str]) -> Result<Vec<f64>> {
        let idx: Vec<usize> = cols
            .iter()
            .map(|c| self.column_index(c).ok_or_else(|| RealtimeError::InvalidArgument(format!("no column {c}"))))
            .collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(rows.len() * idx.len());
        for &r in rows {
            for &j in &idx {
                out.push(self.x[r][j]);
            }
        }
        Ok(out)
    }

    /// Every unmasked cell whose source release postdates the forecast day.
    pub fn audit(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, row) in self.sources.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                if let Some(s) = s {
                    if !self.mask[i][j] && *s > self.forecast_dates[i] {
                        out.push(Violation {
                            period: self.periods[i],
                            column: self.columns[j].clone(),
                            source: *s,
                            forecast_date: self.forecast_dates[i],
                        });
                    }
                }
            }
        }
        out
    }

    /// Writes `period_end,release_date,forecast_date,target,<columns>`; masked cells are empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["period_end".to_string(), "release_date".into(), "forecast_date".into(), "target".into()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        for i in 0..self.n_rows() {
            let mut rec = vec![
                self.periods[i].to_string(),
                self.release_dates[i].to_string(),
                self.forecast_dates[i].to_string(),
                self.y[i].to_string(),
            ];
            rec.extend(
                self.x[i].iter().zip(&self.mask[i]).map(|(v, m)| if *m { String::new() } else { v.to_string() }),
            );
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Mask sidecar: `period_end,<columns>` with 1 for masked cells.
    pub fn write_mask_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["period_end".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        for i in 0..self.n_rows() {
            let mut rec = vec![self.periods[i].to_string()];
            rec.extend(self.mask[i].iter().map(|m| if *m { "1" } else { "0" }.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}
