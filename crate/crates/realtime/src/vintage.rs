//! Release-dated observations and as-of queries.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::NaiveDate;
use figas_text::calendar::{period_end, period_start, Frequency};
use serde::{Deserialize, Serialize};

use crate::error::{RealtimeError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Release {
    pub variable: String,
    pub ref_period_end: NaiveDate,
    pub frequency: Frequency,
    pub release_date: NaiveDate,
    pub value: f64,
}

#[derive(Debug, Clone, Default)]
struct Series {
    frequency: Option<Frequency>,
    /// Period end → vintages sorted by release date.
    periods: BTreeMap<NaiveDate, Vec<(NaiveDate, f64)>>,
}

/// All vintages of all variables. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct VintageStore {
    series: BTreeMap<String, Series>,
}

impl VintageStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a release; weekly, monthly and quarterly reference dates are
    /// moved to the end of the period that contains them.
    pub fn insert(&mut self, r: Release) -> Result<()> {
        let end = period_end(r.ref_period_end, r.frequency);
        if r.release_date < period_start(end, r.frequency) {
            return Err(RealtimeError::Vintage(format!(
                "{} {}: release {} precedes the reference period",
                r.variable, end, r.release_date
            )));
        }
        if !r.value.is_finite() {
            return Err(RealtimeError::Vintage(format!("{} {}: non-finite value", r.variable, end)));
        }
        let s = self.series.entry(r.variable.clone()).or_default();
        match s.frequency {
            Some(f) if f != r.frequency => {
                return Err(RealtimeError::Vintage(format!(
                    "{}: mixed frequencies {} and {}",
                    r.variable,
                    f.as_str(),
                    r.frequency.as_str()
                )))
            }
            _ => s.frequency = Some(r.frequency),
        }
        let v = s.periods.entry(end).or_default();
        let pos = v.partition_point(|(d, _)| *d < r.release_date);
        if v.get(pos).is_some_and(|(d, _)| *d == r.release_date) {
            return Err(RealtimeError::Vintage(format!(
                "{} {}: two vintages released on {}",
                r.variable, end, r.release_date
            )));
        }
        v.insert(pos, (r.release_date, r.value));
        Ok(())
    }

    pub fn from_releases<I: IntoIterator<Item = Release>>(releases: I) -> Result<Self> {
        let mut store = Self::new();
        for r in releases {
            store.insert(r)?;
        }
        Ok(store)
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(String::as_str)
    }

    pub fn frequency(&self, variable: &str) -> Option<Frequency> {
        self.series.get(variable).and_then(|s| s.frequency)
    }

    /// Reference period ends with at least one release, ascending.
    pub fn periods(&self, variable: &str) -> Vec<NaiveDate> {
        self.series.get(variable).map(|s| s.periods.keys().copied().collect()).unwrap_or_default()
    }

    pub fn has_period(&self, variable: &str, period: NaiveDate) -> bool {
        self.series.get(variable).is_some_and(|s| s.periods.contains_key(&period))
    }

    pub fn vintages(&self, variable: &str, period: NaiveDate) -> &[(NaiveDate, f64)] {
        self.series.get(variable).and_then(|s| s.periods.get(&period)).map_or(&[], Vec::as_slice)
    }

    /// `k`-th release (0 = first) as (release date, value).
    pub fn nth_release(&self, variable: &str, period: NaiveDate, k: usize) -> Option<(NaiveDate, f64)> {
        self.vintages(variable, period).get(k).copied()
    }

    /// Latest vintage released on or before `as_of`, as (release date, value).
    pub fn value_as_of(&self, variable: &str, period: NaiveDate, as_of: NaiveDate) -> Option<(NaiveDate, f64)> {
        let v = self.vintages(variable, period);
        let i = v.partition_point(|(d, _)| *d <= as_of);
        (i > 0).then(|| v[i - 1])
    }

    pub fn releases(&self) -> Vec<Release> {
        let mut out = Vec::new();
        for (name, s) in &self.series {
            for (end, vs) in &s.periods {
                for &(d, value) in vs {
                    out.push(Release {
                        variable: name.clone(),
                        ref_period_end: *end,
                        frequency: s.frequency.unwrap_or(Frequency::Daily),
                        release_date: d,
                        value,
                    });
                }
            }
        }
        out
    }
}

/// Latest value per (variable, period) known on `as_of`, with its release date.
pub fn information_set(store: &VintageStore, as_of: NaiveDate) -> BTreeMap<(String, NaiveDate), (NaiveDate, f64)> {
    let mut out = BTreeMap::new();
    for var in store.variables() {
        for p in store.periods(var) {
            if let Some(v) = store.value_as_of(var, p, as_of) {
                out.insert((var.to_string(), p), v);
            }
        }
    }
    out
}

#[derive(Deserialize)]
struct Row {
    variable: String,
    ref_period_end: String,
    frequency: String,
    release_date: String,
    value: String,
}

fn date(s: &str, line: usize, what: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .map_err(|_| RealtimeError::Malformed { line, message: format!("bad {what} {s:?}") })
}

/// Reads `variable,ref_period_end,frequency,release_date,value`; `#` lines are skipped.
pub fn read_vintages<R: Read>(source: R) -> Result<VintageStore> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(source);
    let mut store = VintageStore::new();
    let headers = rdr.headers()?.clone();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let row: Row =
            rec.deserialize(Some(&headers)).map_err(|e| RealtimeError::Malformed { line, message: e.to_string() })?;
        let frequency = Frequency::parse(&row.frequency).ok_or_else(|| RealtimeError::Malformed {
            line,
            message: format!("unknown frequency {:?}", row.frequency),
        })?;
        let value: f64 = row
            .value
            .parse()
            .map_err(|_| RealtimeError::Malformed { line, message: format!("bad value {:?}", row.value) })?;
        store.insert(Release {
            variable: row.variable,
            ref_period_end: date(&row.ref_period_end, line, "ref_period_end")?,
            frequency,
            release_date: date(&row.release_date, line, "release_date")?,
            value,
        })?;
    }
    Ok(store)
}

pub fn write_vintages<W: Write>(store: &VintageStore, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["variable", "ref_period_end", "frequency", "release_date", "value"])?;
    for r in store.releases() {
        w.write_record([
            r.variable,
            r.ref_period_end.to_string(),
            r.frequency.as_str().to_string(),
            r.release_date.to_string(),
            r.value.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
