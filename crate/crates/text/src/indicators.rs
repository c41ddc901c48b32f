//! Daily sentiment indicators, trailing smoothing and period resampling.

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::calendar::{period_end, Frequency};
use crate::engine::{ChunkScore, Tense};
use crate::error::{Result, TextError};

pub const DEFAULT_SMOOTHING: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentSeries {
    pub topic: String,
    /// `None` aggregates all tenses.
    pub tense: Option<Tense>,
    pub frequency: Frequency,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
    pub smoothing_window: Option<usize>,
}

impl SentimentSeries {
    pub fn new(topic: &str, tense: Option<Tense>, frequency: Frequency) -> Self {
        Self {
            topic: topic.to_string(),
            tense,
            frequency,
            dates: Vec::new(),
            values: Vec::new(),
            smoothing_window: None,
        }
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn tense_label(&self) -> &'static str {
        self.tense.map_or("all", |t| t.as_str())
    }

    /// Column name used when the series enters a design matrix.
    pub fn name(&self) -> String {
        format!("{}_{}", self.topic, self.tense_label())
    }

    pub fn value_at(&self, date: NaiveDate) -> Option<f64> {
        self.dates.binary_search(&date).ok().map(|i| self.values[i])
    }

    /// Latest observation dated on or before `date`.
    pub fn last_on_or_before(&self, date: NaiveDate) -> Option<(NaiveDate, f64)> {
        let i = self.dates.partition_point(|d| *d <= date);
        (i > 0).then(|| (self.dates[i - 1], self.values[i - 1]))
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.dates.iter().copied().zip(self.values.iter().copied())
    }
}

/// Sums chunk scores per day for one topic, zero-filling days without chunks.
pub fn aggregate_daily<'a, I>(chunks: I, topic: &str, tense: Option<Tense>) -> SentimentSeries
where
    I: IntoIterator<Item = &'a ChunkScore>,
{
    let mut out = SentimentSeries::new(topic, tense, Frequency::Daily);
    let mut sums: std::collections::BTreeMap<NaiveDate, f64> = Default::default();
    for c in chunks {
        if c.topic == topic && tense.is_none_or(|t| t == c.tense) {
            *sums.entry(c.date).or_default() += c.score;
        }
    }
    let (Some(&first), Some(&last)) = (sums.keys().next(), sums.keys().next_back()) else {
        return out;
    };
    let mut d = first;
    while d <= last {
        out.dates.push(d);
        out.values.push(sums.get(&d).copied().unwrap_or(0.0));
        d += Duration::days(1);
    }
    out
}

/// Trailing moving average over `window` days; the head uses the days available.
pub fn smooth(series: &SentimentSeries, window: usize) -> Result<SentimentSeries> {
    if window < 1 {
        return Err(TextError::InvalidArgument("smoothing window must be at least 1".into()));
    }
    if series.frequency != Frequency::Daily {
        return Err(TextError::InvalidArgument("smoothing applies to daily series".into()));
    }
    let mut out = series.clone();
    for i in 0..series.values.len() {
        let lo = (i + 1).saturating_sub(window);
        let w = &series.values[lo..=i];
        out.values[i] = w.iter().sum::<f64>() / w.len() as f64;
    }
    out.smoothing_window = Some(window);
    Ok(out)
}

/// Mean of the daily values in each period, stamped at the period end.
pub fn resample(series: &SentimentSeries, frequency: Frequency) -> SentimentSeries {
    let mut out = series.clone();
    out.frequency = frequency;
    out.dates.clear();
    out.values.clear();
    let mut sum = 0.0;
    let mut count = 0usize;
    for (d, v) in series.iter() {
        let end = period_end(d, frequency);
        if out.dates.last() != Some(&end) {
            if count > 0 {
                out.values.push(sum / count as f64);
            }
            out.dates.push(end);
            sum = 0.0;
            count = 0;
        }
        sum += v;
        count += 1;
    }
    if count > 0 {
        out.values.push(sum / count as f64);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn chunk(date: NaiveDate, score: f64) -> ChunkScore {
        ChunkScore {
            date,
            doc_id: "x".into(),
            sentence_id: "x-s1".into(),
            topic: "economy".into(),
            tense: Tense::Present,
            score,
        }
    }

    fn daily(values: &[f64]) -> SentimentSeries {
        let mut s = SentimentSeries::new("economy", None, Frequency::Daily);
        for (i, v) in values.iter().enumerate() {
            s.dates.push(d(2020, 1, 1) + Duration::days(i as i64));
            s.values.push(*v);
        }
        s
    }

    #[test]
    fn daily_sum_and_zero_fill() {
        let chunks = [chunk(d(2020, 1, 1), 0.5), chunk(d(2020, 1, 1), -0.125), chunk(d(2020, 1, 4), 0.2)];
        let s = aggregate_daily(&chunks, "economy", None);
        assert_eq!(s.values, vec![0.375, 0.0, 0.0, 0.2]);
        assert_eq!(s.dates.len(), 4);
        assert!(aggregate_daily(&[], "economy", None).is_empty());
        assert!(aggregate_daily(&chunks, "economy", Some(Tense::Past)).is_empty());
    }

    #[test]
    fn smoothing_examples() {
        let s = smooth(&daily(&[0.0, 0.0, 3.0]), 3).unwrap();
        assert_eq!(s.values[2], 1.0);
        let raw = daily(&[1.0, -2.0, 0.5]);
        assert_eq!(smooth(&raw, 1).unwrap().values, raw.values);
        assert!(smooth(&raw, 0).is_err());
    }

    #[test]
    fn monthly_mean() {
        let s = daily(&(1..=31).map(f64::from).collect::<Vec<_>>());
        let m = resample(&s, Frequency::Monthly);
        assert_eq!(m.dates, vec![d(2020, 1, 31)]);
        assert_eq!(m.values, vec![16.0]);
    }
}
