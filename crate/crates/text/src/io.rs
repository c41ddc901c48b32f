//! CSV exchange formats for chunk scores and indicator series.
//!
//! Readers skip lines starting with `#`, so files may carry a provenance header.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::calendar::{period_end, Frequency};
use crate::engine::{ChunkScore, Tense};
use crate::error::{Result, TextError};
use crate::indicators::SentimentSeries;

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(source)
}

pub fn write_chunks<W: Write>(chunks: &[ChunkScore], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in chunks {
        w.serialize(c)?;
    }
    if chunks.is_empty() {
        w.write_record(["date", "doc_id", "sentence_id", "topic", "tense", "score"])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_chunks<R: Read>(source: R) -> Result<Vec<ChunkScore>> {
    reader(source).deserialize().map(|r| r.map_err(TextError::from)).collect()
}

#[derive(Serialize, Deserialize)]
struct SeriesRow {
    date: NaiveDate,
    topic: String,
    tense: String,
    value: f64,
}

pub fn write_series<W: Write>(series: &[SentimentSeries], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "topic", "tense", "value"])?;
    for s in series {
        for (d, v) in s.iter() {
            w.write_record([d.to_string(), s.topic.clone(), s.tense_label().to_string(), v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Single observations read back as daily.
fn infer_frequency(dates: &[NaiveDate]) -> Frequency {
    let consecutive = dates.windows(2).all(|w| (w[1] - w[0]).num_days() == 1);
    if consecutive {
        return Frequency::Daily;
    }
    [Frequency::Quarterly, Frequency::Monthly, Frequency::Weekly]
        .into_iter()
        .find(|&f| dates.iter().all(|&d| period_end(d, f) == d))
        .unwrap_or(Frequency::Daily)
}

/// Reads series grouped by (topic, tense), in first-appearance order.
pub fn read_series<R: Read>(source: R) -> Result<Vec<SentimentSeries>> {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut rows: BTreeMap<(String, String), Vec<(NaiveDate, f64)>> = BTreeMap::new();
    for row in reader(source).deserialize::<SeriesRow>() {
        let row = row?;
        let key = (row.topic, row.tense);
        if !rows.contains_key(&key) {
            order.push(key.clone());
        }
        rows.entry(key).or_default().push((row.date, row.value));
    }
    order
        .into_iter()
        .map(|key| {
            let mut obs = rows.remove(&key).unwrap();
            obs.sort_by_key(|o| o.0);
            if obs.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(TextError::InvalidArgument(format!("duplicate date in series {}/{}", key.0, key.1)));
            }
            let tense = match key.1.as_str() {
                "all" => None,
                t => Some(Tense::parse(t).ok_or_else(|| TextError::InvalidArgument(format!("unknown tense {t}")))?),
            };
            let dates: Vec<NaiveDate> = obs.iter().map(|o| o.0).collect();
            let mut s = SentimentSeries::new(&key.0, tense, infer_frequency(&dates));
            s.values = obs.iter().map(|o| o.1).collect();
            s.dates = dates;
            Ok(s)
        })
        .collect()
}
