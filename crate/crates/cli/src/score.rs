//! `score` and `aggregate`: parsed corpus to chunk scores to daily indicators.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use figas_text::{
    aggregate_daily, default_topics, io as tio, load_lexicon, parse_corpus, parse_topics, resample, score_corpus,
    smooth, ChunkScore, Frequency, SentimentSeries, Tense, TopicSpec,
};

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::output::create;

pub fn load_topics(cfg: &Config) -> Result<Vec<TopicSpec>> {
    if cfg.topics.is_empty() {
        return Ok(default_topics());
    }
    let path = cfg.input("topics", &cfg.topics)?;
    let text = std::fs::read_to_string(&path)?;
    parse_topics(&text).map_err(|e| CliError::data(path.display(), e))
}

/// Daily sums per topic: all chunks, then past, present and future. Empty series are skipped.
pub fn daily_series(chunks: &[ChunkScore], topics: &[TopicSpec]) -> Vec<SentimentSeries> {
    let tenses = [None, Some(Tense::Past), Some(Tense::Present), Some(Tense::Future)];
    topics
        .iter()
        .flat_map(|t| tenses.iter().map(move |&tense| aggregate_daily(chunks, &t.name, tense)))
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn smooth_all(series: &[SentimentSeries], window: usize) -> Result<Vec<SentimentSeries>> {
    series.iter().map(|s| smooth(s, window).map_err(CliError::from)).collect()
}

fn write_series_file(cfg: &Config, dir: &Path, name: &str, series: &[SentimentSeries]) -> Result<()> {
    let (_, mut w) = create(cfg, dir, name)?;
    tio::write_series(series, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Writes `chunks.csv`, `series_daily.csv` and `series_smoothed.csv`.
pub fn cmd_score(cfg: &Config) -> Result<Vec<ChunkScore>> {
    let corpus_path = cfg.input("corpus", &cfg.corpus)?;
    let lexicon_path = cfg.input("lexicon", &cfg.lexicon)?;
    let topics = load_topics(cfg)?;
    let lex = load_lexicon(BufReader::new(File::open(&lexicon_path)?))
        .map_err(|e| CliError::data(lexicon_path.display(), e))?;
    let docs = parse_corpus(BufReader::new(File::open(&corpus_path)?))
        .map_err(|e| CliError::data(corpus_path.display(), e))?;
    let chunks = score_corpus(&docs, &topics, &lex, &cfg.location_policy());

    let dir = cfg.out_dir();
    let (_, mut w) = create(cfg, &dir, "chunks.csv")?;
    tio::write_chunks(&chunks, &mut w)?;
    w.flush()?;
    let daily = daily_series(&chunks, &topics);
    write_series_file(cfg, &dir, "series_daily.csv", &daily)?;
    write_series_file(cfg, &dir, "series_smoothed.csv", &smooth_all(&daily, cfg.smoothing)?)?;
    Ok(chunks)
}

pub fn read_series_file(path: &Path) -> Result<Vec<SentimentSeries>> {
    if !path.is_file() {
        return Err(CliError::Config(format!("series file {} does not exist", path.display())));
    }
    tio::read_series(File::open(path)?).map_err(|e| CliError::data(path.display(), e))
}

/// Re-smooths `series_daily.csv` and writes the smoothed daily and monthly files.
pub fn cmd_aggregate(cfg: &Config) -> Result<()> {
    let dir = cfg.out_dir();
    let mut daily = read_series_file(&dir.join("series_daily.csv"))?;
    // A file with a single date per series reads back as daily already; force it.
    for s in &mut daily {
        s.frequency = Frequency::Daily;
    }
    let smoothed = smooth_all(&daily, cfg.smoothing)?;
    write_series_file(cfg, &dir, "series_smoothed.csv", &smoothed)?;
    let monthly: Vec<SentimentSeries> = smoothed.iter().map(|s| resample(s, Frequency::Monthly)).collect();
    write_series_file(cfg, &dir, "series_monthly.csv", &monthly)?;
    Ok(())
}

/// Smoothed daily series selected by `cfg.sentiments` (default: every `*_all`).
pub fn load_sentiments(cfg: &Config) -> Result<Vec<SentimentSeries>> {
    let mut all = read_series_file(&cfg.series_path())?;
    for s in &mut all {
        s.frequency = Frequency::Daily;
    }
    if cfg.sentiments.is_empty() {
        return Ok(all.into_iter().filter(|s| s.tense.is_none()).collect());
    }
    cfg.sentiments
        .iter()
        .map(|name| {
            all.iter().find(|s| &s.name() == name).cloned().ok_or_else(|| {
                CliError::Config(format!("sentiment {name} not found in {}", cfg.series_path().display()))
            })
        })
        .collect()
}
