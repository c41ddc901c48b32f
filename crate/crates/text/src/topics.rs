//! Topic definitions: a name plus the lemma sequences that mark it.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TextError};

const DEFAULT_TOPICS: &str = include_str!("../data/topics.toml");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicSpec {
    pub name: String,
    /// Each ToI as lowercase lemmas.
    pub tois: Vec<Vec<String>>,
}

impl TopicSpec {
    pub fn new<S: AsRef<str>>(name: &str, tois: &[S]) -> Result<Self> {
        let tois: Vec<Vec<String>> =
            tois.iter().map(|t| t.as_ref().split_whitespace().map(str::to_lowercase).collect::<Vec<_>>()).collect();
        if tois.is_empty() || tois.iter().any(|t| t.is_empty() || t.len() > 4) {
            return Err(TextError::Topics(format!(
                "topic {name}: every ToI needs 1..=4 lemmas and the list must be non-empty"
            )));
        }
        Ok(Self { name: name.to_string(), tois })
    }

    pub fn max_toi_len(&self) -> usize {
        self.tois.iter().map(Vec::len).max().unwrap_or(0)
    }
}

#[derive(Deserialize)]
struct TopicFile {
    topic: Vec<RawTopic>,
}

#[derive(Deserialize)]
struct RawTopic {
    name: String,
    tois: Vec<String>,
}

/// Parses a TOML file of `[[topic]]` tables with `name` and `tois`.
pub fn parse_topics(text: &str) -> Result<Vec<TopicSpec>> {
    let file: TopicFile = toml::from_str(text).map_err(|e| TextError::Topics(e.to_string()))?;
    let mut out: Vec<TopicSpec> = Vec::new();
    for t in file.topic {
        if out.iter().any(|o| o.name == t.name) {
            return Err(TextError::Topics(format!("duplicate topic {}", t.name)));
        }
        out.push(TopicSpec::new(&t.name, &t.tois)?);
    }
    Ok(out)
}

/// The six default topics: economy, financial sector, inflation, manufacturing, monetary policy, unemployment.
pub fn default_topics() -> Vec<TopicSpec> {
    parse_topics(DEFAULT_TOPICS).expect("bundled topics file is valid")
}
