//! Sentiment dictionary keyed by lowercase lemma sequences.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Result, TextError};

/// Longest key, in lemmas, accepted by the loader.
pub const MAX_KEY_LEMMAS: usize = 4;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: HashMap<String, f64>,
    max_key_len: usize,
}

fn normalize(key: &str) -> String {
    key.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join(" ")
}

impl Lexicon {
    pub fn from_entries<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut lex = Self::default();
        for (i, (k, v)) in entries.into_iter().enumerate() {
            lex.insert(k.as_ref(), v, i + 1)?;
        }
        Ok(lex)
    }

    fn insert(&mut self, key: &str, score: f64, line: usize) -> Result<()> {
        let err = |message: String| TextError::Lexicon { line, message };
        let key = normalize(key);
        let len = key.split(' ').count();
        if key.is_empty() || len > MAX_KEY_LEMMAS {
            return Err(err(format!("key must have 1..={MAX_KEY_LEMMAS} lemmas")));
        }
        if !(-1.0..=1.0).contains(&score) {
            return Err(err(format!("score {score} outside [-1, 1]")));
        }
        if self.entries.insert(key.clone(), score).is_some() {
            return Err(err(format!("duplicate key {key:?}")));
        }
        self.max_key_len = self.max_key_len.max(len);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_key_len(&self) -> usize {
        self.max_key_len
    }

    /// Exact score of a (possibly multi-word) key.
    pub fn get(&self, key: &str) -> Option<f64> {
        self.entries.get(&normalize(key)).copied()
    }

    /// Longest entry matching a prefix of `lemmas`: (score, lemmas consumed).
    pub fn lookup<S: AsRef<str>>(&self, lemmas: &[S]) -> Option<(f64, usize)> {
        for len in (1..=self.max_key_len.min(lemmas.len())).rev() {
            let key = lemmas[..len].iter().map(|s| s.as_ref().to_lowercase()).collect::<Vec<_>>().join(" ");
            if let Some(&s) = self.entries.get(&key) {
                return Some((s, len));
            }
        }
        None
    }

    /// Entries sorted by key.
    pub fn entries(&self) -> Vec<(&str, f64)> {
        let mut v: Vec<(&str, f64)> = self.entries.iter().map(|(k, &s)| (k.as_str(), s)).collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn dump<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, s) in self.entries() {
            writeln!(out, "{k}\t{s}")?;
        }
        Ok(())
    }
}

/// Reads `key<TAB>score` lines; `#` starts a comment line.
pub fn load_lexicon<R: BufRead>(source: R) -> Result<Lexicon> {
    let mut lex = Lexicon::default();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, score) = line
            .split_once('\t')
            .ok_or_else(|| TextError::Lexicon { line: line_no, message: "expected key<TAB>score".into() })?;
        let score: f64 = score.trim().parse().map_err(|_| TextError::Lexicon {
            line: line_no,
            message: format!("non-numeric score {:?}", score.trim()),
        })?;
        lex.insert(key, score, line_no)?;
    }
    Ok(lex)
}

pub fn load_lexicon_str(text: &str) -> Result<Lexicon> {
    load_lexicon(text.as_bytes())
}
