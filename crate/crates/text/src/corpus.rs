//! Reader and writer for the 10-column parsed-news format.
//!
//! ```text
//! # doc_id = d1
//! # date = 2019-03-04
//! # outlet = Wire
//! # categories = economy, markets
//! # sent_id = d1-s1
//! 1	economy	economy	NOUN	NN	2	nsubj	_	_	_
//! 2	grew	grow	VERB	VBD	0	ROOT	_	_	_
//!
//! # end_doc
//! ```
//!
//! Entity labels come from the NERTAG column (IOB prefixes allowed); a
//! `NER=LABEL` item in MISC is used when that column is empty.

// The format is tab-separated, so the example above keeps literal tabs.
#![allow(clippy::tabs_in_doc_comments)]

use std::io::{BufRead, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TextError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedToken {
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    pub upos: String,
    pub xtag: String,
    pub head: usize,
    pub dep: String,
    pub feats: String,
    /// Raw NERTAG column, empty for `_`.
    pub ner_tag: String,
    pub misc: String,
}

impl ParsedToken {
    /// Entity label without IOB prefix, falling back to `NER=` in MISC.
    pub fn entity_label(&self) -> Option<&str> {
        let raw = if self.ner_tag.is_empty() {
            self.misc.split('|').find_map(|kv| kv.strip_prefix("NER="))?
        } else {
            self.ner_tag.as_str()
        };
        let label = raw.strip_prefix("B-").or_else(|| raw.strip_prefix("I-")).unwrap_or(raw);
        (!label.is_empty() && label != "O").then_some(label)
    }

    fn begins_entity(&self) -> bool {
        self.ner_tag.starts_with("B-")
    }

    pub fn lemma_lower(&self) -> String {
        self.lemma.to_lowercase()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedSentence {
    pub sentence_id: String,
    pub tokens: Vec<ParsedToken>,
}

impl ParsedSentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token by 1-based index.
    pub fn token(&self, index: usize) -> &ParsedToken {
        &self.tokens[index - 1]
    }

    /// Named entities as (label, surface text), merging consecutive tokens
    /// with the same label unless a `B-` tag starts a new one.
    pub fn entities(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut prev: Option<&str> = None;
        for t in &self.tokens {
            match t.entity_label() {
                Some(label) => {
                    if prev == Some(label) && !t.begins_entity() {
                        let last = out.last_mut().unwrap();
                        last.1.push(' ');
                        last.1.push_str(&t.surface);
                    } else {
                        out.push((label.to_string(), t.surface.clone()));
                    }
                    prev = Some(label);
                }
                None => prev = None,
            }
        }
        out
    }

    /// Checks the single-root, acyclic tree structure.
    pub fn validate(&self) -> Result<()> {
        let n = self.tokens.len();
        let bad = |message: String| TextError::BadTree { sentence_id: self.sentence_id.clone(), message };
        if n == 0 {
            return Ok(());
        }
        for t in &self.tokens {
            if t.head > n {
                return Err(bad(format!("token {} has head {} beyond length {}", t.index, t.head, n)));
            }
            if t.head == t.index {
                return Err(bad(format!("token {} is its own head", t.index)));
            }
        }
        let roots = self.tokens.iter().filter(|t| t.head == 0).count();
        if roots != 1 {
            return Err(bad(format!("{roots} roots")));
        }
        for t in &self.tokens {
            let mut cur = t.index;
            for _ in 0..=n {
                cur = self.token(cur).head;
                if cur == 0 {
                    break;
                }
            }
            if cur != 0 {
                return Err(bad(format!("cycle through token {}", t.index)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedDocument {
    pub doc_id: String,
    pub date: NaiveDate,
    pub outlet: String,
    pub categories: Vec<String>,
    pub sentences: Vec<ParsedSentence>,
}

/// Indices of all tokens whose head is `index`, in surface order.
pub fn dependency_children(sentence: &ParsedSentence, index: usize) -> Vec<usize> {
    sentence.tokens.iter().filter(|t| t.head == index).map(|t| t.index).collect()
}

fn field(s: &str) -> String {
    if s == "_" {
        String::new()
    } else {
        s.to_string()
    }
}

fn unfield(s: &str) -> &str {
    if s.is_empty() {
        "_"
    } else {
        s
    }
}

#[derive(Default)]
struct DocBuilder {
    doc_id: String,
    date: Option<String>,
    outlet: String,
    categories: Vec<String>,
    sentences: Vec<ParsedSentence>,
    pending_id: Option<String>,
    tokens: Vec<ParsedToken>,
}

impl DocBuilder {
    fn close_sentence(&mut self) -> Result<()> {
        if self.tokens.is_empty() {
            return Ok(());
        }
        let sentence_id =
            self.pending_id.take().unwrap_or_else(|| format!("{}-s{}", self.doc_id, self.sentences.len() + 1));
        let sentence = ParsedSentence { sentence_id, tokens: std::mem::take(&mut self.tokens) };
        sentence.validate()?;
        self.sentences.push(sentence);
        Ok(())
    }

    fn finish(mut self) -> Result<ParsedDocument> {
        self.close_sentence()?;
        let date = self
            .date
            .as_deref()
            .and_then(|d| NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d").ok())
            .ok_or_else(|| TextError::BadDate { doc_id: self.doc_id.clone() })?;
        Ok(ParsedDocument {
            doc_id: self.doc_id,
            date,
            outlet: self.outlet,
            categories: self.categories,
            sentences: self.sentences,
        })
    }
}

fn parse_token(line: &str, line_no: usize, expected_index: usize) -> Result<ParsedToken> {
    let cols: Vec<&str> = line.split('\t').collect();
    let malformed = |message: String| TextError::Malformed { line: line_no, message };
    if cols.len() != 10 {
        return Err(malformed(format!("expected 10 tab-separated columns, found {}", cols.len())));
    }
    let index: usize = cols[0].parse().map_err(|_| malformed(format!("bad token index {:?}", cols[0])))?;
    if index != expected_index {
        return Err(malformed(format!("token index {index}, expected {expected_index}")));
    }
    let head: usize = cols[5].parse().map_err(|_| malformed(format!("bad head {:?}", cols[5])))?;
    Ok(ParsedToken {
        index,
        surface: cols[1].to_string(),
        lemma: cols[2].to_string(),
        upos: cols[3].to_string(),
        xtag: cols[4].to_string(),
        head,
        dep: cols[6].to_string(),
        feats: field(cols[7]),
        ner_tag: field(cols[8]),
        misc: field(cols[9]),
    })
}

/// Parses every document in the stream, in order.
pub fn parse_corpus<R: BufRead>(source: R) -> Result<Vec<ParsedDocument>> {
    let mut docs = Vec::new();
    let mut current: Option<DocBuilder> = None;
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if comment == "end_doc" {
                if let Some(b) = current.take() {
                    docs.push(b.finish()?);
                }
                continue;
            }
            let Some((key, value)) = comment.split_once('=') else { continue };
            let (key, value) = (key.trim(), value.trim());
            if key == "doc_id" {
                if let Some(b) = current.take() {
                    docs.push(b.finish()?);
                }
                current = Some(DocBuilder { doc_id: value.to_string(), ..Default::default() });
                continue;
            }
            let b = current.as_mut().ok_or_else(|| TextError::Malformed {
                line: line_no,
                message: format!("metadata `{key}` before any `# doc_id`"),
            })?;
            match key {
                "date" => b.date = Some(value.to_string()),
                "outlet" => b.outlet = value.to_string(),
                "categories" => {
                    b.categories =
                        value.split([',', ';']).map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
                }
                "sent_id" => {
                    b.close_sentence()?;
                    b.pending_id = Some(value.to_string());
                }
                _ => {}
            }
        } else if line.trim().is_empty() {
            if let Some(b) = current.as_mut() {
                b.close_sentence()?;
            }
        } else {
            let b = current.as_mut().ok_or_else(|| TextError::Malformed {
                line: line_no,
                message: "token line outside a document".into(),
            })?;
            let tok = parse_token(line, line_no, b.tokens.len() + 1)?;
            b.tokens.push(tok);
        }
    }
    if let Some(b) = current.take() {
        docs.push(b.finish()?);
    }
    Ok(docs)
}

pub fn parse_corpus_str(text: &str) -> Result<Vec<ParsedDocument>> {
    parse_corpus(text.as_bytes())
}

/// Writes documents in the same format `parse_corpus` reads.
pub fn write_corpus<W: Write>(docs: &[ParsedDocument], mut out: W) -> Result<()> {
    for d in docs {
        writeln!(out, "# doc_id = {}", d.doc_id)?;
        writeln!(out, "# date = {}", d.date.format("%Y-%m-%d"))?;
        if !d.outlet.is_empty() {
            writeln!(out, "# outlet = {}", d.outlet)?;
        }
        if !d.categories.is_empty() {
            writeln!(out, "# categories = {}", d.categories.join(", "))?;
        }
        for s in &d.sentences {
            writeln!(out, "# sent_id = {}", s.sentence_id)?;
            for t in &s.tokens {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    t.index,
                    t.surface,
                    t.lemma,
                    t.upos,
                    t.xtag,
                    t.head,
                    t.dep,
                    unfield(&t.feats),
                    unfield(&t.ner_tag),
                    unfield(&t.misc)
                )?;
            }
            writeln!(out)?;
        }
        writeln!(out, "# end_doc")?;
    }
    Ok(())
}
