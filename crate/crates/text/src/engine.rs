//! FiGAS scoring: ToI matching, location filter, tense, dependency rules,
//! negation and polarity propagation.

use std::collections::{BTreeSet, HashSet, VecDeque};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{dependency_children, ParsedDocument, ParsedSentence, ParsedToken};
use crate::lexicon::Lexicon;
use crate::topics::TopicSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tense {
    Past,
    Present,
    Future,
    Nan,
}

impl Tense {
    pub const ALL: [Tense; 4] = [Tense::Past, Tense::Present, Tense::Future, Tense::Nan];

    pub fn as_str(&self) -> &'static str {
        match self {
            Tense::Past => "past",
            Tense::Present => "present",
            Tense::Future => "future",
            Tense::Nan => "nan",
        }
    }

    pub fn parse(s: &str) -> Option<Tense> {
        Tense::ALL.into_iter().find(|t| t.as_str() == s.trim().to_ascii_lowercase())
    }

    /// Tense carried by a fine tag; `None` for tags that mark no tense.
    pub fn from_xtag(xtag: &str) -> Option<Tense> {
        match xtag {
            "VBD" | "VBN" => Some(Tense::Past),
            "VBP" | "VBZ" | "VBG" => Some(Tense::Present),
            "MD" => Some(Tense::Future),
            _ => None,
        }
    }
}

impl std::fmt::Display for Tense {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A ToI occurrence: 1-based start index and length in tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToiMatch {
    pub start: usize,
    pub len: usize,
}

impl ToiMatch {
    pub fn contains(&self, index: usize) -> bool {
        index >= self.start && index < self.start + self.len
    }

    pub fn lemmas(&self, sentence: &ParsedSentence) -> Vec<String> {
        (self.start..self.start + self.len).map(|i| sentence.token(i).lemma_lower()).collect()
    }
}

pub const ENTITY_LABELS: [&str; 4] = ["GPE", "NORP", "LOC", "ORG"];

pub const US_WHITELIST: [&str; 30] = [
    "America",
    "United States",
    "Columbia",
    "land of liberty",
    "new world",
    "U.S.",
    "U.S.A.",
    "USA",
    "US",
    "land of opportunity",
    "the states",
    "Fed",
    "Federal Reserve Board",
    "Federal Reserve",
    "Census Bureau",
    "Bureau of Economic Analysis",
    "Treasury Department",
    "Department of Commerce",
    "Bureau of Labor Statistics",
    "Bureau of Labour",
    "Department of Labor",
    "Open Market Committee",
    "BEA",
    "BIS",
    "Bureau of Statistics",
    "Board of Governors",
    "Congressional Budget Office",
    "CBO",
    "Internal Revenue Service",
    "IRS",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocationPolicy {
    allowed: HashSet<String>,
    pub keep_unlocated: bool,
}

impl Default for LocationPolicy {
    fn default() -> Self {
        Self::new(US_WHITELIST, true)
    }
}

impl LocationPolicy {
    pub fn new<I, S>(allowed: I, keep_unlocated: bool) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let allowed = allowed.into_iter().map(|s| s.as_ref().to_lowercase()).collect();
        Self { allowed, keep_unlocated }
    }

    /// Accepts every location, located or not.
    pub fn permissive() -> Self {
        Self { allowed: HashSet::new(), keep_unlocated: true }
    }

    pub fn allows(&self, location: Option<&str>) -> bool {
        match location {
            None => self.keep_unlocated,
            Some(_) if self.allowed.is_empty() => true,
            Some(loc) => self.allowed.contains(&loc.to_lowercase()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkScore {
    pub date: NaiveDate,
    pub doc_id: String,
    pub sentence_id: String,
    pub topic: String,
    pub tense: Tense,
    pub score: f64,
}

/// Longest-match, non-overlapping ToI occurrences in surface order.
pub fn match_tois(sentence: &ParsedSentence, topic: &TopicSpec) -> Vec<ToiMatch> {
    let lemmas: Vec<String> = sentence.tokens.iter().map(ParsedToken::lemma_lower).collect();
    let max = topic.max_toi_len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < lemmas.len() {
        let best = (1..=max.min(lemmas.len() - i))
            .rev()
            .find(|&len| topic.tois.iter().any(|t| t.as_slice() == &lemmas[i..i + len]));
        match best {
            Some(len) => {
                out.push(ToiMatch { start: i + 1, len });
                i += len;
            }
            None => i += 1,
        }
    }
    out
}

fn modal_entity(entities: impl IntoIterator<Item = (String, String)>) -> Option<String> {
    let mut counts: Vec<(String, usize)> = Vec::new();
    for (label, surface) in entities {
        if !ENTITY_LABELS.contains(&label.as_str()) {
            continue;
        }
        match counts.iter_mut().find(|(s, _)| *s == surface) {
            Some(c) => c.1 += 1,
            None => counts.push((surface, 1)),
        }
    }
    // max_by_key keeps the last maximum, so scan in reverse to favour the first.
    counts.into_iter().rev().max_by_key(|c| c.1).map(|c| c.0)
}

/// Most frequent location entity in the sentence, else in the document.
pub fn detect_location(doc: &ParsedDocument, sentence: &ParsedSentence) -> Option<String> {
    modal_entity(sentence.entities()).or_else(|| modal_entity(doc.sentences.iter().flat_map(ParsedSentence::entities)))
}

/// Distance-weighted vote over verb tenses; `Nan` when no verb carries a tense.
pub fn detect_tense(sentence: &ParsedSentence, toi_index: usize) -> Tense {
    let order = [Tense::Past, Tense::Present, Tense::Future];
    let mut weight = [0.0_f64; 3];
    let mut verbs: Vec<(usize, Tense)> = Vec::new();
    for t in &sentence.tokens {
        if t.upos != "VERB" && t.upos != "AUX" {
            continue;
        }
        if let Some(tense) = Tense::from_xtag(&t.xtag) {
            let d = t.index.abs_diff(toi_index);
            weight[tense as usize] += 1.0 / (1.0 + d as f64);
            verbs.push((d, tense));
        }
    }
    if verbs.is_empty() {
        return Tense::Nan;
    }
    let best = weight.iter().cloned().fold(f64::MIN, f64::max);
    let tied: Vec<Tense> = order.into_iter().filter(|t| weight[*t as usize] == best).collect();
    if tied.len() == 1 {
        return tied[0];
    }
    let closest = verbs.iter().filter(|(_, t)| tied.contains(t)).map(|(d, _)| *d).min().unwrap();
    // Equidistant verbs of different tenses fall through to past > present > future.
    order.into_iter().find(|t| tied.contains(t) && verbs.iter().any(|(d, v)| *d == closest && v == t)).unwrap()
}

/// Terms found by the rules for one ToI occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleOutcome {
    /// The span token whose head lies outside the span.
    pub toi_head: usize,
    /// Every term reached, including zero-score ones, ordered by tree
    /// distance from the ToI head and then by index.
    pub all_terms: Vec<usize>,
    /// Nonzero-score terms in the same order.
    pub terms: Vec<(usize, f64)>,
    /// Tokens a negation may attach to: the span, the terms and every
    /// intermediate node (governing verb, prepositions, objects).
    pub chain: BTreeSet<usize>,
}

/// Span token whose head is outside the span (rightmost if several).
pub fn span_head(sentence: &ParsedSentence, toi: ToiMatch) -> usize {
    (toi.start..toi.start + toi.len)
        .rev()
        .find(|&i| !toi.contains(sentence.token(i).head))
        .unwrap_or(toi.start + toi.len - 1)
}

fn is_adj(t: &ParsedToken) -> bool {
    t.upos == "ADJ" && matches!(t.xtag.as_str(), "JJ" | "JJR" | "JJS")
}

fn is_jj(t: &ParsedToken) -> bool {
    matches!(t.xtag.as_str(), "JJ" | "JJR" | "JJS")
}

fn is_comparative_adv(t: &ParsedToken) -> bool {
    matches!(t.xtag.as_str(), "RBR" | "RBS")
}

fn is_noun(t: &ParsedToken) -> bool {
    t.upos == "NOUN" || t.upos == "PROPN"
}

/// Undirected distances in the dependency tree from `from`.
pub fn tree_distances(sentence: &ParsedSentence, from: usize) -> Vec<usize> {
    let n = sentence.len();
    let mut adj = vec![Vec::new(); n + 1];
    for t in &sentence.tokens {
        if t.head != 0 {
            adj[t.index].push(t.head);
            adj[t.head].push(t.index);
        }
    }
    let mut dist = vec![usize::MAX; n + 1];
    dist[from] = 0;
    let mut q = VecDeque::from([from]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    dist
}

/// Walks the eight dependency patterns from the ToI head.
pub fn apply_rules(sentence: &ParsedSentence, toi: ToiMatch, lex: &Lexicon) -> RuleOutcome {
    let t_idx = span_head(sentence, toi);
    let tok = |i: usize| sentence.token(i);
    let kids = |i: usize| dependency_children(sentence, i);
    let mut found: Vec<usize> = Vec::new();
    let mut chain: BTreeSet<usize> = (toi.start..toi.start + toi.len).collect();

    let amod_of = |n: usize, out: &mut Vec<usize>| {
        for c in kids(n) {
            let ct = tok(c);
            if ct.dep == "amod" && (is_adj(ct) || ct.upos == "VERB") {
                out.push(c);
            }
        }
    };

    // Rules 1 and 8: modifiers of the ToI itself.
    amod_of(t_idx, &mut found);
    found.extend(kids(t_idx).into_iter().filter(|&c| tok(c).dep == "acl"));

    let t = tok(t_idx);
    if t.head != 0 && matches!(tok(t.head).upos.as_str(), "VERB" | "AUX") {
        let v = t.head;
        found.push(v);
        for c in kids(v) {
            let ct = tok(c);
            match ct.dep.as_str() {
                "xcomp" | "advcl" if ct.upos == "VERB" => found.push(c),
                "acomp" | "oprd" if is_jj(ct) => {
                    found.push(c);
                    found.extend(kids(c).into_iter().filter(|&a| tok(a).dep == "advmod" && is_comparative_adv(tok(a))));
                }
                "advmod" if is_comparative_adv(ct) => found.push(c),
                "dobj" | "attr" if is_noun(ct) => {
                    found.push(c);
                    amod_of(c, &mut found);
                }
                "prep" => {
                    let before = found.len();
                    for g in kids(c) {
                        let gt = tok(g);
                        if gt.dep == "pobj" && is_noun(gt) {
                            found.push(g);
                            amod_of(g, &mut found);
                        } else if gt.dep == "pcomp" && gt.upos == "VERB" {
                            found.push(g);
                        }
                    }
                    if found.len() > before {
                        chain.insert(c);
                    }
                }
                _ => {}
            }
        }
    }

    // Rule 7 seen from the object: "rise in money supply".
    if t.dep == "pobj" && t.head != 0 {
        let p = tok(t.head);
        if p.dep == "prep" && p.head != 0 {
            found.push(p.head);
            chain.insert(t.head);
        }
    }

    let dist = tree_distances(sentence, t_idx);
    let mut all_terms: Vec<usize> = found
        .into_iter()
        .filter(|&i| !toi.contains(i) && tok(i).dep != "neg")
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    all_terms.sort_by_key(|&i| (dist[i], i));
    chain.extend(all_terms.iter().copied());

    let terms = all_terms
        .iter()
        .filter_map(|&i| {
            let s = lex.get(&tok(i).lemma).unwrap_or(0.0);
            (s != 0.0).then_some((i, s))
        })
        .collect();
    RuleOutcome { toi_head: t_idx, all_terms, terms, chain }
}

/// True when some `neg` dependent hangs off the rule chain.
pub fn is_negated(sentence: &ParsedSentence, chain: &BTreeSet<usize>) -> bool {
    sentence.tokens.iter().any(|t| t.dep == "neg" && chain.contains(&t.head))
}

/// `s1 + s1 * sum(rest)`, clamped, then flipped for a negative ToI and for negation.
pub fn propagate(term_scores: &[f64], toi_score: f64, negated: bool) -> f64 {
    let Some((&s1, rest)) = term_scores.split_first() else {
        return 0.0;
    };
    let mut s = (s1 + s1 * rest.iter().sum::<f64>()).clamp(-1.0, 1.0);
    if toi_score < 0.0 {
        s = -s;
    }
    if negated {
        s = -s;
    }
    // Avoid printing -0.
    s + 0.0
}

/// Score of one ToI occurrence.
pub fn score_match(sentence: &ParsedSentence, toi: ToiMatch, lex: &Lexicon) -> f64 {
    let outcome = apply_rules(sentence, toi, lex);
    let scores: Vec<f64> = outcome.terms.iter().map(|t| t.1).collect();
    let toi_score = lex.get(&toi.lemmas(sentence).join(" ")).unwrap_or(0.0);
    propagate(&scores, toi_score, is_negated(sentence, &outcome.chain))
}

pub fn score_sentence(
    doc: &ParsedDocument,
    sentence: &ParsedSentence,
    topic: &TopicSpec,
    lex: &Lexicon,
    policy: &LocationPolicy,
) -> Option<ChunkScore> {
    let matches = match_tois(sentence, topic);
    let first = *matches.first()?;
    if !policy.allows(detect_location(doc, sentence).as_deref()) {
        return None;
    }
    let total: f64 = matches.iter().map(|&m| score_match(sentence, m, lex)).sum();
    Some(ChunkScore {
        date: doc.date,
        doc_id: doc.doc_id.clone(),
        sentence_id: sentence.sentence_id.clone(),
        topic: topic.name.clone(),
        tense: detect_tense(sentence, span_head(sentence, first)),
        score: total / matches.len() as f64 + 0.0,
    })
}

/// Scores every sentence for every topic, in document, sentence, topic order.
pub fn score_corpus(
    docs: &[ParsedDocument],
    topics: &[TopicSpec],
    lex: &Lexicon,
    policy: &LocationPolicy,
) -> Vec<ChunkScore> {
    docs.par_iter()
        .flat_map_iter(|doc| {
            doc.sentences
                .iter()
                .flat_map(move |s| topics.iter().filter_map(move |t| score_sentence(doc, s, t, lex, policy)))
        })
        .collect()
}
