//! Random dependency trees and a brute-force rule enumerator used as an
//! oracle for the rule engine.
#![allow(dead_code)]

use figas_text::{Lexicon, ParsedSentence, ParsedToken, ToiMatch, TopicSpec};
use rand::seq::IndexedRandom;
use rand::Rng;

pub const TAGS: &[(&str, &str)] = &[
    ("NOUN", "NN"),
    ("NOUN", "NNS"),
    ("PROPN", "NNP"),
    ("VERB", "VBD"),
    ("VERB", "VBZ"),
    ("VERB", "VBN"),
    ("VERB", "VBG"),
    ("VERB", "VB"),
    ("AUX", "VBZ"),
    ("AUX", "MD"),
    ("ADJ", "JJ"),
    ("ADJ", "JJR"),
    ("ADJ", "JJS"),
    ("ADV", "RB"),
    ("ADV", "RBR"),
    ("ADV", "RBS"),
    ("ADP", "IN"),
    ("DET", "DT"),
];

pub const DEPS: &[&str] = &[
    "amod", "acl", "xcomp", "advcl", "acomp", "oprd", "advmod", "dobj", "attr", "prep", "pobj", "pcomp", "nsubj",
    "compound", "det", "aux",
];

pub const VOCAB: &[&str] = &[
    "high",
    "tight",
    "rise",
    "brunt",
    "vulnerable",
    "more",
    "slowdown",
    "strong",
    "weak",
    "fall",
    "growth",
    "recover",
    "fear",
    "boost",
    "hurt",
    "stable",
    "carry",
    "become",
    "thing",
    "go",
    "month",
    "be",
    "have",
    "money",
];

pub fn topic() -> TopicSpec {
    TopicSpec::new("test", &["economy", "interest rate"]).unwrap()
}

pub fn lexicon() -> Lexicon {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/lexicon_small.tsv"))
        .expect("fixture lexicon");
    figas_text::lexicon::load_lexicon_str(&text).unwrap()
}

/// Tags a parser would usually attach to a given relation.
fn typical_tags(dep: &str) -> &'static [(&'static str, &'static str)] {
    match dep {
        "amod" => &[("ADJ", "JJ"), ("ADJ", "JJR"), ("VERB", "VBN")],
        "acomp" | "oprd" => &[("ADJ", "JJ"), ("ADJ", "JJS")],
        "advmod" => &[("ADV", "RBR"), ("ADV", "RBS"), ("ADV", "RB")],
        "dobj" | "attr" | "pobj" | "nsubj" => &[("NOUN", "NN"), ("PROPN", "NNP")],
        "xcomp" | "advcl" | "pcomp" | "acl" => &[("VERB", "VBG"), ("VERB", "VB")],
        "prep" => &[("ADP", "IN")],
        _ => &[],
    }
}

fn token(index: usize, lemma: &str, upos: &str, xtag: &str, head: usize, dep: &str) -> ParsedToken {
    ParsedToken {
        index,
        surface: lemma.to_string(),
        lemma: lemma.to_string(),
        upos: upos.to_string(),
        xtag: xtag.to_string(),
        head,
        dep: dep.to_string(),
        feats: String::new(),
        ner_tag: String::new(),
        misc: String::new(),
    }
}

/// Random tree of 2..=max_len tokens holding at least one ToI; no `neg` arcs.
pub fn random_sentence<R: Rng>(rng: &mut R, max_len: usize) -> ParsedSentence {
    let n = rng.random_range(2..=max_len);
    // Random recursive tree over a shuffled order: each node attaches to an earlier one.
    let mut order: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut heads = vec![0usize; n + 1];
    for k in 1..n {
        heads[order[k]] = order[rng.random_range(0..k)];
    }
    let mut tokens: Vec<ParsedToken> = (1..=n)
        .map(|i| {
            let dep = if heads[i] == 0 { "ROOT" } else { DEPS.choose(rng).unwrap() };
            let typical = typical_tags(dep);
            let (upos, xtag) = if !typical.is_empty() && rng.random_bool(0.7) {
                *typical.choose(rng).unwrap()
            } else {
                *TAGS.choose(rng).unwrap()
            };
            token(i, VOCAB.choose(rng).unwrap(), upos, xtag, heads[i], dep)
        })
        .collect();
    let at = rng.random_range(0..n);
    if at + 1 < n && rng.random_bool(0.3) {
        tokens[at].lemma = "interest".into();
        tokens[at + 1].lemma = "rate".into();
    } else {
        tokens[at].lemma = "economy".into();
    }
    let toi_head = tokens[at].head;
    if toi_head != 0 && tokens[toi_head - 1].head != 0 && rng.random_bool(0.2) {
        // "rise in money supply": the ToI is the object of a preposition.
        tokens[at].dep = "pobj".into();
        tokens[toi_head - 1].dep = "prep".into();
        tokens[toi_head - 1].upos = "ADP".into();
        tokens[toi_head - 1].xtag = "IN".into();
    } else if toi_head != 0 && rng.random_bool(0.7) {
        let (upos, xtag) = *[("VERB", "VBD"), ("VERB", "VBZ"), ("AUX", "VBZ")].choose(rng).unwrap();
        tokens[toi_head - 1].upos = upos.into();
        tokens[toi_head - 1].xtag = xtag.into();
        // Turn one sibling into a preposition with an object or clausal complement.
        let siblings: Vec<usize> = (0..n).filter(|&k| k != at && tokens[k].head == toi_head).collect();
        if let Some(&p) = siblings.choose(rng) {
            if rng.random_bool(0.5) {
                tokens[p].dep = "prep".into();
                tokens[p].upos = "ADP".into();
                tokens[p].xtag = "IN".into();
                for g in 0..n {
                    if tokens[g].head == p + 1 && !["interest", "rate", "economy"].contains(&tokens[g].lemma.as_str()) {
                        let (dep, upos, xtag) =
                            if rng.random_bool(0.6) { ("pobj", "NOUN", "NN") } else { ("pcomp", "VERB", "VBG") };
                        tokens[g].dep = dep.into();
                        tokens[g].upos = upos.into();
                        tokens[g].xtag = xtag.into();
                    }
                }
            }
        }
    }
    for t in &mut tokens {
        t.surface = t.lemma.clone();
        if ["economy", "interest", "rate"].contains(&t.lemma.as_str()) {
            t.upos = "NOUN".into();
            t.xtag = "NN".into();
        }
    }
    ParsedSentence { sentence_id: "r".into(), tokens }
}

fn depth(s: &ParsedSentence, mut i: usize) -> Vec<usize> {
    let mut path = vec![i];
    while s.tokens[i - 1].head != 0 {
        i = s.tokens[i - 1].head;
        path.push(i);
    }
    path
}

/// Tree distance through the lowest common ancestor.
pub fn lca_distance(s: &ParsedSentence, a: usize, b: usize) -> usize {
    let pa = depth(s, a);
    let pb = depth(s, b);
    for (ia, x) in pa.iter().enumerate() {
        if let Some(ib) = pb.iter().position(|y| y == x) {
            return ia + ib;
        }
    }
    unreachable!("tokens share the root")
}

fn jj(t: &ParsedToken) -> bool {
    t.xtag == "JJ" || t.xtag == "JJR" || t.xtag == "JJS"
}

fn amod_ok(t: &ParsedToken) -> bool {
    t.dep == "amod" && ((t.upos == "ADJ" && jj(t)) || t.upos == "VERB")
}

fn noun(t: &ParsedToken) -> bool {
    t.upos == "NOUN" || t.upos == "PROPN"
}

fn cmp_adv(t: &ParsedToken) -> bool {
    t.dep == "advmod" && (t.xtag == "RBR" || t.xtag == "RBS")
}

/// Every (term index, rule label) pair, by scanning all tokens against each pattern.
pub fn oracle_pairs(s: &ParsedSentence, toi: ToiMatch) -> Vec<(usize, &'static str)> {
    let tk = |i: usize| &s.tokens[i - 1];
    let in_span = |i: usize| i >= toi.start && i < toi.start + toi.len;
    let t = (toi.start..toi.start + toi.len).rev().find(|&i| !in_span(tk(i).head)).unwrap();
    let n = s.tokens.len();
    let v = tk(t).head;
    let has_v = v != 0 && (tk(v).upos == "VERB" || tk(v).upos == "AUX");
    let mut out = Vec::new();
    for c in 1..=n {
        let ct = tk(c);
        let h = ct.head;
        if h == t && amod_ok(ct) {
            out.push((c, "r1"));
        }
        if h == t && ct.dep == "acl" {
            out.push((c, "r8"));
        }
        if has_v {
            if c == v {
                out.push((c, "verb"));
            }
            if h == v && (ct.dep == "xcomp" || ct.dep == "advcl") && ct.upos == "VERB" {
                out.push((c, "r2"));
            }
            if h == v && ct.dep == "acomp" && jj(ct) {
                out.push((c, "r3"));
            }
            if h == v && ct.dep == "oprd" && jj(ct) {
                out.push((c, "r4"));
            }
            if h == v && cmp_adv(ct) {
                out.push((c, "r5"));
            }
            if h != 0 && cmp_adv(ct) {
                let a = tk(h);
                if a.head == v && (a.dep == "acomp" || a.dep == "oprd") && jj(a) {
                    out.push((c, "r5"));
                }
            }
            let obj = |x: &ParsedToken| x.head == v && (x.dep == "dobj" || x.dep == "attr") && noun(x);
            if obj(ct) {
                out.push((c, "r6"));
            }
            if h != 0 && amod_ok(ct) && obj(tk(h)) {
                out.push((c, "r6"));
            }
            let prep = |i: usize| i != 0 && tk(i).head == v && tk(i).dep == "prep";
            let pobj = |x: &ParsedToken| prep(x.head) && x.dep == "pobj" && noun(x);
            if pobj(ct) || (prep(h) && ct.dep == "pcomp" && ct.upos == "VERB") {
                out.push((c, "r7"));
            }
            if h != 0 && amod_ok(ct) && pobj(tk(h)) {
                out.push((c, "r7"));
            }
        }
        let tt = tk(t);
        if tt.dep == "pobj" && tt.head != 0 && tk(tt.head).dep == "prep" && tk(tt.head).head == c {
            out.push((c, "r7inv"));
        }
    }
    out.retain(|&(c, _)| !in_span(c) && tk(c).dep != "neg");
    out
}

/// Nonzero-score terms ordered by tree distance then index.
pub fn oracle_terms(s: &ParsedSentence, toi: ToiMatch, lex: &Lexicon) -> Vec<(usize, f64)> {
    let t = (toi.start..toi.start + toi.len).rev().find(|&i| {
        let h = s.tokens[i - 1].head;
        !(h >= toi.start && h < toi.start + toi.len)
    });
    let t = t.unwrap();
    let mut idx: Vec<usize> = oracle_pairs(s, toi).into_iter().map(|p| p.0).collect();
    idx.sort_unstable();
    idx.dedup();
    idx.sort_by_key(|&i| (lca_distance(s, t, i), i));
    idx.into_iter()
        .filter_map(|i| {
            let sc = lex.get(&s.tokens[i - 1].lemma).unwrap_or(0.0);
            (sc != 0.0).then_some((i, sc))
        })
        .collect()
}

/// Appends a `neg` token attached to `head`.
pub fn with_neg(s: &ParsedSentence, head: usize) -> ParsedSentence {
    let mut out = s.clone();
    let index = s.len() + 1;
    out.tokens.push(ParsedToken {
        index,
        surface: "not".into(),
        lemma: "not".into(),
        upos: "PART".into(),
        xtag: "RB".into(),
        head,
        dep: "neg".into(),
        feats: String::new(),
        ner_tag: String::new(),
        misc: String::new(),
    });
    out
}

/// The generator vocabulary with random scores, so bounds are checked for any lexicon.
pub fn random_lexicon<R: Rng>(rng: &mut R) -> Lexicon {
    let entries: Vec<(String, f64)> = VOCAB
        .iter()
        .map(|w| (w.to_string(), if rng.random_bool(0.2) { 0.0 } else { rng.random_range(-1.0..=1.0) }))
        .collect();
    let toi = rng.random_range(-1.0..=1.0);
    Lexicon::from_entries(entries.into_iter().chain([("interest rate".to_string(), toi)])).unwrap()
}
