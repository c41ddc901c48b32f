//! `synth`: a synthetic corpus, lexicon, release calendar and target series
//! with known ground truth.
//!
//! Two latent daily AR(1) states drive the tone of `economy` and
//! `inflation` sentences. Each sentence instantiates one dependency pattern
//! and has a known score. The indicator S is the trailing mean of the daily
//! score sums, exactly as the pipeline computes it, and the monthly target
//! growth is
//!
//! `y_t = eta * S_economy(d_t - 1) + 0.3 * CFNAI_{t-1} + sigma * e_t`,
//!
//! where d_t is the first release date of period t. Inflation sentiment has
//! no effect.

use std::io::Write;

use chrono::{Datelike, Duration, NaiveDate};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use figas_core::rng::stream;
use figas_realtime::{Release, VintageStore};
use figas_text::calendar::{period_end, Frequency};
use figas_text::{smooth, write_corpus, ParsedDocument, ParsedSentence, ParsedToken, SentimentSeries};

use crate::config::{Config, VERSION};
use crate::error::Result;
use crate::output::create;

pub const LATENT_PHI: f64 = 0.995;
/// Slope of the tone probability in the latent state.
pub const TONE_SLOPE: f64 = 2.0;
pub const CFNAI_COEF: f64 = 0.3;
pub const TARGET: &str = "INDPRO";
/// First and second release lags of the target, in days after the period end.
pub const TARGET_LAGS: (i64, i64) = (16, 46);
pub const TOPICS: [&str; 2] = ["economy", "inflation"];

const MORE: f64 = 0.3;
const POS_ADJ: [(&str, f64); 4] = [("strong", 0.6), ("robust", 0.5), ("solid", 0.4), ("healthy", 0.45)];
const NEG_ADJ: [(&str, f64); 4] = [("weak", -0.6), ("fragile", -0.5), ("sluggish", -0.4), ("shaky", -0.45)];
/// (lemma, gerund, score)
const POS_VERB: [(&str, &str, f64); 4] = [
    ("improve", "improving", 0.5),
    ("expand", "expanding", 0.4),
    ("recover", "recovering", 0.45),
    ("strengthen", "strengthening", 0.55),
];
const NEG_VERB: [(&str, &str, f64); 4] = [
    ("deteriorate", "deteriorating", -0.55),
    ("contract", "contracting", -0.4),
    ("falter", "faltering", -0.45),
    ("weaken", "weakening", -0.5),
];
const POS_NOUN: [(&str, f64); 4] = [("growth", 0.4), ("gain", 0.3), ("recovery", 0.5), ("expansion", 0.45)];
const NEG_NOUN: [(&str, f64); 4] = [("recession", -0.7), ("decline", -0.5), ("slowdown", -0.6), ("contraction", -0.45)];

/// Sentence patterns; each exercises one rule (or negation / a verb ToI head).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Template {
    Amod,
    Acl,
    Xcomp,
    Acomp,
    Oprd,
    Comparative,
    Dobj,
    DobjAmod,
    Prep,
    PrepInverse,
    Negated,
    FutureVerb,
}

impl Template {
    pub const ALL: [Template; 12] = [
        Template::Amod,
        Template::Acl,
        Template::Xcomp,
        Template::Acomp,
        Template::Oprd,
        Template::Comparative,
        Template::Dobj,
        Template::DobjAmod,
        Template::Prep,
        Template::PrepInverse,
        Template::Negated,
        Template::FutureVerb,
    ];

    /// The dependency rule the pattern instantiates (1-8).
    pub fn rule(&self) -> u8 {
        match self {
            Template::Amod => 1,
            Template::Xcomp => 2,
            Template::Acomp | Template::Negated => 3,
            Template::Oprd => 4,
            Template::Comparative => 5,
            Template::Dobj | Template::DobjAmod | Template::FutureVerb => 6,
            Template::Prep | Template::PrepInverse => 7,
            Template::Acl => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plan {
    pub date: NaiveDate,
    pub topic: usize,
    pub template: Template,
    pub positive: bool,
    pub word: usize,
}

type Tok = (&'static str, &'static str, &'static str, &'static str, usize, &'static str);

impl Plan {
    fn adj(&self) -> (&'static str, f64) {
        // Negation flips the adjective, so a positive sentence uses a negative one.
        let pos = self.positive != (self.template == Template::Negated);
        if pos {
            POS_ADJ[self.word]
        } else {
            NEG_ADJ[self.word]
        }
    }

    fn verb(&self) -> (&'static str, &'static str, f64) {
        if self.positive {
            POS_VERB[self.word]
        } else {
            NEG_VERB[self.word]
        }
    }

    fn noun(&self) -> (&'static str, f64) {
        if self.positive {
            POS_NOUN[self.word]
        } else {
            NEG_NOUN[self.word]
        }
    }

    /// Term scores in tree-distance order from the ToI, and the negation flag.
    fn terms(&self) -> (Vec<f64>, bool) {
        match self.template {
            Template::Amod | Template::Acomp | Template::Oprd => (vec![self.adj().1], false),
            Template::Negated => (vec![self.adj().1], true),
            Template::Comparative => (vec![self.adj().1, MORE], false),
            Template::Acl | Template::Xcomp | Template::FutureVerb => (vec![self.verb().2], false),
            Template::Dobj | Template::Prep | Template::PrepInverse => (vec![self.noun().1], false),
            Template::DobjAmod => (vec![self.noun().1, self.adj().1], false),
        }
    }

    /// Expected sentence score: `s1 + s1 * sum(rest)`, clamped, flipped once if negated.
    pub fn score(&self) -> f64 {
        let (terms, negated) = self.terms();
        let Some((&s1, rest)) = terms.split_first() else { return 0.0 };
        let mut s = (s1 + s1 * rest.iter().sum::<f64>()).clamp(-1.0, 1.0);
        if negated {
            s = -s;
        }
        s + 0.0
    }

    fn tokens(&self) -> Vec<Tok> {
        let x = TOPICS[self.topic];
        let (adj, _) = self.adj();
        let (verb, gerund, _) = self.verb();
        let (noun, _) = self.noun();
        let p = ".";
        match self.template {
            Template::Amod => vec![
                ("the", "the", "DET", "DT", 3, "det"),
                (adj, adj, "ADJ", "JJ", 3, "amod"),
                (x, x, "NOUN", "NN", 4, "nsubj"),
                ("persists", "persist", "VERB", "VBZ", 0, "ROOT"),
                (p, p, "PUNCT", ".", 4, "punct"),
            ],
            Template::Acl => vec![
                ("the", "the", "DET", "DT", 2, "det"),
                (x, x, "NOUN", "NN", 0, "ROOT"),
                (gerund, verb, "VERB", "VBG", 2, "acl"),
                (p, p, "PUNCT", ".", 2, "punct"),
            ],
            Template::Xcomp => vec![
                ("the", "the", "DET", "DT", 2, "det"),
                (x, x, "NOUN", "NN", 4, "nsubjpass"),
                ("is", "be", "AUX", "VBZ", 4, "auxpass"),
                ("expected", "expect", "VERB", "VBN", 0, "ROOT"),
                ("to", "to", "PART", "TO", 6, "aux"),
                (verb, verb, "VERB", "VB", 4, "xcomp"),
                (p, p, "PUNCT", ".", 4, "punct"),
            ],
            Template::Acomp => vec![
                ("the", "the", "DET", "DT", 2, "det"),
                (x, x, "NOUN", "NN", 3, "nsubj"),
                ("looks", "look", "VERB", "VBZ", 0, "ROOT"),
                (adj, adj, "ADJ", "JJ", 3, "acomp"),
                (p, p, "PUNCT", ".", 3, "punct"),
            ],
            Template::Oprd => vec![
                ("analysts", "analyst", "NOUN", "NNS", 2, "nsubj"),
                ("consider", "consider", "VERB", "VBP", 0, "ROOT"),
                ("the", "the", "DET", "DT", 4, "det"),
                (x, x, "NOUN", "NN", 2, "dobj"),
                (adj, adj, "ADJ", "JJ", 2, "oprd"),
                (p, p, "PUNCT", ".", 2, "punct"),
            ],
            Template::Comparative => vec![
                ("the", "the", "DET", "DT", 2, "det"),
                (x, x, "NOUN", "NN", 3, "nsubj"),
                ("looks", "look", "VERB", "VBZ", 0, "ROOT"),
                ("more", "more", "ADV", "RBR", 5, "advmod"),
                (adj, adj, "ADJ", "JJ", 3, "acomp"),
                (p, p, "PUNCT", ".", 3, "punct"),
            ],
            Template::Dobj => vec![
                ("the", "the", "DET", "DT", 2, "det"),
                (x, x, "NOUN", "NN", 3, "nsubj"),
                ("posted", "post", "VERB", "VBD", 0, "ROOT"),
                (noun, noun, "NOUN", "NN", 3, "dobj"),
                (p, p, "PUNCT", ".", 3, "punct"),
            ],
            Template::DobjAmod => vec![
                ("the", "the", "DET", "DT", 2, "det"),
                (x, x, "NOUN", "NN", 3, "nsubj"),
                ("showed", "show", "VERB", "VBD", 0, "ROOT"),
                (adj, adj, "ADJ", "JJ", 5, "amod"),
                (noun, noun, "NOUN", "NN", 3, "dobj"),
                (p, p, "PUNCT", ".", 3, "punct"),
            ],
            Template::Prep => vec![
                ("the", "the", "DET", "DT", 2, "det"),
                (x, x, "NOUN", "NN", 3, "nsubj"),
                ("moved", "move", "VERB", "VBD", 0, "ROOT"),
                ("toward", "toward", "ADP", "IN", 3, "prep"),
                (noun, noun, "NOUN", "NN", 4, "pobj"),
                (p, p, "PUNCT", ".", 3, "punct"),
            ],
            Template::PrepInverse => vec![
                ("a", "a", "DET", "DT", 2, "det"),
                (noun, noun, "NOUN", "NN", 0, "ROOT"),
                ("in", "in", "ADP", "IN", 2, "prep"),
                ("the", "the", "DET", "DT", 5, "det"),
                (x, x, "NOUN", "NN", 3, "pobj"),
                (p, p, "PUNCT", ".", 2, "punct"),
            ],
            Template::Negated => vec![
                ("the", "the", "DET", "DT", 2, "det"),
                (x, x, "NOUN", "NN", 5, "nsubj"),
                ("does", "do", "AUX", "VBZ", 5, "aux"),
                ("not", "not", "PART", "RB", 5, "neg"),
                ("look", "look", "VERB", "VB", 0, "ROOT"),
                (adj, adj, "ADJ", "JJ", 5, "acomp"),
                (p, p, "PUNCT", ".", 5, "punct"),
            ],
            Template::FutureVerb => vec![
                ("the", "the", "DET", "DT", 2, "det"),
                (x, x, "NOUN", "NN", 4, "nsubj"),
                ("will", "will", "AUX", "MD", 4, "aux"),
                (verb, verb, "VERB", "VB", 0, "ROOT"),
                (p, p, "PUNCT", ".", 4, "punct"),
            ],
        }
    }

    pub fn sentence(&self, sentence_id: String) -> ParsedSentence {
        let tokens = self
            .tokens()
            .into_iter()
            .enumerate()
            .map(|(i, (surface, lemma, upos, xtag, head, dep))| ParsedToken {
                index: i + 1,
                surface: surface.into(),
                lemma: lemma.into(),
                upos: upos.into(),
                xtag: xtag.into(),
                head,
                dep: dep.into(),
                feats: String::new(),
                ner_tag: String::new(),
                misc: String::new(),
            })
            .collect();
        ParsedSentence { sentence_id, tokens }
    }
}

/// Every scored word of the synthetic lexicon.
pub fn lexicon_entries() -> Vec<(&'static str, f64)> {
    let mut out: Vec<(&str, f64)> = vec![("more", MORE)];
    out.extend(POS_ADJ.iter().chain(&NEG_ADJ).copied());
    out.extend(POS_VERB.iter().chain(&NEG_VERB).map(|v| (v.0, v.2)));
    out.extend(POS_NOUN.iter().chain(&NEG_NOUN).copied());
    out.sort_by(|a, b| a.0.cmp(b.0));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetTruth {
    pub period_end: NaiveDate,
    pub first_release: NaiveDate,
    /// Indicator value that entered the growth equation (0 before coverage).
    pub sentiment: Option<f64>,
    pub cfnai_lag1: f64,
    pub growth: f64,
    pub level: f64,
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub plans: Vec<Plan>,
    /// Raw daily sums per topic, in `TOPICS` order.
    pub daily: Vec<SentimentSeries>,
    pub smoothed: Vec<SentimentSeries>,
    pub releases: Vec<Release>,
    pub target: Vec<TargetTruth>,
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn month_ends(from: NaiveDate, to: NaiveDate) -> Vec<NaiveDate> {
    let mut out = Vec::new();
    let mut m = period_end(from, Frequency::Monthly);
    while m <= period_end(to, Frequency::Monthly) {
        out.push(m);
        m = period_end(m + Duration::days(1), Frequency::Monthly);
    }
    out
}

fn day23_after(end: NaiveDate, months: u32) -> NaiveDate {
    let mut d = end;
    for _ in 0..months {
        d = period_end(d + Duration::days(1), Frequency::Monthly);
    }
    NaiveDate::from_ymd_opt(d.year(), d.month(), 23).unwrap()
}

fn ar1<R: Rng>(rng: &mut R, n: usize, phi: f64, sd: f64) -> Vec<f64> {
    let mut x = normal(rng) * sd / (1.0 - phi * phi).sqrt();
    (0..n)
        .map(|_| {
            let v = x;
            x = phi * x + sd * normal(rng);
            v
        })
        .collect()
}

/// Draws the full synthetic world for `seed`. Nothing is written.
pub fn simulate(cfg: &Config, seed: u64) -> SynthData {
    let days: Vec<NaiveDate> = cfg.synth_start.iter_days().take_while(|d| *d <= cfg.synth_end).collect();
    let latent_sd = (1.0 - LATENT_PHI * LATENT_PHI).sqrt();
    let latent: Vec<Vec<f64>> =
        (0..TOPICS.len()).map(|k| ar1(&mut stream(seed, k as u64), days.len(), LATENT_PHI, latent_sd)).collect();

    let mut rng = stream(seed, 10);
    let counts = [cfg.synth_economy_sentences, cfg.synth_inflation_sentences];
    let mut plans = Vec::new();
    for (i, &date) in days.iter().enumerate() {
        for (topic, &n) in counts.iter().enumerate() {
            let p_pos = 1.0 / (1.0 + (-TONE_SLOPE * latent[topic][i]).exp());
            for _ in 0..n {
                let template = Template::ALL[rng.random_range(0..Template::ALL.len())];
                let positive = rng.random::<f64>() < p_pos;
                plans.push(Plan { date, topic, template, positive, word: rng.random_range(0..4) });
            }
        }
    }

    let mut daily = Vec::new();
    let mut smoothed = Vec::new();
    for (k, name) in TOPICS.iter().enumerate() {
        let mut s = SentimentSeries::new(name, None, Frequency::Daily);
        s.dates = days.clone();
        s.values = vec![0.0; days.len()];
        for p in plans.iter().filter(|p| p.topic == k) {
            let i = (p.date - cfg.synth_start).num_days() as usize;
            s.values[i] += p.score();
        }
        smoothed.push(smooth(&s, cfg.smoothing).expect("window validated"));
        daily.push(s);
    }

    let mut rng = stream(seed, 20);
    let months = month_ends(cfg.synth_history_start, cfg.synth_end);
    let cfnai = ar1(&mut rng, months.len(), 0.5, 0.8);
    let mut releases = Vec::new();
    let mut rel = |variable: &str, end: NaiveDate, frequency: Frequency, release_date: NaiveDate, value: f64| {
        releases.push(Release { variable: variable.into(), ref_period_end: end, frequency, release_date, value });
    };
    let mut target = Vec::new();
    let mut level = 100.0;
    for (t, &end) in months.iter().enumerate() {
        rel("CFNAI", end, Frequency::Monthly, day23_after(end, 1), cfnai[t] + 0.05 * normal(&mut rng));
        rel("CFNAI", end, Frequency::Monthly, day23_after(end, 2), cfnai[t]);
        let first = end + Duration::days(TARGET_LAGS.0);
        let sentiment = smoothed[0].value_at(first - Duration::days(1));
        let c_prev = if t > 0 { cfnai[t - 1] } else { 0.0 };
        let growth =
            cfg.synth_eta * sentiment.unwrap_or(0.0) + CFNAI_COEF * c_prev + cfg.synth_noise * normal(&mut rng);
        let prev = level;
        level = prev * (1.0 + growth / 100.0);
        rel(TARGET, end, Frequency::Monthly, first, level * (1.0 + 0.05 * normal(&mut rng) / 100.0));
        rel(TARGET, end, Frequency::Monthly, end + Duration::days(TARGET_LAGS.1), level);
        target.push(TargetTruth {
            period_end: end,
            first_release: first,
            sentiment,
            cfnai_lag1: c_prev,
            growth: 100.0 * (level - prev) / prev,
            level,
        });
    }
    let first_sunday =
        cfg.synth_history_start + Duration::days(6 - cfg.synth_history_start.weekday().num_days_from_monday() as i64);
    let weeks: Vec<NaiveDate> = first_sunday.iter_weeks().take_while(|d| *d <= cfg.synth_end).collect();
    for (w, v) in weeks.iter().zip(ar1(&mut rng, weeks.len(), 0.9, 0.3)) {
        rel("NFCI", *w, Frequency::Weekly, *w + Duration::days(3), v);
    }
    let all_days: Vec<NaiveDate> = cfg.synth_history_start.iter_days().take_while(|d| *d <= cfg.synth_end).collect();
    for (d, v) in all_days.iter().zip(ar1(&mut rng, all_days.len(), 0.98, 0.2)) {
        rel("ADS", *d, Frequency::Daily, *d + Duration::days(1), v);
    }
    SynthData { plans, daily, smoothed, releases, target }
}

impl SynthData {
    pub fn store(&self) -> VintageStore {
        VintageStore::from_releases(self.releases.iter().cloned()).expect("synthetic releases are consistent")
    }

    /// One document per day holding that day's sentences.
    pub fn documents(&self) -> Vec<ParsedDocument> {
        let mut docs: Vec<ParsedDocument> = Vec::new();
        for p in &self.plans {
            if docs.last().is_none_or(|d| d.date != p.date) {
                docs.push(ParsedDocument {
                    doc_id: format!("syn{}", p.date.format("%Y%m%d")),
                    date: p.date,
                    outlet: "Synthetic Wire".into(),
                    categories: vec!["economy".into()],
                    sentences: Vec::new(),
                });
            }
            let doc = docs.last_mut().unwrap();
            let id = format!("{}-s{}", doc.doc_id, doc.sentences.len() + 1);
            doc.sentences.push(p.sentence(id));
        }
        docs
    }
}

#[derive(Serialize)]
struct SentenceTruth {
    sentence_id: String,
    date: NaiveDate,
    topic: &'static str,
    template: Template,
    rule: u8,
    score: f64,
}

/// Writes corpus, lexicon, topics, vintages, manifest and a runnable config into the output directory.
pub fn cmd_synth(cfg: &Config) -> Result<SynthData> {
    let data = simulate(cfg, cfg.seed);
    let dir = cfg.out_dir();
    let docs = data.documents();

    let (_, mut w) = create(cfg, &dir, "corpus.clu")?;
    write_corpus(&docs, &mut w)?;
    w.flush()?;

    let (_, mut w) = create(cfg, &dir, "lexicon.tsv")?;
    for (k, v) in lexicon_entries() {
        writeln!(w, "{k}\t{v}")?;
    }
    w.flush()?;

    let (_, mut w) = create(cfg, &dir, "topics.toml")?;
    for t in TOPICS {
        writeln!(w, "\n[[topic]]\nname = \"{t}\"\ntois = [\"{t}\"]")?;
    }
    w.flush()?;

    let (_, mut w) = create(cfg, &dir, "vintages.csv")?;
    figas_realtime::write_vintages(&data.store(), &mut w)?;
    w.flush()?;

    let run = Config {
        corpus: "corpus.clu".into(),
        lexicon: "lexicon.tsv".into(),
        topics: "topics.toml".into(),
        vintages: "vintages.csv".into(),
        series: String::new(),
        out: "results".into(),
        targets: vec![TARGET.into()],
        sentiments: TOPICS.iter().map(|t| format!("{t}_all")).collect(),
        oos_start: Some(oos_start(cfg)),
        base_dir: dir.clone(),
        ..cfg.clone()
    };
    let (_, mut w) = create(cfg, &dir, "config.toml")?;
    w.write_all(run.to_toml().as_bytes())?;
    w.flush()?;

    let mut sentences = Vec::with_capacity(data.plans.len());
    for (doc, chunk) in docs.iter().zip(data.plans.chunk_by(|a, b| a.date == b.date)) {
        for (s, p) in doc.sentences.iter().zip(chunk) {
            sentences.push(SentenceTruth {
                sentence_id: s.sentence_id.clone(),
                date: p.date,
                topic: TOPICS[p.topic],
                template: p.template,
                rule: p.template.rule(),
                score: p.score(),
            });
        }
    }
    let manifest = serde_json::json!({
        "version": VERSION,
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
        "dgp": {
            "equation": "y_t = eta * S_economy_all(d_t - 1) + cfnai_coef * CFNAI_{t-1} + sigma * e_t",
            "target": TARGET,
            "target_transform": "pct_growth",
            "eta": { "economy_all": { "1": cfg.synth_eta }, "inflation_all": { "1": 0.0 } },
            "cfnai_coef": CFNAI_COEF,
            "sigma": cfg.synth_noise,
            "latent_phi": LATENT_PHI,
            "tone_slope": TONE_SLOPE,
            "smoothing": cfg.smoothing,
            "sentences_per_day": { "economy": counts(cfg)[0], "inflation": counts(cfg)[1] },
        },
        "calendar": {
            "INDPRO": { "first_release_lag_days": TARGET_LAGS.0, "second_release_lag_days": TARGET_LAGS.1, "first_release_noise_pct": 0.05 },
            "CFNAI": "23rd of the following month, revised on the 23rd one month later",
            "NFCI": "weekly (Sunday), released 3 days later",
            "ADS": "daily, released 1 day later",
        },
        "target": data.target,
        "sentences": sentences,
    });
    std::fs::write(dir.join("manifest.json"), serde_json::to_string(&manifest).expect("serializable") + "\n")?;
    Ok(data)
}

/// The last 18 years of the sample, leaving at least six years to train.
fn oos_start(cfg: &Config) -> NaiveDate {
    let year = (cfg.synth_end.year() - 17).max(cfg.synth_start.year() + 6);
    NaiveDate::from_ymd_opt(year, 1, 1).unwrap()
}

fn counts(cfg: &Config) -> [usize; 2] {
    [cfg.synth_economy_sentences, cfg.synth_inflation_sentences]
}

#[cfg(test)]
mod tests {
    use super::*;
    use figas_text::lexicon::load_lexicon_str;
    use figas_text::{score_sentence, LocationPolicy, TopicSpec};

    fn small() -> Config {
        Config {
            synth_start: NaiveDate::from_ymd_opt(2010, 1, 1).unwrap(),
            synth_end: NaiveDate::from_ymd_opt(2010, 3, 31).unwrap(),
            synth_history_start: NaiveDate::from_ymd_opt(2009, 6, 1).unwrap(),
            ..Config::default()
        }
    }

    #[test]
    fn every_template_scores_as_planned() {
        let text: String = lexicon_entries().iter().map(|(k, v)| format!("{k}\t{v}\n")).collect();
        let lex = load_lexicon_str(&text).unwrap();
        let date = NaiveDate::from_ymd_opt(2010, 1, 1).unwrap();
        for (topic, name) in TOPICS.iter().enumerate() {
            let spec = TopicSpec::new(name, &[*name]).unwrap();
            for template in Template::ALL {
                for positive in [true, false] {
                    for word in 0..4 {
                        let p = Plan { date, topic, template, positive, word };
                        let doc = ParsedDocument {
                            doc_id: "d".into(),
                            date,
                            outlet: String::new(),
                            categories: vec![],
                            sentences: vec![p.sentence("d-s1".into())],
                        };
                        let got = score_sentence(&doc, &doc.sentences[0], &spec, &lex, &LocationPolicy::default())
                            .expect("ToI present");
                        assert_eq!(got.score, p.score(), "{p:?}");
                        assert_eq!(got.score > 0.0, positive, "{p:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn all_rules_are_instantiated() {
        let rules: std::collections::BTreeSet<u8> = Template::ALL.iter().map(Template::rule).collect();
        assert_eq!(rules.into_iter().collect::<Vec<_>>(), (1..=8).collect::<Vec<_>>());
    }

    #[test]
    fn simulation_is_seed_deterministic() {
        let a = simulate(&small(), 5);
        let b = simulate(&small(), 5);
        let c = simulate(&small(), 6);
        assert_eq!(a.plans, b.plans);
        assert_eq!(a.releases, b.releases);
        assert_ne!(a.releases, c.releases);
    }

    #[test]
    fn target_growth_follows_the_equation_where_sentiment_exists() {
        let cfg = Config { synth_noise: 0.0, ..small() };
        let d = simulate(&cfg, 1);
        let covered: Vec<&TargetTruth> = d.target.iter().filter(|t| t.sentiment.is_some()).collect();
        assert!(!covered.is_empty());
        for t in covered {
            let want = cfg.synth_eta * t.sentiment.unwrap() + CFNAI_COEF * t.cfnai_lag1;
            assert!((t.growth - want).abs() < 1e-9, "{} vs {want}", t.growth);
        }
        d.store();
    }
}
