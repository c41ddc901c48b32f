//! Text side of the pipeline: parsed news in, dated sentiment indicators out.

pub mod calendar;
pub mod corpus;
pub mod engine;
pub mod error;
pub mod indicators;
pub mod io;
pub mod lexicon;
pub mod topics;

pub use calendar::{period_end, Frequency};
pub use corpus::{
    dependency_children, parse_corpus, parse_corpus_str, write_corpus, ParsedDocument, ParsedSentence, ParsedToken,
};
pub use engine::{
    apply_rules, detect_location, detect_tense, match_tois, propagate, score_corpus, score_sentence, ChunkScore,
    LocationPolicy, Tense, ToiMatch,
};
pub use error::{Result, TextError};
pub use indicators::{aggregate_daily, resample, smooth, SentimentSeries};
pub use lexicon::{load_lexicon, Lexicon};
pub use topics::{default_topics, parse_topics, TopicSpec};
