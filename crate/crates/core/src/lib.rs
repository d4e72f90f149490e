//! Named person coreference toolkit.
//!
//! * [`conll`] and [`json`] read and write annotated documents;
//! * [`metrics`] implements MUC, B³, CEAF, LEA and the CoNLL average;
//! * [`npc`] filters chains down to person entities and scores them entity by entity;
//! * [`resolver`] is a rule-based, NER-driven resolver for person names and pronouns;
//! * [`stats`] computes corpus statistics.

pub mod conll;
pub mod error;
pub mod json;
pub mod metrics;
pub mod model;
pub mod npc;
pub mod resolver;
pub mod stats;

pub use conll::{emit_conll, parse_conll};
pub use error::{Error, Result};
pub use json::{emit_json, parse_json_doc, parse_json_docs};
pub use metrics::{score_document, Metric, MetricScore, ScoreReport, Scorer};
pub use model::{Chain, Document, EntityType, Mention, MentionType, NerSpan, Token};
pub use resolver::{run_ner_de, Gazetteer, Gender, Resolution, ResolverConfig};
pub use stats::{corpus_stats, pronoun_stats, PronounReport, StatsReport};
