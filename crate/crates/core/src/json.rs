//! JSON annotated-document format.
//!
//! ```json
//! {"doc_id": "d1",
//!  "sentences": [{"tokens": [{"text": "Ann", "pos": "NNP", "head": 1, "deprel": "nsubj"}, ...]}],
//!  "ner": [{"type": "PER", "start": 0, "end": 1}],
//!  "chains": [{"id": 0, "mentions": [{"start": 0, "end": 1}]}]}
//! ```
//!
//! Heads are sentence-local and 0-based with `-1` for the root; NER spans and
//! chain mentions use document-global token offsets. `chains` may be omitted.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Chain, Document, Mention, NerSpan, Token};

#[derive(Debug, Serialize, Deserialize)]
struct JsonDoc {
    doc_id: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    part: u32,
    sentences: Vec<JsonSentence>,
    #[serde(default)]
    ner: Vec<NerSpan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chains: Option<Vec<JsonChain>>,
}

fn is_zero(v: &u32) -> bool {
    *v == 0
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonSentence {
    tokens: Vec<JsonToken>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonToken {
    text: String,
    #[serde(default)]
    pos: String,
    #[serde(default = "root_head")]
    head: i64,
    #[serde(default)]
    deprel: String,
}

fn root_head() -> i64 {
    -1
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonChain {
    id: u64,
    mentions: Vec<Mention>,
}

fn json_err(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Json {
        path: path.into(),
        msg: msg.into(),
    }
}

fn syntax_err(e: serde_json::Error) -> Error {
    json_err("$", e.to_string())
}

fn convert(raw: JsonDoc, prefix: &str) -> Result<Document> {
    let mut tokens = Vec::new();
    for (s, sentence) in raw.sentences.into_iter().enumerate() {
        let offset = tokens.len();
        let len = sentence.tokens.len() as i64;
        for (t, tok) in sentence.tokens.into_iter().enumerate() {
            let head = match tok.head {
                -1 => None,
                h if (0..len).contains(&h) => Some(offset + h as usize),
                h => {
                    return Err(json_err(
                        format!("{prefix}sentences[{s}].tokens[{t}].head"),
                        format!("head {h} outside sentence of {len} tokens"),
                    ))
                }
            };
            tokens.push(Token {
                text: tok.text,
                pos: tok.pos,
                head,
                deprel: tok.deprel,
                sentence: s,
            });
        }
    }
    let n = tokens.len();

    for (i, span) in raw.ner.iter().enumerate() {
        if span.end > n {
            return Err(json_err(
                format!("{prefix}ner[{i}].end"),
                format!("end {} exceeds token count {n}", span.end),
            ));
        }
        if span.start >= span.end {
            return Err(json_err(
                format!("{prefix}ner[{i}].start"),
                format!("start {} not before end {}", span.start, span.end),
            ));
        }
        if let Some(j) = raw.ner[..i].iter().position(|o| {
            o.entity_type == span.entity_type && o.start < span.end && span.start < o.end
        }) {
            return Err(json_err(
                format!("{prefix}ner[{i}]"),
                format!("overlaps ner[{j}] of the same type"),
            ));
        }
    }

    let mut chains = Vec::new();
    let mut ids = HashSet::new();
    for (i, chain) in raw.chains.unwrap_or_default().into_iter().enumerate() {
        if !ids.insert(chain.id) {
            return Err(json_err(format!("{prefix}chains[{i}].id"), format!("duplicate chain id {}", chain.id)));
        }
        let mut mentions = BTreeSet::new();
        for (j, m) in chain.mentions.into_iter().enumerate() {
            if m.end > n {
                return Err(json_err(
                    format!("{prefix}chains[{i}].mentions[{j}].end"),
                    format!("end {} exceeds token count {n}", m.end),
                ));
            }
            if m.start >= m.end {
                return Err(json_err(
                    format!("{prefix}chains[{i}].mentions[{j}].start"),
                    format!("start {} not before end {}", m.start, m.end),
                ));
            }
            if !mentions.insert(m) {
                return Err(json_err(format!("{prefix}chains[{i}].mentions[{j}]"), format!("duplicate mention {m}")));
            }
        }
        chains.push(Chain { id: chain.id, mentions });
    }

    Ok(Document {
        doc_id: raw.doc_id,
        part: raw.part,
        tokens,
        ner: raw.ner,
        chains,
    })
}

/// Parses a single JSON annotated document.
pub fn parse_json_doc(text: &str) -> Result<Document> {
    let raw: JsonDoc = serde_json::from_str(text).map_err(syntax_err)?;
    convert(raw, "")
}

/// Parses either one document object or an array of documents.
pub fn parse_json_docs(text: &str) -> Result<Vec<Document>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(syntax_err)?;
    match value {
        serde_json::Value::Array(items) => items
            .into_iter()
            .enumerate()
            .map(|(i, item)| {
                let raw: JsonDoc =
                    serde_json::from_value(item).map_err(|e| json_err(format!("[{i}]"), e.to_string()))?;
                convert(raw, &format!("[{i}]."))
            })
            .collect(),
        other => {
            let raw: JsonDoc = serde_json::from_value(other).map_err(syntax_err)?;
            Ok(vec![convert(raw, "")?])
        }
    }
}

fn to_raw(doc: &Document) -> JsonDoc {
    let sentences = doc
        .sentences()
        .into_iter()
        .map(|range| JsonSentence {
            tokens: doc.tokens[range.clone()]
                .iter()
                .map(|t| JsonToken {
                    text: t.text.clone(),
                    pos: t.pos.clone(),
                    head: t.head.map_or(-1, |h| (h - range.start) as i64),
                    deprel: t.deprel.clone(),
                })
                .collect(),
        })
        .collect();
    JsonDoc {
        doc_id: doc.doc_id.clone(),
        part: doc.part,
        sentences,
        ner: doc.ner.clone(),
        chains: Some(
            doc.chains
                .iter()
                .map(|c| JsonChain {
                    id: c.id,
                    mentions: c.mentions.iter().copied().collect(),
                })
                .collect(),
        ),
    }
}

pub fn to_json_value(doc: &Document) -> serde_json::Value {
    serde_json::to_value(to_raw(doc)).expect("document serializes")
}

/// Serializes documents as a pretty-printed JSON array.
pub fn emit_json(docs: &[Document]) -> String {
    let values: Vec<_> = docs.iter().map(to_json_value).collect();
    let mut out = serde_json::to_string_pretty(&values).expect("documents serialize");
    out.push('\n');
    out
}
